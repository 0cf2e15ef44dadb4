#include "autostruct/kb.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "autostruct/error.hpp"

namespace autostruct {

  ////////////////////////////////////////////////////////////////////////
  // RuleSet
  ////////////////////////////////////////////////////////////////////////

  void RuleSet::Trie::clear(std::size_t d) {
    degree = d;
    child.assign(d, 0);
    terminal.assign(1, 0);
  }

  std::uint32_t RuleSet::Trie::add_node() {
    child.resize(child.size() + degree, 0);
    terminal.push_back(0);
    return static_cast<std::uint32_t>(terminal.size() - 1);
  }

  RuleSet::RuleSet(Alphabet alphabet)
      : alphabet_(std::move(alphabet)), letters_(alphabet_.size()) {
    forward_.clear(letters_);
    reverse_.clear(letters_);
  }

  std::vector<RewriteRule> RuleSet::rules() const {
    std::vector<RewriteRule> out;
    out.reserve(live_);
    for (std::uint32_t i = 0; i < num_ids(); ++i) {
      if (alive_[i]) {
        out.push_back(rules_[i]);
      }
    }
    return out;
  }

  void RuleSet::index_rule(std::uint32_t id) {
    auto const& lhs = rules_[id].lhs;
    auto        add = [&](Trie& t, auto first, auto last) {
      std::uint32_t n = 0;
      for (auto it = first; it != last; ++it) {
        auto  slot = static_cast<std::size_t>(n) * letters_ + *it;
        auto  c    = t.child[slot];
        if (c == 0) {
          c            = t.add_node();
          t.child[slot] = c;
        }
        n = c;
      }
      t.terminal[n] = id + 1;
    };
    add(forward_, lhs.begin(), lhs.end());
    add(reverse_, lhs.rbegin(), lhs.rend());
    max_lhs_ = std::max(max_lhs_, lhs.size());
  }

  std::uint32_t RuleSet::add_rule(word_type lhs, word_type rhs) {
    if (!shortlex_less(rhs, lhs)) {
      throw std::invalid_argument("rule right-hand side must be shortlex less than its left-hand side");
    }
    if (lhs.empty() || !alphabet_.contains(lhs) || !alphabet_.contains(rhs)) {
      throw std::invalid_argument("rule words must be over the rule alphabet");
    }
    auto id = static_cast<std::uint32_t>(rules_.size());
    rules_.push_back({std::move(lhs), std::move(rhs)});
    alive_.push_back(1);
    ++live_;
    index_rule(id);
    return id;
  }

  void RuleSet::remove_rule(std::uint32_t id) {
    if (!alive_[id]) {
      return;
    }
    alive_[id] = 0;
    --live_;
    auto const& lhs   = rules_[id].lhs;
    auto        unset = [&](Trie& t, auto first, auto last) {
      std::uint32_t n = 0;
      for (auto it = first; it != last; ++it) {
        n = t.child[static_cast<std::size_t>(n) * letters_ + *it];
        if (n == 0) {
          return;
        }
      }
      if (t.terminal[n] == id + 1) {
        t.terminal[n] = 0;
      }
    };
    unset(forward_, lhs.begin(), lhs.end());
    unset(reverse_, lhs.rbegin(), lhs.rend());
  }

  void RuleSet::set_rhs(std::uint32_t id, word_type rhs) {
    if (!shortlex_less(rhs, rules_[id].lhs)) {
      throw std::invalid_argument("rule right-hand side must be shortlex less than its left-hand side");
    }
    rules_[id].rhs = std::move(rhs);
  }

  void RuleSet::rebuild_index() {
    forward_.clear(letters_);
    reverse_.clear(letters_);
    max_lhs_ = 0;
    for (std::uint32_t i = 0; i < num_ids(); ++i) {
      if (alive_[i]) {
        index_rule(i);
      }
    }
  }

  void RuleSet::rewrite_in_place(word_type& w) const {
    if (live_ == 0 || w.empty()) {
      return;
    }
    word_type out;
    out.reserve(w.size());
    word_type in(w.rbegin(), w.rend());
    auto const* child    = reverse_.child.data();
    auto const* terminal = reverse_.terminal.data();
    while (!in.empty()) {
      out.push_back(in.back());
      in.pop_back();
      std::uint32_t n = 0;
      for (auto k = out.size(); k-- > 0;) {
        n = child[static_cast<std::size_t>(n) * letters_ + out[k]];
        if (n == 0) {
          break;
        }
        if (terminal[n] != 0) {
          auto const& r = rules_[terminal[n] - 1];
          out.resize(k);
          in.insert(in.end(), r.rhs.rbegin(), r.rhs.rend());
          break;
        }
      }
    }
    w = std::move(out);
  }

  word_type RuleSet::rewrite(word_type const& w) const {
    word_type out = w;
    rewrite_in_place(out);
    return out;
  }

  bool RuleSet::reducible(word_type const& w, std::size_t first, std::size_t last) const {
    auto const* child    = reverse_.child.data();
    auto const* terminal = reverse_.terminal.data();
    for (auto e = first; e < last; ++e) {
      std::uint32_t n = 0;
      for (auto k = e + 1; k-- > first;) {
        n = child[static_cast<std::size_t>(n) * letters_ + w[k]];
        if (n == 0) {
          break;
        }
        if (terminal[n] != 0) {
          return true;
        }
      }
    }
    return false;
  }

  std::size_t RuleSet::memory_bytes() const noexcept {
    std::size_t b = (forward_.child.size() + reverse_.child.size()
                     + forward_.terminal.size() + reverse_.terminal.size())
                    * sizeof(std::uint32_t);
    for (auto const& r : rules_) {
      b += 64 + (r.lhs.capacity() + r.rhs.capacity()) * sizeof(letter_type);
    }
    return b;
  }

  void write_rules(std::ostream& out, RuleSet const& rs) {
    auto const& a = rs.alphabet();
    for (std::uint32_t i = 0; i < rs.num_ids(); ++i) {
      if (rs.alive(i)) {
        out << a.print(rs.rule(i).lhs) << " -> " << a.print(rs.rule(i).rhs) << '\n';
      }
    }
  }

  RuleSet read_rules(std::istream& in, Alphabet const& a) {
    RuleSet     rs(a);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto h = line.find('#'); h != std::string::npos) {
        line.erase(h);
      }
      if (line.find_first_not_of(" \t\r") == std::string::npos) {
        continue;
      }
      auto arrow = line.find("->");
      if (arrow == std::string::npos) {
        throw ParseError(fmt::format("rules line {}: expected 'lhs -> rhs'", lineno));
      }
      auto lhs = a.parse(line.substr(0, arrow));
      auto rhs = a.parse(line.substr(arrow + 2));
      try {
        rs.add_rule(std::move(lhs), std::move(rhs));
      } catch (std::invalid_argument const& e) {
        throw ParseError(fmt::format("rules line {}: {}", lineno, e.what()));
      }
    }
    return rs;
  }

  RuleSet inverse_rules(Alphabet const& a) {
    RuleSet rs(a);
    for (letter_type x = 0; x < a.size(); ++x) {
      rs.add_rule({x, a.inverse(x)}, {});
    }
    return rs;
  }

  ////////////////////////////////////////////////////////////////////////
  // WordDifferenceSet
  ////////////////////////////////////////////////////////////////////////

  WordDifferenceSet::WordDifferenceSet(Alphabet alphabet)
      : alphabet_(std::move(alphabet)), diffs_{word_type{}}, index_{{word_type{}, 0}} {}

  std::int64_t WordDifferenceSet::find(word_type const& d) const {
    auto it = index_.find(d);
    return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
  }

  std::uint32_t WordDifferenceSet::add(word_type const& d) {
    auto [it, fresh] = index_.emplace(d, static_cast<std::uint32_t>(diffs_.size()));
    if (fresh) {
      diffs_.push_back(d);
    }
    return it->second;
  }

  void WordDifferenceSet::record(std::uint32_t from, symbol_type a, std::uint32_t to) {
    transitions_.emplace(std::make_pair(from, a), to);
  }

  void WordDifferenceSet::add_path(word_type const& u,
                                   word_type const& v,
                                   word_type const& last,
                                   RuleSet const&   rs) {
    auto const    pad = static_cast<letter_type>(alphabet_.size());
    auto const    n   = std::max(u.size(), v.size());
    std::uint32_t d   = 0;
    word_type     cur, next;
    for (std::size_t i = 0; i < n; ++i) {
      auto x = i < u.size() ? u[i] : pad;
      auto y = i < v.size() ? v[i] : pad;
      next.clear();
      if (x != pad) {
        next.push_back(alphabet_.inverse(x));
      }
      next.insert(next.end(), cur.begin(), cur.end());
      if (y != pad) {
        next.push_back(y);
      }
      if (i + 1 == n) {
        next = last;
      } else {
        rs.rewrite_in_place(next);
      }
      auto nd = add(next);
      record(d, symbol(x, y), nd);
      d = nd;
      std::swap(cur, next);
    }
  }

  void WordDifferenceSet::merge(WordDifferenceSet const& other) {
    std::vector<std::uint32_t> remap(other.size());
    for (std::size_t i = 0; i < other.size(); ++i) {
      remap[i] = add(other[i]);
    }
    for (auto const& [k, t] : other.transitions()) {
      record(remap[k.first], k.second, remap[t]);
    }
  }

  void WordDifferenceSet::renormalize(RuleSet const& rs) {
    std::vector<word_type>             diffs;
    std::map<word_type, std::uint32_t> index;
    std::vector<std::uint32_t>         remap(diffs_.size());
    for (std::size_t i = 0; i < diffs_.size(); ++i) {
      auto w           = rs.rewrite(diffs_[i]);
      auto [it, fresh] = index.emplace(w, static_cast<std::uint32_t>(diffs.size()));
      if (fresh) {
        diffs.push_back(std::move(w));
      }
      remap[i] = it->second;
    }
    std::map<std::pair<std::uint32_t, symbol_type>, std::uint32_t> trans;
    for (auto const& [k, t] : transitions_) {
      trans.emplace(std::make_pair(remap[k.first], k.second), remap[t]);
    }
    diffs_       = std::move(diffs);
    index_       = std::move(index);
    transitions_ = std::move(trans);
  }

  WordDifferenceSet extract_word_differences(
      std::vector<std::pair<word_type, word_type>> const& equations,
      RuleSet const&                                       reducer) {
    WordDifferenceSet wd(reducer.alphabet());
    for (auto const& [u, v] : equations) {
      wd.add_equation(u, v, reducer);
    }
    return wd;
  }

  WordDifferenceSet close_under_inversion(WordDifferenceSet const& wd,
                                          RuleSet const&           reducer) {
    auto const&                a   = wd.alphabet();
    auto                       out = wd;
    std::vector<std::uint32_t> inv(wd.size());
    for (std::size_t i = 0; i < wd.size(); ++i) {
      inv[i] = out.add(reducer.rewrite(invert_word(a, wd[i])));
    }
    auto const n = static_cast<symbol_type>(a.size() + 1);
    for (auto const& [k, t] : wd.transitions()) {
      auto x = k.second / n;
      auto y = k.second % n;
      out.record(inv[k.first], y * n + x, inv[t]);
    }
    out.set_inverse_closed(true);
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Completion
  ////////////////////////////////////////////////////////////////////////

  std::string to_string(HaltReason h) {
    switch (h) {
      case HaltReason::confluent:
        return "confluent";
      case HaltReason::stabilized:
        return "stabilized";
      case HaltReason::budget:
        return "budget";
    }
    return "?";
  }

  namespace {
    using Equation = std::pair<word_type, word_type>;

    // Overlaps of rule i with every live rule j <= i, in both orders.
    void overlaps(RuleSet const& rs, std::uint32_t i, std::vector<Equation>& out) {
      auto const& L = rs.rule(i).lhs;
      auto const& R = rs.rule(i).rhs;
      auto const  m = L.size();
      for (std::size_t k = 1; k < m; ++k) {
        // L = A B, lhs_j = B C
        rs.for_each_extension(L, k, m, [&](std::uint32_t j) {
          if (j > i) {
            return;
          }
          auto const& rj = rs.rule(j);
          word_type   a  = R;
          a.insert(a.end(), rj.lhs.begin() + (m - k), rj.lhs.end());
          word_type b(L.begin(), L.begin() + k);
          b.insert(b.end(), rj.rhs.begin(), rj.rhs.end());
          out.emplace_back(std::move(a), std::move(b));
        });
      }
      for (std::size_t k = 1; k < m; ++k) {
        // lhs_j = C B, L = B D
        rs.for_each_prefix_extension(L, 0, k, [&](std::uint32_t j) {
          if (j >= i) {
            return;
          }
          auto const& rj = rs.rule(j);
          word_type   a  = rj.rhs;
          a.insert(a.end(), L.begin() + k, L.end());
          word_type b(rj.lhs.begin(), rj.lhs.end() - k);
          b.insert(b.end(), R.begin(), R.end());
          out.emplace_back(std::move(a), std::move(b));
        });
      }
    }

    word_type const& larger(Equation const& e) {
      return shortlex_less(e.first, e.second) ? e.second : e.first;
    }
  }  // namespace

  std::vector<Equation> critical_pairs(RuleSet const& rs) {
    std::vector<Equation> out, buf;
    for (std::uint32_t i = 0; i < rs.num_ids(); ++i) {
      if (!rs.alive(i)) {
        continue;
      }
      buf.clear();
      overlaps(rs, i, buf);
      for (auto& [a, b] : buf) {
        rs.rewrite_in_place(a);
        rs.rewrite_in_place(b);
        if (a != b) {
          out.emplace_back(std::move(a), std::move(b));
        }
      }
    }
    return out;
  }

  KnuthBendix::KnuthBendix(Presentation const& p, KbConfig cfg)
      : KnuthBendix(p, inverse_rules(p.alphabet), cfg) {}

  KnuthBendix::KnuthBendix(Presentation const& p, RuleSet rules, KbConfig cfg)
      : presentation_(p),
        cfg_(cfg),
        rules_(std::move(rules)),
        diffs_(p.alphabet) {
    if (!(rules_.alphabet() == p.alphabet)) {
      throw AlphabetMismatch("rule set and presentation alphabets differ");
    }
    max_len_ = cfg_.max_word_len != 0 ? cfg_.max_word_len
                                      : 2 * p.max_relator_length() + 2;
    max_len_ = std::max<std::size_t>(max_len_, 2);
    for (std::uint32_t i = 0; i < rules_.num_ids(); ++i) {
      if (rules_.alive(i)) {
        diffs_.add_equation(rules_.rule(i).lhs, rules_.rule(i).rhs, rules_);
      }
    }
    for (auto const& r : p.relations) {
      pending_.push_back(r);
    }
  }

  void KnuthBendix::add_equation(word_type const& u, word_type const& v) {
    pending_.emplace_back(u, v);
    drain();
  }

  void KnuthBendix::process(word_type u, word_type v) {
    ++equations_;
    rules_.rewrite_in_place(u);
    rules_.rewrite_in_place(v);
    if (u == v) {
      return;
    }
    if (shortlex_less(u, v)) {
      std::swap(u, v);
    }
    if (u.size() > max_len_) {
      if (deferred_.size() < cfg_.max_deferred) {
        deferred_.emplace_back(std::move(u), std::move(v));
      } else {
        ++discarded_;
      }
      return;
    }
    auto id = rules_.add_rule(std::move(u), std::move(v));
    diffs_.add_equation(rules_.rule(id).lhs, rules_.rule(id).rhs, rules_);
    ++added_since_tidy_;
    if (rules_.size() > cfg_.max_equations
        || rules_.memory_bytes() > cfg_.memory_budget) {
      over_budget_ = true;
    }
  }

  void KnuthBendix::drain() {
    while (!pending_.empty()) {
      auto e = std::move(pending_.front());
      pending_.pop_front();
      process(std::move(e.first), std::move(e.second));
    }
  }

  void KnuthBendix::overlaps_of(std::uint32_t i) {
    std::vector<Equation> eqs;
    overlaps(rules_, i, eqs);
    for (auto& [a, b] : eqs) {
      rules_.rewrite_in_place(a);
      rules_.rewrite_in_place(b);
    }
    std::erase_if(eqs, [](Equation const& e) { return e.first == e.second; });
    std::stable_sort(eqs.begin(), eqs.end(), [](Equation const& x, Equation const& y) {
      return shortlex_less(larger(x), larger(y));
    });
    for (auto& [a, b] : eqs) {
      process(std::move(a), std::move(b));
      if (over_budget_) {
        return;
      }
    }
  }

  bool KnuthBendix::tidy() {
    bool changed = false;
    for (std::uint32_t i = 0; i < rules_.num_ids(); ++i) {
      if (!rules_.alive(i)) {
        continue;
      }
      auto const& lhs = rules_.rule(i).lhs;
      auto const  n   = lhs.size();
      if (n > 1 && (rules_.reducible(lhs, 0, n - 1) || rules_.reducible(lhs, 1, n))) {
        pending_.emplace_back(lhs, rules_.rule(i).rhs);
        rules_.remove_rule(i);
        changed = true;
      }
    }
    for (std::uint32_t i = 0; i < rules_.num_ids(); ++i) {
      if (rules_.alive(i)) {
        auto rhs = rules_.rewrite(rules_.rule(i).rhs);
        if (rhs != rules_.rule(i).rhs) {
          rules_.set_rhs(i, std::move(rhs));
        }
      }
    }
    rules_.rebuild_index();
    diffs_.renormalize(rules_);
    added_since_tidy_ = 0;
    drain();
    return changed;
  }

  void KnuthBendix::end_pass() {
    auto   inv = close_under_inversion(diffs_, rules_).size();
    KbPass p{passes_.size() + 1, rules_.size(), equations_, diffs_.size(), inv};
    if (!passes_.empty() && passes_.back().wdiffs_inv == inv) {
      ++stable_;
    } else {
      stable_ = 0;
    }
    passes_.push_back(p);
    if (on_pass_) {
      on_pass_(p);
    }
  }

  HaltReason KnuthBendix::run() {
    stable_ = 0;
    drain();
    while (true) {
      if (over_budget_) {
        tidy();
        end_pass();
        return HaltReason::budget;
      }
      if (next_ >= rules_.num_ids()) {
        if (tidy()) {
          continue;
        }
        if (!deferred_.empty()) {
          end_pass();
          if (stable_ >= cfg_.stabilization_window) {
            return HaltReason::stabilized;
          }
          if (max_len_ + 2 > cfg_.max_word_len_cap) {
            return HaltReason::budget;
          }
          max_len_ += 2;
          for (auto& e : deferred_) {
            pending_.push_back(std::move(e));
          }
          deferred_.clear();
          drain();
          continue;
        }
        end_pass();
        return discarded_ == 0 ? HaltReason::confluent : HaltReason::budget;
      }
      if (rules_.alive(next_)) {
        overlaps_of(next_);
      }
      ++next_;
      if (added_since_tidy_ >= cfg_.tidy_interval) {
        tidy();
        end_pass();
        if (stable_ >= cfg_.stabilization_window) {
          return HaltReason::stabilized;
        }
      }
    }
  }

  KbResult kb_complete(Presentation const& p, KbConfig const& cfg) {
    KnuthBendix kb(p, cfg);
    KbResult    r;
    r.halt      = kb.run();
    r.rules     = kb.rules();
    r.diffs     = kb.diffs();
    r.passes    = kb.passes();
    r.discarded = kb.discarded();
    return r;
  }

}  // namespace autostruct
