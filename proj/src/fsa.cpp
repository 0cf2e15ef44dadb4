#include "autostruct/fsa.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include <fmt/format.h>

#include "autostruct/detail/subset.hpp"
#include "autostruct/error.hpp"

namespace autostruct {

  namespace {
    std::size_t symbols_for(Alphabet const& a, AlphabetKind k) {
      auto n = a.size();
      return k == AlphabetKind::single ? n : (n + 1) * (n + 1) - 1;
    }

    void require_same(Fsa const& f, Fsa const& g, char const* what) {
      if (!f.same_alphabet(g)) {
        throw AlphabetMismatch(fmt::format("{}: alphabet mismatch", what));
      }
    }

    // Pairs (p, q) of states of two automata, 0 meaning the implicit sink.
    struct PairHash {
      std::size_t operator()(std::uint64_t x) const noexcept {
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
        return static_cast<std::size_t>(x);
      }
    };

    std::uint64_t key(state_type p, state_type q) {
      return (static_cast<std::uint64_t>(p) << 32) | q;
    }
  }  // namespace

  ////////////////////////////////////////////////////////////////////////
  // Fsa
  ////////////////////////////////////////////////////////////////////////

  Fsa::Fsa(Alphabet alphabet, AlphabetKind kind, state_type num_states)
      : alphabet_(std::move(alphabet)),
        kind_(kind),
        num_symbols_(symbols_for(alphabet_, kind)) {
    resize(num_states);
  }

  void Fsa::resize(state_type n) {
    num_states_ = n;
    table_.resize((static_cast<std::size_t>(n) + 1) * num_symbols_, kNoState);
    accepting_.resize(static_cast<std::size_t>(n) + 1, 0);
    if (!labels_.empty()) {
      labels_.resize(static_cast<std::size_t>(n) + 1, 0);
    }
  }

  state_type Fsa::add_state() {
    resize(num_states_ + 1);
    return num_states_;
  }

  void Fsa::set_all_accepting() noexcept {
    std::fill(accepting_.begin() + 1, accepting_.end(), 1);
  }

  bool Fsa::all_accepting() const noexcept {
    return std::all_of(
        accepting_.begin() + 1, accepting_.end(), [](auto x) { return x != 0; });
  }

  void Fsa::set_label_kind(LabelKind k) {
    label_kind_ = k;
    if (k == LabelKind::none) {
      labels_.clear();
      label_table_.assign(1, word_type{});
    }
  }

  void Fsa::set_label(state_type s, word_type label) {
    if (label_kind_ == LabelKind::none) {
      throw Error("Fsa::set_label: automaton has no label kind");
    }
    if (label_kind_ == LabelKind::letter_set) {
      std::sort(label.begin(), label.end());
      label.erase(std::unique(label.begin(), label.end()), label.end());
    }
    if (labels_.empty()) {
      labels_.assign(static_cast<std::size_t>(num_states_) + 1, 0);
    }
    auto it = std::find(label_table_.begin() + 1, label_table_.end(), label);
    if (it == label_table_.end()) {
      label_table_.push_back(std::move(label));
      labels_[s] = static_cast<std::uint32_t>(label_table_.size() - 1);
    } else {
      labels_[s] = static_cast<std::uint32_t>(it - label_table_.begin());
    }
  }

  void Fsa::clear_label(state_type s) {
    if (!labels_.empty()) {
      labels_[s] = 0;
    }
  }

  bool Fsa::label_contains(state_type s, letter_type x) const noexcept {
    if (label_kind_ != LabelKind::letter_set) {
      return false;
    }
    auto const& l = label(s);
    return std::binary_search(l.begin(), l.end(), x);
  }

  std::size_t Fsa::num_transitions() const noexcept {
    return static_cast<std::size_t>(std::count_if(
        table_.begin() + static_cast<std::ptrdiff_t>(num_symbols_),
        table_.end(),
        [](state_type t) { return t != kNoState; }));
  }

  state_type Fsa::run(word_type const& w, state_type from) const noexcept {
    state_type s = from;
    for (auto x : w) {
      if (s == kNoState || x >= num_symbols_) {
        return kNoState;
      }
      s = target(s, x);
    }
    return s;
  }

  bool Fsa::accepts(word_type const& w) const noexcept {
    if (kind_ != AlphabetKind::single || num_states_ == 0) {
      return false;
    }
    auto s = run(w);
    return s != kNoState && accepting(s);
  }

  std::vector<symbol_type> Fsa::pair_symbols(word_type const& u,
                                             word_type const& v) const {
    std::vector<symbol_type> out;
    auto                     n = std::max(u.size(), v.size());
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      letter_type x = i < u.size() ? u[i] : pad();
      letter_type y = i < v.size() ? v[i] : pad();
      out.push_back(symbol(x, y));
    }
    return out;
  }

  state_type Fsa::run_pair(word_type const& u,
                           word_type const& v) const noexcept {
    if (num_states_ == 0) {
      return kNoState;
    }
    state_type s = 1;
    auto       n = std::max(u.size(), v.size());
    for (std::size_t i = 0; i < n && s != kNoState; ++i) {
      letter_type x = i < u.size() ? u[i] : pad();
      letter_type y = i < v.size() ? v[i] : pad();
      if (x > pad() || y > pad()) {
        return kNoState;
      }
      s = target(s, symbol(x, y));
    }
    return s;
  }

  bool Fsa::accepts_pair(word_type const& u, word_type const& v) const noexcept {
    if (kind_ != AlphabetKind::pair) {
      return false;
    }
    auto s = run_pair(u, v);
    return s != kNoState && accepting(s);
  }

  ////////////////////////////////////////////////////////////////////////
  // Nfa
  ////////////////////////////////////////////////////////////////////////

  Nfa::Nfa(Alphabet alphabet, AlphabetKind kind, state_type num_states)
      : alphabet_(std::move(alphabet)),
        kind_(kind),
        num_symbols_(symbols_for(alphabet_, kind)),
        out_(static_cast<std::size_t>(num_states) + 1),
        initial_(static_cast<std::size_t>(num_states) + 1, 0),
        accepting_(static_cast<std::size_t>(num_states) + 1, 0) {}

  state_type Nfa::add_state() {
    out_.emplace_back();
    initial_.push_back(0);
    accepting_.push_back(0);
    return num_states();
  }

  void Nfa::add_transition(state_type s, symbol_type a, state_type t) {
    if (s == 0 || t == 0 || s > num_states() || t > num_states()
        || a >= num_symbols_) {
      throw Error("Nfa::add_transition: state or symbol out of range");
    }
    out_[s].push_back({a, t});
  }

  void Nfa::set_initial(state_type s, bool v) {
    initial_.at(s) = v ? 1 : 0;
  }

  void Nfa::set_accepting(state_type s, bool v) {
    accepting_.at(s) = v ? 1 : 0;
  }

  bool Nfa::accepts(std::vector<symbol_type> const& symbols) const {
    std::vector<std::uint8_t> cur(initial_), next(cur.size());
    for (auto a : symbols) {
      std::fill(next.begin(), next.end(), 0);
      for (state_type s = 1; s < cur.size(); ++s) {
        if (cur[s]) {
          for (auto const& e : out_[s]) {
            if (e.symbol == a) {
              next[e.target] = 1;
            }
          }
        }
      }
      cur.swap(next);
    }
    for (state_type s = 1; s < cur.size(); ++s) {
      if (cur[s] && accepting_[s]) {
        return true;
      }
    }
    return false;
  }

  ////////////////////////////////////////////////////////////////////////
  // Structural operations
  ////////////////////////////////////////////////////////////////////////

  namespace {
    // Breadth-first renumbering restricted to states with keep[s] set.
    Fsa renumber(Fsa const& f, std::vector<std::uint8_t> const& keep) {
      Fsa out(f.alphabet(), f.kind(), 0);
      out.set_label_kind(f.label_kind());
      if (f.num_states() == 0 || !keep[1]) {
        return out;
      }
      std::vector<state_type> id(f.num_states() + 1, kNoState);
      std::vector<state_type> order{0};
      id[1] = 1;
      order.push_back(1);
      for (std::size_t i = 1; i < order.size(); ++i) {
        auto const* row = f.row(order[i]);
        for (symbol_type a = 0; a < f.num_symbols(); ++a) {
          auto t = row[a];
          if (t != kNoState && keep[t] && id[t] == kNoState) {
            id[t] = static_cast<state_type>(order.size());
            order.push_back(t);
          }
        }
      }
      out.resize(static_cast<state_type>(order.size() - 1));
      for (state_type s = 1; s < order.size(); ++s) {
        auto        old = order[s];
        auto const* row = f.row(old);
        for (symbol_type a = 0; a < f.num_symbols(); ++a) {
          auto t = row[a];
          if (t != kNoState && keep[t]) {
            out.set_target(s, a, id[t]);
          }
        }
        out.set_accepting(s, f.accepting(old));
        if (f.has_label(old)) {
          out.set_label(s, f.label(old));
        }
      }
      return out;
    }
  }  // namespace

  Fsa canonical_renumber(Fsa const& f) {
    std::vector<std::uint8_t> keep(f.num_states() + 1, 1);
    return renumber(f, keep);
  }

  Fsa trim(Fsa const& f) {
    auto const n = f.num_states();
    if (n == 0) {
      return renumber(f, {});
    }
    std::vector<std::uint8_t> reach(n + 1, 0);
    std::vector<state_type>   stack{1};
    reach[1] = 1;
    while (!stack.empty()) {
      auto s = stack.back();
      stack.pop_back();
      auto const* row = f.row(s);
      for (symbol_type a = 0; a < f.num_symbols(); ++a) {
        auto t = row[a];
        if (t != kNoState && !reach[t]) {
          reach[t] = 1;
          stack.push_back(t);
        }
      }
    }
    // reverse adjacency of the reachable part
    std::vector<std::uint32_t> start(n + 2, 0);
    for (state_type s = 1; s <= n; ++s) {
      if (!reach[s]) {
        continue;
      }
      auto const* row = f.row(s);
      for (symbol_type a = 0; a < f.num_symbols(); ++a) {
        if (row[a] != kNoState) {
          ++start[row[a] + 1];
        }
      }
    }
    for (state_type s = 1; s <= n + 1; ++s) {
      start[s] += start[s - 1];
    }
    std::vector<state_type> pred(start[n + 1]);
    auto                    fill = start;
    for (state_type s = 1; s <= n; ++s) {
      if (!reach[s]) {
        continue;
      }
      auto const* row = f.row(s);
      for (symbol_type a = 0; a < f.num_symbols(); ++a) {
        if (row[a] != kNoState) {
          pred[fill[row[a]]++] = s;
        }
      }
    }
    std::vector<std::uint8_t> keep(n + 1, 0);
    for (state_type s = 1; s <= n; ++s) {
      if (reach[s] && f.accepting(s)) {
        keep[s] = 1;
        stack.push_back(s);
      }
    }
    while (!stack.empty()) {
      auto s = stack.back();
      stack.pop_back();
      for (auto i = start[s]; i < start[s + 1]; ++i) {
        auto p = pred[i];
        if (!keep[p]) {
          keep[p] = 1;
          stack.push_back(p);
        }
      }
    }
    return renumber(f, keep);
  }

  Fsa determinize(Nfa const& n, std::size_t max_states) {
    std::vector<std::uint32_t> init;
    for (state_type s = 1; s <= n.num_states(); ++s) {
      if (n.initial(s)) {
        init.push_back(s);
      }
    }
    return detail::subset_construct(
        n.alphabet(),
        n.kind(),
        std::move(init),
        [&n](std::uint32_t s, auto&& emit) {
          for (auto const& e : n.edges(s)) {
            emit(e.symbol, e.target);
          }
        },
        [&n](std::vector<std::uint32_t> const& set) {
          return std::any_of(set.begin(), set.end(), [&n](auto s) {
            return n.accepting(s);
          });
        },
        [](auto const&) { return false; },
        max_states);
  }

  namespace {
    enum class Combine { both, left_only, differ };

    // Breadth-first product of two deterministic automata over the same
    // alphabet; 0 stands for the sink of either side. Only pairs that can
    // still satisfy `mode` are expanded.
    Fsa product(Fsa const& f, Fsa const& g, Combine mode, std::size_t max_states) {
      Fsa out(f.alphabet(), f.kind(), 0);
      auto accept = [&](state_type p, state_type q) {
        bool fp = p != kNoState && f.accepting(p);
        bool gq = q != kNoState && g.accepting(q);
        switch (mode) {
          case Combine::both:
            return fp && gq;
          case Combine::left_only:
            return fp && !gq;
          default:
            return fp != gq;
        }
      };
      auto viable = [&](state_type p, state_type q) {
        switch (mode) {
          case Combine::both:
            return p != kNoState && q != kNoState;
          case Combine::left_only:
            return p != kNoState;
          default:
            return p != kNoState || q != kNoState;
        }
      };
      state_type fi = f.initial(), gi = g.initial();
      if (!viable(fi, gi)) {
        return out;
      }
      std::unordered_map<std::uint64_t, state_type, PairHash> index;
      std::vector<std::pair<state_type, state_type>>          pairs{{0, 0}};
      auto intern = [&](state_type p, state_type q) {
        auto [it, fresh] = index.emplace(key(p, q), 0);
        if (fresh) {
          if (pairs.size() > max_states) {
            throw BudgetExceeded(
                fmt::format("product construction exceeded {} states", max_states));
          }
          it->second = out.add_state();
          out.set_accepting(it->second, accept(p, q));
          pairs.emplace_back(p, q);
        }
        return it->second;
      };
      intern(fi, gi);
      for (state_type s = 1; s < pairs.size(); ++s) {
        auto [p, q] = pairs[s];
        for (symbol_type a = 0; a < f.num_symbols(); ++a) {
          state_type p2 = p == kNoState ? kNoState : f.target(p, a);
          state_type q2 = q == kNoState ? kNoState : g.target(q, a);
          if (viable(p2, q2)) {
            out.set_target(s, a, intern(p2, q2));
          }
        }
      }
      return out;
    }
  }  // namespace

  Fsa well_padded(Alphabet const& a) {
    Fsa         w(a, AlphabetKind::pair, 3);
    letter_type pad = w.pad();
    for (letter_type x = 0; x <= pad; ++x) {
      for (letter_type y = 0; y <= pad; ++y) {
        if (x == pad && y == pad) {
          continue;
        }
        auto sym = w.symbol(x, y);
        if (x != pad && y != pad) {
          w.set_target(1, sym, 1);
        } else if (x == pad) {
          w.set_target(1, sym, 2);
          w.set_target(2, sym, 2);
        } else {
          w.set_target(1, sym, 3);
          w.set_target(3, sym, 3);
        }
      }
    }
    w.set_all_accepting();
    return w;
  }

  Fsa complement(Fsa const& f, std::size_t max_states) {
    // complete with a sink and flip; the product below does both at once
    Fsa universe(f.alphabet(), f.kind(), 1);
    if (f.kind() == AlphabetKind::single) {
      for (symbol_type a = 0; a < universe.num_symbols(); ++a) {
        universe.set_target(1, a, 1);
      }
      universe.set_accepting(1, true);
    } else {
      universe = well_padded(f.alphabet());
    }
    return trim(product(universe, f, Combine::left_only, max_states));
  }

  Fsa intersect(Fsa const& f, Fsa const& g, std::size_t max_states) {
    require_same(f, g, "intersect");
    return trim(product(f, g, Combine::both, max_states));
  }

  std::optional<std::vector<symbol_type>> language_difference(Fsa const& f,
                                                              Fsa const& g) {
    require_same(f, g, "language_equal");
    struct Node {
      state_type  p, q;
      std::size_t parent;
      symbol_type via;
    };
    std::vector<Node>                                         nodes;
    std::unordered_map<std::uint64_t, std::size_t, PairHash> seen;
    auto push = [&](state_type p, state_type q, std::size_t parent, symbol_type via) {
      if (seen.emplace(key(p, q), nodes.size()).second) {
        nodes.push_back({p, q, parent, via});
      }
    };
    auto differs = [&](state_type p, state_type q) {
      bool fp = p != kNoState && f.accepting(p);
      bool gq = q != kNoState && g.accepting(q);
      return fp != gq;
    };
    push(f.initial(), g.initial(), 0, 0);
    if (f.initial() == kNoState && g.initial() == kNoState) {
      return std::nullopt;
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      auto [p, q, parent, via] = nodes[i];
      if (differs(p, q)) {
        std::vector<symbol_type> word;
        for (auto j = i; j != 0; j = nodes[j].parent) {
          word.push_back(nodes[j].via);
        }
        std::reverse(word.begin(), word.end());
        return word;
      }
      for (symbol_type a = 0; a < f.num_symbols(); ++a) {
        state_type p2 = p == kNoState ? kNoState : f.target(p, a);
        state_type q2 = q == kNoState ? kNoState : g.target(q, a);
        if (p2 != kNoState || q2 != kNoState) {
          push(p2, q2, i, a);
        }
      }
    }
    return std::nullopt;
  }

  bool language_equal(Fsa const& f, Fsa const& g) {
    return !language_difference(f, g).has_value();
  }

  Fsa exists_project(Fsa const& f, Side side, std::size_t max_states) {
    if (f.kind() != AlphabetKind::pair) {
      throw AlphabetMismatch("exists_project: needs a pair automaton");
    }
    auto const  n   = f.num_states();
    letter_type pad = f.pad();
    auto kept = [&](symbol_type a) {
      auto ps = f.unpair(a);
      return side == Side::first ? ps.left : ps.right;
    };
    // A state accepts after projection if accepting states are reachable by
    // symbols whose kept coordinate is padding.
    std::vector<std::uint8_t> closure(n + 1, 0);
    for (state_type s = 1; s <= n; ++s) {
      closure[s] = f.accepting(s);
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (state_type s = 1; s <= n; ++s) {
        if (closure[s]) {
          continue;
        }
        for (symbol_type a = 0; a < f.num_symbols(); ++a) {
          auto t = f.target(s, a);
          if (t != kNoState && closure[t] && kept(a) == pad) {
            closure[s] = 1;
            changed    = true;
            break;
          }
        }
      }
    }
    std::vector<std::uint32_t> init;
    if (n > 0) {
      init.push_back(1);
    }
    auto d = detail::subset_construct(
        f.alphabet(),
        AlphabetKind::single,
        std::move(init),
        [&](std::uint32_t s, auto&& emit) {
          auto const* row = f.row(s);
          for (symbol_type a = 0; a < f.num_symbols(); ++a) {
            if (row[a] != kNoState && kept(a) != pad) {
              emit(kept(a), row[a]);
            }
          }
        },
        [&](std::vector<std::uint32_t> const& set) {
          return std::any_of(
              set.begin(), set.end(), [&](auto s) { return closure[s] != 0; });
        },
        [](auto const&) { return false; },
        max_states);
    return minimize(d);
  }

  Fsa compose(Fsa const& f, Fsa const& g, std::size_t max_states) {
    require_same(f, g, "compose");
    if (f.kind() != AlphabetKind::pair) {
      throw AlphabetMismatch("compose: needs pair automata");
    }
    letter_type const pad = f.pad();
    // NFA element: (p, q, which of u, v, w have ended). Elements are
    // interned on the fly.
    enum : std::uint8_t { kU = 1, kV = 2, kW = 4 };
    struct Elem {
      state_type   p, q;
      std::uint8_t ended;
    };
    std::vector<Elem>                                          elems;
    std::unordered_map<std::uint64_t, std::uint32_t, PairHash> ids;
    auto intern = [&](state_type p, state_type q, std::uint8_t ended) {
      auto k = (key(p, q) << 3) | ended;
      auto [it, fresh] = ids.emplace(k, static_cast<std::uint32_t>(elems.size()));
      if (fresh) {
        elems.push_back({p, q, ended});
      }
      return it->second;
    };

    // acceptance once the outer words have ended: the middle word may still
    // continue, read as (pad, y) by f and (y, pad) by g
    std::unordered_map<std::uint64_t, bool, PairHash> tail_memo;
    auto tail_accepts = [&](state_type p, state_type q) {
      auto k  = key(p, q);
      auto it = tail_memo.find(k);
      if (it != tail_memo.end()) {
        return it->second;
      }
      std::vector<std::pair<state_type, state_type>>    todo{{p, q}};
      std::unordered_map<std::uint64_t, char, PairHash> seen{{k, 1}};
      bool                                              ok = false;
      for (std::size_t i = 0; i < todo.size(); ++i) {
        auto [a, b] = todo[i];
        if (f.accepting(a) && g.accepting(b)) {
          ok = true;
          break;
        }
        for (letter_type y = 0; y < pad; ++y) {
          auto a2 = f.target(a, f.symbol(pad, y));
          auto b2 = a2 == kNoState ? kNoState : g.target(b, g.symbol(y, pad));
          if (b2 != kNoState && seen.emplace(key(a2, b2), 1).second) {
            todo.emplace_back(a2, b2);
          }
        }
      }
      tail_memo.emplace(k, ok);
      return ok;
    };

    std::vector<std::uint32_t> init;
    if (f.num_states() > 0 && g.num_states() > 0) {
      init.push_back(intern(1, 1, 0));
    }
    auto d = detail::subset_construct(
        f.alphabet(),
        AlphabetKind::pair,
        std::move(init),
        [&](std::uint32_t e, auto&& emit) {
          Elem const cur = elems[e];
          // for each middle letter y, the f-moves (x, p') and g-moves (z, q')
          std::vector<std::pair<letter_type, state_type>> fx, gz;
          letter_type const x0 = (cur.ended & kU) ? pad : 0;
          letter_type const z0 = (cur.ended & kW) ? pad : 0;
          for (letter_type y = (cur.ended & kV) ? pad : 0; y <= pad; ++y) {
            fx.clear();
            gz.clear();
            for (letter_type x = x0; x <= pad; ++x) {
              state_type p2 = (x == pad && y == pad)
                                  ? cur.p
                                  : f.target(cur.p, f.symbol(x, y));
              if (p2 != kNoState) {
                fx.emplace_back(x, p2);
              }
            }
            if (fx.empty()) {
              continue;
            }
            for (letter_type z = z0; z <= pad; ++z) {
              state_type q2 = (y == pad && z == pad)
                                  ? cur.q
                                  : g.target(cur.q, g.symbol(y, z));
              if (q2 != kNoState) {
                gz.emplace_back(z, q2);
              }
            }
            for (auto [x, p2] : fx) {
              for (auto [z, q2] : gz) {
                if (x == pad && z == pad) {
                  continue;
                }
                std::uint8_t ended = cur.ended;
                ended |= x == pad ? kU : 0;
                ended |= y == pad ? kV : 0;
                ended |= z == pad ? kW : 0;
                emit(f.symbol(x, z), intern(p2, q2, ended));
              }
            }
          }
        },
        [&](std::vector<std::uint32_t> const& set) {
          for (auto e : set) {
            auto const& el = elems[e];
            if ((el.ended & kV) ? (f.accepting(el.p) && g.accepting(el.q))
                                : tail_accepts(el.p, el.q)) {
              return true;
            }
          }
          return false;
        },
        [](auto const&) { return false; },
        max_states);
    return minimize(d);
  }

  ////////////////////////////////////////////////////////////////////////
  // Counting and enumeration
  ////////////////////////////////////////////////////////////////////////

  Count language_count(Fsa const& input) {
    Fsa f = trim(input);
    auto const n = f.num_states();
    if (n == 0) {
      return big_int(0);
    }
    // iterative DFS; a back edge means a cycle on an accepting path
    std::vector<std::uint8_t> colour(n + 1, 0);
    std::vector<state_type>   post;
    std::vector<std::pair<state_type, symbol_type>> stack{{1, 0}};
    colour[1] = 1;
    while (!stack.empty()) {
      auto& [s, a] = stack.back();
      if (a == f.num_symbols()) {
        colour[s] = 2;
        post.push_back(s);
        stack.pop_back();
        continue;
      }
      auto t = f.target(s, a++);
      if (t == kNoState) {
        continue;
      }
      if (colour[t] == 1) {
        return Infinite{};
      }
      if (colour[t] == 0) {
        colour[t] = 1;
        stack.emplace_back(t, 0);
      }
    }
    std::vector<big_int> count(n + 1);
    for (auto s : post) {
      big_int c = f.accepting(s) ? 1 : 0;
      for (symbol_type a = 0; a < f.num_symbols(); ++a) {
        auto t = f.target(s, a);
        if (t != kNoState) {
          c += count[t];
        }
      }
      count[s] = std::move(c);
    }
    return count[1];
  }

  std::vector<big_int> count_by_length(Fsa const& input, std::size_t max_len) {
    Fsa                  f = trim(input);
    std::vector<big_int> out(max_len + 1);
    if (f.num_states() == 0) {
      return out;
    }
    std::vector<big_int> cur(f.num_states() + 1), next(f.num_states() + 1);
    cur[1] = 1;
    for (std::size_t len = 0; len <= max_len; ++len) {
      for (state_type s = 1; s <= f.num_states(); ++s) {
        if (f.accepting(s)) {
          out[len] += cur[s];
        }
      }
      if (len == max_len) {
        break;
      }
      for (auto& x : next) {
        x = 0;
      }
      for (state_type s = 1; s <= f.num_states(); ++s) {
        if (cur[s] == 0) {
          continue;
        }
        for (symbol_type a = 0; a < f.num_symbols(); ++a) {
          auto t = f.target(s, a);
          if (t != kNoState) {
            next[t] += cur[s];
          }
        }
      }
      cur.swap(next);
    }
    return out;
  }

  Trace trace(Fsa const& f, word_type const& w) {
    Trace tr;
    if (f.num_states() == 0) {
      tr.failed_at = 0;
      return tr;
    }
    state_type s = 1;
    tr.states.push_back(s);
    for (std::size_t i = 0; i < w.size(); ++i) {
      auto t = w[i] < f.num_symbols() ? f.target(s, w[i]) : kNoState;
      if (t == kNoState) {
        tr.failed_at = i;
        return tr;
      }
      s = t;
      tr.states.push_back(s);
    }
    return tr;
  }

  namespace {
    template <typename Emit>
    void enumerate_symbols(Fsa const& input, std::size_t max_len, Emit&& emit) {
      Fsa f = trim(input);
      if (f.num_states() == 0) {
        return;
      }
      std::vector<std::pair<std::vector<symbol_type>, state_type>> layer{{{}, 1}};
      for (std::size_t len = 0; len <= max_len && !layer.empty(); ++len) {
        for (auto const& [w, s] : layer) {
          if (f.accepting(s)) {
            emit(w);
          }
        }
        if (len == max_len) {
          break;
        }
        decltype(layer) next;
        for (auto const& [w, s] : layer) {
          for (symbol_type a = 0; a < f.num_symbols(); ++a) {
            auto t = f.target(s, a);
            if (t != kNoState) {
              auto w2 = w;
              w2.push_back(a);
              next.emplace_back(std::move(w2), t);
            }
          }
        }
        layer.swap(next);
      }
    }
  }  // namespace

  std::vector<word_type> enumerate(Fsa const& f, std::size_t max_len) {
    if (f.kind() != AlphabetKind::single) {
      throw AlphabetMismatch("enumerate: needs a single-alphabet automaton");
    }
    std::vector<word_type> out;
    enumerate_symbols(f, max_len, [&](std::vector<symbol_type> const& w) {
      out.emplace_back(w.begin(), w.end());
    });
    return out;
  }

  std::vector<std::pair<word_type, word_type>> enumerate_pairs(
      Fsa const&  f,
      std::size_t max_len) {
    if (f.kind() != AlphabetKind::pair) {
      throw AlphabetMismatch("enumerate_pairs: needs a pair automaton");
    }
    std::vector<std::pair<word_type, word_type>> out;
    enumerate_symbols(f, max_len, [&](std::vector<symbol_type> const& w) {
      word_type u, v;
      for (auto a : w) {
        auto ps = f.unpair(a);
        if (ps.left != f.pad()) {
          u.push_back(ps.left);
        }
        if (ps.right != f.pad()) {
          v.push_back(ps.right);
        }
      }
      out.emplace_back(std::move(u), std::move(v));
    });
    return out;
  }

  Fsa label_component(Fsa const& f, letter_type x) {
    Fsa out = f;
    for (state_type s = 1; s <= out.num_states(); ++s) {
      out.set_accepting(s, f.accepting(s) && f.label_contains(s, x));
    }
    out.set_label_kind(LabelKind::none);
    return trim(out);
  }

  bool padding_well_formed(Fsa const& f) {
    if (f.kind() != AlphabetKind::pair) {
      return true;
    }
    return trim(product(f, well_padded(f.alphabet()), Combine::left_only,
                        kDefaultMaxStates))
               .num_states()
           == 0;
  }

}  // namespace autostruct
