#include "autostruct/autstruct.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include <fmt/format.h>

#include "autostruct/detail/subset.hpp"
#include "autostruct/error.hpp"
#include "autostruct/minimize.hpp"

namespace autostruct {

  Reducer rule_reducer(RuleSet const& rs) {
    return [&rs](word_type& w) { rs.rewrite_in_place(w); };
  }

  ////////////////////////////////////////////////////////////////////////
  // Difference machines
  ////////////////////////////////////////////////////////////////////////

  state_type WordDifferenceMachine::state_of(word_type const& d) const {
    auto it = std::find(diffs.begin(), diffs.end(), d);
    return it == diffs.end() ? kNoState : static_cast<state_type>(it - diffs.begin() + 1);
  }

  WordDifferenceMachine build_wd_machine(WordDifferenceSet const& wd,
                                         Reducer const&           reduce,
                                         bool                     closure) {
    auto const& a   = wd.alphabet();
    auto const  n   = wd.size();
    auto const  pad = static_cast<letter_type>(a.size());

    WordDifferenceMachine dm;
    dm.diffs = wd.diffs();
    dm.fsa   = Fsa(a, AlphabetKind::pair, static_cast<state_type>(n));
    dm.fsa.set_label_kind(LabelKind::word);
    for (std::size_t i = 0; i < n; ++i) {
      dm.fsa.set_label(static_cast<state_type>(i + 1), wd[i]);
    }
    dm.fsa.set_accepting(1, true);

    for (auto const& [k, t] : wd.transitions()) {
      if (k.first >= n || t >= n || k.second >= dm.fsa.num_symbols()) {
        throw Error(fmt::format("difference transition {} -> {} leaves the set of {}",
                                k.first, t, n));
      }
      dm.fsa.set_target(k.first + 1, k.second, t + 1);
    }
    if (!closure) {
      return dm;
    }
    word_type w;
    for (std::size_t i = 0; i < n; ++i) {
      auto const s = static_cast<state_type>(i + 1);
      for (letter_type x = 0; x <= pad; ++x) {
        for (letter_type y = 0; y <= pad; ++y) {
          if (x == pad && y == pad) {
            continue;
          }
          auto sym = dm.fsa.symbol(x, y);
          if (dm.fsa.target(s, sym) != kNoState) {
            continue;
          }
          w.clear();
          if (x != pad) {
            w.push_back(a.inverse(x));
          }
          w.insert(w.end(), wd[i].begin(), wd[i].end());
          if (y != pad) {
            w.push_back(y);
          }
          reduce(w);
          auto t = wd.find(w);
          if (t >= 0) {
            dm.fsa.set_target(s, sym, static_cast<state_type>(t + 1));
          }
        }
      }
    }
    return dm;
  }

  WordDifferenceMachine wd_machine_from_fsa(Fsa f) {
    if (f.kind() != AlphabetKind::pair || f.label_kind() != LabelKind::word
        || f.num_states() == 0) {
      throw ParseError("a difference machine is a word-labelled pair automaton");
    }
    WordDifferenceMachine dm;
    for (state_type s = 1; s <= f.num_states(); ++s) {
      dm.diffs.push_back(f.label(s));
    }
    if (!dm.diffs[0].empty()) {
      throw ParseError("state 1 of a difference machine must be the identity");
    }
    dm.fsa = std::move(f);
    return dm;
  }

  WordDifferenceSet difference_set(WordDifferenceMachine const& dm) {
    WordDifferenceSet wd(dm.fsa.alphabet());
    for (auto const& d : dm.diffs) {
      wd.add(d);
    }
    for (state_type s = 1; s <= dm.fsa.num_states(); ++s) {
      auto const* row = dm.fsa.row(s);
      for (symbol_type a = 0; a < dm.fsa.num_symbols(); ++a) {
        if (row[a] != kNoState) {
          wd.record(static_cast<std::uint32_t>(wd.find(dm.diffs[s - 1])),
                    a,
                    static_cast<std::uint32_t>(wd.find(dm.diffs[row[a] - 1])));
        }
      }
    }
    return wd;
  }

  ////////////////////////////////////////////////////////////////////////
  // Word acceptor
  ////////////////////////////////////////////////////////////////////////

  namespace {
    // Comparison of the guessed word v with the tested word w so far.
    enum Flag : std::uint32_t { kEq = 0, kVLess = 1, kVGreater = 2, kVEnded = 3 };

    struct Edge {
      letter_type x;
      letter_type y;
      state_type  t;
    };

    std::vector<std::vector<Edge>> edges_of(Fsa const& f) {
      std::vector<std::vector<Edge>> out(f.num_states() + 1);
      for (state_type s = 1; s <= f.num_states(); ++s) {
        auto const* row = f.row(s);
        for (symbol_type a = 0; a < f.num_symbols(); ++a) {
          if (row[a] != kNoState) {
            auto p = f.unpair(a);
            out[s].push_back({p.left, p.right, row[a]});
          }
        }
      }
      return out;
    }

    std::uint32_t next_flag(std::uint32_t flag, letter_type x, letter_type y, letter_type pad) {
      if (y == pad) {
        return kVEnded;
      }
      if (flag != kEq) {
        return flag;
      }
      return y < x ? kVLess : (y > x ? kVGreater : kEq);
    }

    constexpr std::uint32_t elem(state_type d, std::uint32_t flag) {
      return (d << 2) | flag;
    }

    // The identity reached with v shorter or lexicographically smaller.
    bool witnesses_smaller(std::uint32_t e) {
      return e == elem(1, kVLess) || e == elem(1, kVEnded);
    }
  }  // namespace

  Fsa build_word_acceptor(WordDifferenceMachine const& dm, BuildOptions const& opts) {
    auto const& f     = dm.fsa;
    auto const  pad   = f.pad();
    auto const  edges = edges_of(f);
    auto        successors = [&](std::uint32_t e, auto&& emit) {
      state_type d    = e >> 2;
      auto       flag = e & 3;
      for (auto const& ed : edges[d]) {
        if (ed.x == pad) {
          continue;
        }
        if (flag == kVEnded && ed.y != pad) {
          continue;
        }
        auto nf = next_flag(flag, ed.x, ed.y, pad);
        if (ed.t == 1 && nf == kVGreater) {
          continue;  // subsumed by the diagonal run
        }
        emit(ed.x, elem(ed.t, nf));
      }
    };
    auto reject = [](std::vector<std::uint32_t> const& set) {
      return std::any_of(set.begin(), set.end(), witnesses_smaller);
    };
    auto W = detail::subset_construct(
        f.alphabet(), AlphabetKind::single, {elem(1, kEq)}, successors,
        [](auto const&) { return true; }, reject, opts.max_states);
    return minimize(W, opts.minimize);
  }

  ////////////////////////////////////////////////////////////////////////
  // Reduction through the difference machine
  ////////////////////////////////////////////////////////////////////////

  DiffReducer::DiffReducer(WordDifferenceMachine const& dm, Fsa const& W)
      : dm_(&dm), W_(&W), stride_(dm.fsa.alphabet().size() + 1) {
    auto const& f = dm.fsa;
    by_first_.resize((f.num_states() + 1) * stride_);
    for (state_type s = 1; s <= f.num_states(); ++s) {
      auto const* row = f.row(s);
      for (symbol_type a = 0; a < f.num_symbols(); ++a) {
        if (row[a] != kNoState) {
          auto p = f.unpair(a);
          by_first_[s * stride_ + p.left].emplace_back(p.right, row[a]);
        }
      }
    }
  }

  std::optional<word_type> DiffReducer::smaller_equal(word_type const& p) const {
    auto const pad = dm_->fsa.pad();
    struct Node {
      std::uint32_t e;
      std::uint32_t parent;
      letter_type   y;
    };
    std::vector<std::vector<Node>> layers(p.size() + 1);
    layers[0].push_back({elem(1, kEq), 0, 0});
    std::unordered_map<std::uint32_t, std::uint32_t> seen;
    for (std::size_t i = 0; i < p.size(); ++i) {
      seen.clear();
      auto const x = p[i];
      for (std::uint32_t k = 0; k < layers[i].size(); ++k) {
        auto const e    = layers[i][k].e;
        auto const d    = e >> 2;
        auto const flag = e & 3;
        for (auto const& [y, t] : by_first_[d * stride_ + x]) {
          if (flag == kVEnded && y != pad) {
            continue;
          }
          auto nf = next_flag(flag, x, y, pad);
          if (t == 1 && nf == kVGreater) {
            continue;
          }
          auto ne = elem(t, nf);
          if (seen.emplace(ne, 0).second) {
            layers[i + 1].push_back({ne, k, y});
          }
        }
      }
      if (layers[i + 1].empty()) {
        return std::nullopt;
      }
    }
    auto const& last = layers[p.size()];
    auto        pick = std::find_if(last.begin(), last.end(), [](Node const& nd) {
      return nd.e == elem(1, kVEnded);
    });
    if (pick == last.end()) {
      pick = std::find_if(last.begin(), last.end(), [](Node const& nd) {
        return nd.e == elem(1, kVLess);
      });
    }
    if (pick == last.end()) {
      return std::nullopt;
    }
    word_type     v;
    std::uint32_t k = static_cast<std::uint32_t>(pick - last.begin());
    for (std::size_t i = p.size(); i > 0; --i) {
      auto const& nd = layers[i][k];
      if (nd.y != pad) {
        v.push_back(nd.y);
      }
      k = nd.parent;
    }
    std::reverse(v.begin(), v.end());
    return v;
  }

  word_type DiffReducer::reduce(word_type w) const {
    while (true) {
      auto tr = trace(*W_, w);
      if (!tr.failed_at) {
        return w;
      }
      auto const k = *tr.failed_at;
      word_type  p(w.begin(), w.begin() + k + 1);
      auto       v = smaller_equal(p);
      if (!v) {
        throw Error("no smaller equal word for a rejected prefix; W and the "
                    "difference machine do not belong together");
      }
      v->insert(v->end(), w.begin() + k + 1, w.end());
      w = std::move(*v);
    }
  }

  ////////////////////////////////////////////////////////////////////////
  // Multiplier
  ////////////////////////////////////////////////////////////////////////

  namespace {
    struct TripleKey {
      state_type su, sv, d;
      bool       operator==(TripleKey const&) const = default;
    };

    struct TripleHash {
      std::size_t operator()(TripleKey const& k) const noexcept {
        std::uint64_t h = k.su;
        h               = h * 0x9E3779B97F4A7C15ULL + k.sv;
        h               = h * 0x9E3779B97F4A7C15ULL + k.d;
        return static_cast<std::size_t>(h ^ (h >> 31));
      }
    };

    // Normal forms of the generators under W.
    std::vector<word_type> generator_forms(WordDifferenceMachine const& dm, Fsa const& W) {
      DiffReducer            red(dm, W);
      std::vector<word_type> out;
      for (letter_type g = 0; g < W.alphabet().size(); ++g) {
        out.push_back(red.reduce({g}));
      }
      return out;
    }
  }  // namespace

  Multiplier build_multiplier(WordDifferenceMachine const& dm,
                              Fsa const&                   W,
                              BuildOptions const&          opts) {
    if (!(dm.fsa.alphabet() == W.alphabet())) {
      throw AlphabetMismatch("build_multiplier: machine and acceptor alphabets differ");
    }
    auto const& a     = W.alphabet();
    auto const  pad   = dm.fsa.pad();
    auto const  edges = edges_of(dm.fsa);
    auto const  forms = generator_forms(dm, W);

    // label id per difference state
    std::vector<word_type>     label_table{word_type{}};
    std::vector<std::uint32_t> label_of(dm.fsa.num_states() + 1, 0);
    for (state_type s = 1; s <= dm.fsa.num_states(); ++s) {
      word_type l;
      for (letter_type g = 0; g < a.size(); ++g) {
        if (forms[g] == dm.diffs[s - 1]) {
          l.push_back(g);
        }
      }
      if (s == 1) {
        l.push_back(kIdentityMark);
      }
      if (l.empty()) {
        continue;
      }
      auto it = std::find(label_table.begin() + 1, label_table.end(), l);
      if (it == label_table.end()) {
        label_table.push_back(l);
        it = label_table.end() - 1;
      }
      label_of[s] = static_cast<std::uint32_t>(it - label_table.begin());
    }

    Multiplier  M;
    TableSpool  spool(a, AlphabetKind::pair, opts.minimize);
    std::vector<TripleKey> states{{0, 0, 0}};
    std::unordered_map<TripleKey, state_type, TripleHash> index;
    auto intern = [&](TripleKey k) -> state_type {
      auto [it, fresh] = index.emplace(k, static_cast<state_type>(states.size()));
      if (fresh) {
        if (states.size() > opts.max_states) {
          throw BudgetExceeded(fmt::format("multiplier exceeded {} states", opts.max_states));
        }
        states.push_back(k);
        spool.add_state(label_of[k.d] != 0, label_of[k.d]);
      }
      return it->second;
    };
    if (W.num_states() == 0) {
      M.fsa = Fsa(a, AlphabetKind::pair, 0);
      return M;
    }
    intern({1, 1, 1});
    std::vector<TableSpool::Edge> row;
    auto const                    n1 = static_cast<symbol_type>(a.size() + 1);
    for (state_type cur = 1; cur < states.size(); ++cur) {
      row.clear();
      auto const k = states[cur];
      for (auto const& ed : edges[k.d]) {
        state_type su = 0, sv = 0;
        if (ed.x == pad) {
          if (k.su != 0 && !W.accepting(k.su)) {
            continue;
          }
        } else {
          if (k.su == 0 || (su = W.target(k.su, ed.x)) == kNoState) {
            continue;
          }
        }
        if (ed.y == pad) {
          if (k.sv != 0 && !W.accepting(k.sv)) {
            continue;
          }
        } else {
          if (k.sv == 0 || (sv = W.target(k.sv, ed.y)) == kNoState) {
            continue;
          }
        }
        row.emplace_back(ed.x * n1 + ed.y, intern({su, sv, ed.t}));
      }
      spool.append_row(row);
    }
    M.raw_states = spool.num_states();
    M.fsa        = spool.minimize(LabelKind::letter_set, label_table);
    return M;
  }

  ////////////////////////////////////////////////////////////////////////
  // Partial correctness
  ////////////////////////////////////////////////////////////////////////

  namespace {
    // Shortlex-least words u accepted by W with no (u, v) accepted by C,
    // found by a breadth-first search over (W state, set of C states) that
    // stops after \p limit of them. Uncovered nodes are not expanded. Sets
    // are kept in one flat pool.
    std::vector<word_type> least_uncovered(Fsa const& W, Fsa const& C, std::size_t limit) {
      std::vector<word_type> found;
      if (W.num_states() == 0 || limit == 0) {
        return found;
      }
      auto const  n   = C.num_states();
      auto const  pad = C.pad();
      auto const  nl  = W.alphabet().size();
      // live: can still reach acceptance; done: acceptance via (pad, y) only
      std::vector<std::uint8_t> live(n + 1, 0), done(n + 1, 0);
      std::vector<std::vector<state_type>> preds(n + 1);
      std::vector<state_type>              stack;
      for (state_type s = 1; s <= n; ++s) {
        for (symbol_type a = 0; a < C.num_symbols(); ++a) {
          if (auto t = C.target(s, a); t != kNoState) {
            preds[t].push_back(s);
          }
        }
        if (C.accepting(s)) {
          live[s] = done[s] = 1;
          stack.push_back(s);
        }
      }
      while (!stack.empty()) {
        auto t = stack.back();
        stack.pop_back();
        for (auto s : preds[t]) {
          if (!live[s]) {
            live[s] = 1;
            stack.push_back(s);
          }
        }
      }
      preds = {};
      for (bool changed = true; changed;) {
        changed = false;
        for (state_type s = 1; s <= n; ++s) {
          if (done[s] || !live[s]) {
            continue;
          }
          for (letter_type y = 0; y < nl; ++y) {
            auto t = C.target(s, C.symbol(pad, y));
            if (t != kNoState && done[t]) {
              done[s] = changed = 1;
              break;
            }
          }
        }
      }

      std::vector<std::uint32_t>                       pool;
      std::vector<std::uint64_t>                       offset{0};
      std::unordered_multimap<std::uint64_t, std::uint32_t> by_hash;
      auto intern = [&](std::vector<std::uint32_t>& set) -> std::uint32_t {
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
        auto h = detail::SetHash{}(set);
        for (auto [it, e] = by_hash.equal_range(h); it != e; ++it) {
          auto id = it->second;
          if (std::equal(set.begin(), set.end(), pool.begin() + offset[id],
                         pool.begin() + offset[id + 1])) {
            return id;
          }
        }
        auto id = static_cast<std::uint32_t>(offset.size() - 1);
        pool.insert(pool.end(), set.begin(), set.end());
        offset.push_back(pool.size());
        by_hash.emplace(h, id);
        return id;
      };

      struct Node {
        state_type    w;
        std::uint32_t set;
        std::uint32_t parent;
        letter_type   x;
      };
      std::vector<std::uint32_t> scratch;
      if (n > 0 && live[1]) {
        scratch.push_back(1);
      }
      std::vector<Node>                                nodes{{1, intern(scratch), 0, 0}};
      std::unordered_map<std::uint64_t, std::uint32_t> seen;
      auto key = [](state_type w, std::uint32_t set) {
        return (static_cast<std::uint64_t>(w) << 32) | set;
      };
      seen.emplace(key(1, nodes[0].set), 0);
      for (std::uint32_t i = 0; i < nodes.size(); ++i) {
        auto const nd      = nodes[i];
        auto const b       = pool.begin() + offset[nd.set];
        auto const e       = pool.begin() + offset[nd.set + 1];
        bool const covered = std::any_of(b, e, [&](auto s) { return done[s] != 0; });
        if (W.accepting(nd.w) && !covered) {
          word_type u;
          for (auto j = i; j != 0; j = nodes[j].parent) {
            u.push_back(nodes[j].x);
          }
          std::reverse(u.begin(), u.end());
          found.push_back(std::move(u));
          if (found.size() == limit) {
            break;
          }
          continue;
        }
        for (letter_type x = 0; x < nl; ++x) {
          auto tw = W.target(nd.w, x);
          if (tw == kNoState) {
            continue;
          }
          scratch.clear();
          for (auto it = pool.begin() + offset[nd.set]; it != pool.begin() + offset[nd.set + 1];
               ++it) {
            for (letter_type y = 0; y <= nl; ++y) {
              auto t = C.target(*it, C.symbol(x, y));
              if (t != kNoState && live[t]) {
                scratch.push_back(t);
              }
            }
          }
          auto ts = intern(scratch);
          if (seen.emplace(key(tw, ts), static_cast<std::uint32_t>(nodes.size())).second) {
            nodes.push_back({tw, ts, i, x});
          }
        }
      }
      return found;
    }

    // Shortlex-least accepted (u, v) with u != v.
    std::optional<std::pair<word_type, word_type>> off_diagonal(Fsa const& E) {
      if (E.num_states() == 0) {
        return std::nullopt;
      }
      struct Node {
        state_type    s;
        bool          differ;
        std::uint32_t parent;
        symbol_type   a;
      };
      std::vector<Node>                                nodes{{1, false, 0, 0}};
      std::unordered_map<std::uint64_t, std::uint32_t> seen{{2, 0}};
      for (std::uint32_t i = 0; i < nodes.size(); ++i) {
        auto const nd = nodes[i];
        if (nd.differ && E.accepting(nd.s)) {
          std::vector<symbol_type> syms;
          for (auto j = i; j != 0; j = nodes[j].parent) {
            syms.push_back(nodes[j].a);
          }
          std::reverse(syms.begin(), syms.end());
          word_type u, v;
          for (auto a : syms) {
            auto p = E.unpair(a);
            if (p.left != E.pad()) {
              u.push_back(p.left);
            }
            if (p.right != E.pad()) {
              v.push_back(p.right);
            }
          }
          return std::make_pair(u, v);
        }
        for (symbol_type a = 0; a < E.num_symbols(); ++a) {
          auto t = E.target(nd.s, a);
          if (t == kNoState) {
            continue;
          }
          auto p  = E.unpair(a);
          bool df = nd.differ || p.left != p.right;
          auto k  = (static_cast<std::uint64_t>(t) << 1) | (df ? 1 : 0);
          if (seen.emplace(k, static_cast<std::uint32_t>(nodes.size())).second) {
            nodes.push_back({t, df, i, a});
          }
        }
      }
      return std::nullopt;
    }

    std::vector<word_type> diffs_outside(word_type const&             u,
                                         word_type const&             v,
                                         RuleSet const&               rs,
                                         WordDifferenceMachine const* dm) {
      auto                   wd = extract_word_differences({{u, v}}, rs);
      std::vector<word_type> out;
      for (auto const& d : wd.diffs()) {
        if (dm == nullptr || dm->state_of(d) == kNoState) {
          out.push_back(d);
        }
      }
      return out;
    }
  }  // namespace

  CheckResult partial_correctness_check(Fsa const&                   W,
                                        Multiplier const&            M,
                                        RuleSet const&               rs,
                                        WordDifferenceMachine const* dm,
                                        std::size_t                  witnesses) {
    CheckResult                res;
    auto const&                a = W.alphabet();
    std::optional<DiffReducer> red;
    if (dm != nullptr) {
      red.emplace(*dm, W);
    }
    for (letter_type g = 0; g < a.size(); ++g) {
      for (auto& u : least_uncovered(W, minimize(label_component(M.fsa, g)), witnesses)) {
        word_type ug = u;
        ug.push_back(g);
        auto v = rs.rewrite(ug);
        if (red && !W.accepts(v)) {
          v = red->reduce(std::move(v));
        }
        auto nd = diffs_outside(ug, v, rs, dm);
        res.failures.push_back({g, std::move(u), std::move(v), std::move(nd)});
      }
    }
    if (auto e = off_diagonal(label_component(M.fsa, kIdentityMark))) {
      auto [u, v] = *e;
      if (shortlex_less(u, v)) {
        std::swap(u, v);
      }
      res.failures.push_back({kIdentityMark, u, v, diffs_outside(u, v, rs, dm)});
    }
    return res;
  }

  ////////////////////////////////////////////////////////////////////////
  // Synthesis
  ////////////////////////////////////////////////////////////////////////

  namespace {
    void say(SynthesisConfig const& cfg, std::string const& s) {
      if (cfg.log) {
        cfg.log(s);
      }
    }
  }  // namespace

  AutomaticStructure synthesize(Presentation const& p, SynthesisConfig const& cfg) {
    KnuthBendix kb(p, cfg.kb);
    if (cfg.on_kb_pass) {
      kb.on_pass(cfg.on_kb_pass);
    }
    AutomaticStructure s;
    s.presentation = p;
    s.kb_halt      = kb.run();
    s.rules        = kb.rules();
    s.diffs        = close_under_inversion(kb.diffs(), kb.rules());
    s.kb_passes    = kb.passes();
    say(cfg, fmt::format("kb halt={} rules={} wdiffs={} wdiffs_inv={}", to_string(s.kb_halt),
                         s.rules.size(), kb.diffs().size(), s.diffs.size()));
    if (cfg.on_kb_done) {
      cfg.on_kb_done(s);
    }
    return synthesize_from(std::move(s), cfg);
  }

  AutomaticStructure synthesize_from(AutomaticStructure s, SynthesisConfig const& cfg) {
    auto const& p = s.presentation;
    std::optional<KnuthBendix> kb;
    auto ensure_kb = [&]() {
      if (!kb) {
        kb.emplace(p, s.rules, cfg.kb);
        if (cfg.on_kb_pass) {
          kb->on_pass(cfg.on_kb_pass);
        }
      }
    };

    s.verified = false;
    for (std::size_t iter = 0; iter < cfg.max_iterations; ++iter) {
      s.diffs   = close_under_inversion(s.diffs, s.rules);
      if (cfg.on_pass_start) {
        cfg.on_pass_start(s);
      }
      auto dm   = build_wd_machine(s.diffs, rule_reducer(s.rules));
      s.acceptor   = build_word_acceptor(dm, cfg.build);
      s.multiplier = build_multiplier(dm, s.acceptor, cfg.build);
      auto check   = partial_correctness_check(s.acceptor, s.multiplier, s.rules, &dm, cfg.witnesses);
      PassRecord rec{s.passes.size() + 1, s.diffs.size(), s.acceptor.num_states(),
                     s.multiplier.raw_states, s.multiplier.fsa.num_states(), check.ok()};
      s.passes.push_back(rec);
      if (cfg.on_pass) {
        cfg.on_pass(rec);
      }
      if (check.ok()) {
        auto rep = axiom_report(s.acceptor, s.multiplier.fsa, p, cfg.build.max_states);
        s.verified = rep.ok;
        for (auto const& f : rep.failures) {
          say(cfg, "axiom failure: " + f);
        }
        return s;
      }

      auto const size_before  = s.diffs.size();
      auto const trans_before = s.diffs.transitions().size();
      DiffReducer red(dm, s.acceptor);
      std::vector<std::pair<word_type, word_type>> eqns;
      for (auto const& f : check.failures) {
        if (f.letter == kIdentityMark) {
          say(cfg, fmt::format("check: identity pair {} = {}", p.alphabet.print(f.u),
                               p.alphabet.print(f.v)));
          s.diffs.add_equation(f.u, f.v, s.rules);
          eqns.emplace_back(f.u, f.v);
          continue;
        }
        say(cfg, fmt::format("check: letter {} witness {} -> {} ({} new)", p.alphabet.name(f.letter),
                             p.alphabet.print(f.u), p.alphabet.print(f.v), f.new_diffs.size()));
        word_type ug = f.u;
        ug.push_back(f.letter);
        s.diffs.add_equation(ug, f.v, s.rules);
        s.diffs.add_path(f.u, f.v, red.reduce({f.letter}), s.rules);
        eqns.emplace_back(ug, f.v);
      }
      if (s.diffs.size() == size_before && s.diffs.transitions().size() == trans_before) {
        ensure_kb();
        auto const rules_before = kb->rules().num_ids();
        auto const passes_before = kb->passes().size();
        for (auto const& [u, v] : eqns) {
          kb->add_equation(u, v);
        }
        s.kb_halt = kb->run();
        s.rules   = kb->rules();
        s.kb_passes.insert(s.kb_passes.end(), kb->passes().begin() + passes_before,
                           kb->passes().end());
        s.diffs.merge(kb->diffs());
        say(cfg, fmt::format("kb resumed halt={} rules={}", to_string(s.kb_halt), s.rules.size()));
        if (kb->rules().num_ids() == rules_before && s.kb_halt == HaltReason::confluent) {
          say(cfg, "no progress: rules are confluent and the check still fails");
          return s;
        }
      }
    }
    say(cfg, fmt::format("iteration cap {} reached", cfg.max_iterations));
    return s;
  }

}  // namespace autostruct
