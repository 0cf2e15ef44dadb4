#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <boost/container_hash/hash.hpp>

#include <fmt/format.h>

#include "autostruct/autstruct.hpp"
#include "autostruct/error.hpp"

namespace autostruct {

  Fsa multiplier_component(Fsa const& M, letter_type x) {
    return minimize(label_component(M, x));
  }

  Fsa diagonal(Fsa const& W) {
    Fsa D(W.alphabet(), AlphabetKind::pair, W.num_states());
    for (state_type s = 1; s <= W.num_states(); ++s) {
      D.set_accepting(s, W.accepting(s));
      for (letter_type x = 0; x < W.alphabet().size(); ++x) {
        D.set_target(s, D.symbol(x, x), W.target(s, x));
      }
    }
    return D;
  }

  Fsa composite(Fsa const& M, word_type const& w, std::size_t max_states) {
    if (w.empty()) {
      return multiplier_component(M, kIdentityMark);
    }
    auto c = multiplier_component(M, w[0]);
    for (std::size_t i = 1; i < w.size(); ++i) {
      c = compose(c, multiplier_component(M, w[i]), max_states);
    }
    return c;
  }

  namespace {
    // (u, v) -> (v, u)
    Fsa swapped(Fsa const& f) {
      Fsa g(f.alphabet(), AlphabetKind::pair, f.num_states());
      auto const pad = f.pad();
      for (state_type s = 1; s <= f.num_states(); ++s) {
        g.set_accepting(s, f.accepting(s));
        for (letter_type x = 0; x <= pad; ++x) {
          for (letter_type y = 0; y <= pad; ++y) {
            if (x != pad || y != pad) {
              g.set_target(s, g.symbol(y, x), f.target(s, f.symbol(x, y)));
            }
          }
        }
      }
      return g;
    }

    // Whether every accepted chain (v0, v1, ..., vk), (v_{j-1}, v_j) in
    // L(chain[j-1]), has (v0, vk) in L(T). All words are read in step, so
    // this is a search over tuples of states, not subsets.
    bool chain_within(std::vector<Fsa const*> const& chain,
                      Fsa const&                     T,
                      std::size_t                    max_states) {
      auto const k      = chain.size();
      auto const pad    = T.pad();
      auto const stride = k + 2;  // states of chain, state of T (0 = dead), ended mask
      std::vector<std::uint32_t> pool;
      auto hash = [&](std::uint32_t i) {
        return boost::hash_range(pool.begin() + i * stride, pool.begin() + (i + 1) * stride);
      };
      auto eq = [&](std::uint32_t i, std::uint32_t j) {
        return std::equal(pool.begin() + i * stride, pool.begin() + (i + 1) * stride,
                          pool.begin() + j * stride);
      };
      std::unordered_set<std::uint32_t, decltype(hash), decltype(eq)> seen(1024, hash, eq);
      std::vector<std::uint32_t> todo;
      auto push = [&]() {
        auto id = static_cast<std::uint32_t>(pool.size() / stride - 1);
        if (seen.insert(id).second) {
          if (seen.size() > max_states) {
            throw BudgetExceeded(fmt::format("relation check exceeded {} states", max_states));
          }
          todo.push_back(id);
        } else {
          pool.resize(pool.size() - stride);
        }
      };
      for (auto f : chain) {
        if (f->num_states() == 0) {
          return true;
        }
      }
      pool.assign(k, 1);
      pool.push_back(T.num_states() > 0 ? 1 : 0);
      pool.push_back(0);
      push();

      std::vector<letter_type> ltr(k + 1);
      std::vector<state_type>  st(k + 1);
      while (!todo.empty()) {
        auto const id   = todo.back();
        todo.pop_back();
        auto const base = id * stride;
        auto const t    = pool[base + k];
        auto const mask = pool[base + k + 1];
        bool all        = true;
        for (std::size_t j = 0; j < k && all; ++j) {
          all = chain[j]->accepting(pool[base + j]);
        }
        if (all && (t == 0 || !T.accepting(t))) {
          return false;
        }
        // choose v0's letter, then each v_j's letter such that chain[j-1] moves
        auto extend = [&](auto&& self, std::size_t j) -> void {
          letter_type const lo = (mask >> j) & 1 ? pad : 0;
          for (letter_type y = lo; y <= pad; ++y) {
            ltr[j] = y;
            if (j > 0) {
              auto const x = ltr[j - 1];
              auto const p = pool[base + j - 1];
              st[j - 1]    = x == pad && y == pad ? p : chain[j - 1]->target(p, T.symbol(x, y));
              if (st[j - 1] == kNoState) {
                continue;
              }
            }
            if (j < k) {
              self(self, j + 1);
              continue;
            }
            if (std::all_of(ltr.begin(), ltr.end(), [&](auto l) { return l == pad; })) {
              continue;
            }
            state_type t2 = t;
            if (t != 0 && (ltr[0] != pad || ltr[k] != pad)) {
              t2 = T.target(t, T.symbol(ltr[0], ltr[k]));
            }
            std::uint32_t m = mask;
            for (std::size_t i = 0; i <= k; ++i) {
              m |= ltr[i] == pad ? 1u << i : 0u;
            }
            pool.insert(pool.end(), st.begin(), st.begin() + k);
            pool.push_back(t2);
            pool.push_back(m);
            push();
          }
        };
        extend(extend, 0);
      }
      return true;
    }

    // (u, v) in L(f) implies v in L(W)
    bool lands_in(Fsa const& f, Fsa const& W) {
      if (f.num_states() == 0) {
        return true;
      }
      auto const pad = f.pad();
      std::unordered_set<std::uint64_t> seen;
      std::vector<std::pair<state_type, state_type>> todo{{1, W.num_states() > 0 ? 1 : 0}};
      seen.insert((std::uint64_t{1} << 32) | todo[0].second);
      while (!todo.empty()) {
        auto [p, w] = todo.back();
        todo.pop_back();
        if (f.accepting(p) && (w == 0 || !W.accepting(w))) {
          return false;
        }
        for (letter_type x = 0; x <= pad; ++x) {
          for (letter_type y = 0; y <= pad; ++y) {
            if (x == pad && y == pad) {
              continue;
            }
            auto p2 = f.target(p, f.symbol(x, y));
            if (p2 == kNoState) {
              continue;
            }
            state_type w2 = w == 0 || y == pad ? w : W.target(w, y);
            if (seen.insert((std::uint64_t{p2} << 32) | w2).second) {
              todo.emplace_back(p2, w2);
            }
          }
        }
      }
      return true;
    }
  }  // namespace

  AxiomReport axiom_report(Fsa const&          W,
                           Fsa const&          M,
                           Presentation const& p,
                           std::size_t         max_states) {
    AxiomReport r;
    auto const& a    = p.alphabet;
    auto        fail = [&](std::string s) {
      r.ok = false;
      r.failures.push_back(std::move(s));
    };
    if (!(W.alphabet() == a) || !(M.alphabet() == a)) {
      throw AlphabetMismatch("axiom check: automata and presentation alphabets differ");
    }

    std::map<letter_type, Fsa> parts;
    auto part = [&](letter_type x) -> Fsa const& {
      auto it = parts.find(x);
      if (it == parts.end()) {
        it = parts.emplace(x, multiplier_component(M, x)).first;
      }
      return it->second;
    };
    Fsa const& id = part(kIdentityMark);

    if (!language_equal(id, diagonal(W))) {
      fail("the identity multiplier is not the diagonal of the acceptor");
      return r;
    }
    // With the identity component equal to the diagonal, these make every
    // x-component the graph of a map L(W) -> L(W).
    for (letter_type x = 0; x < a.size(); ++x) {
      if (!language_equal(exists_project(part(x), Side::first, max_states), W)) {
        fail(fmt::format("the {} multiplier does not cover the acceptor", a.name(x)));
      }
      if (!lands_in(part(x), W)) {
        fail(fmt::format("the {} multiplier leaves the acceptor", a.name(x)));
      }
      auto back = swapped(part(x));
      if (!chain_within({&back, &part(x)}, id, max_states)) {
        fail(fmt::format("the {} multiplier is not single-valued", a.name(x)));
      }
    }
    if (!r.ok) {
      return r;
    }

    // Maps agree on L(W) iff the graph of one lies in the other.
    std::vector<std::pair<word_type, word_type>> rels = p.relations;
    for (letter_type x = 0; x < a.size(); ++x) {
      rels.push_back({{x, a.inverse(x)}, {}});
    }
    for (auto const& [lhs, rhs] : rels) {
      word_type chain = lhs, target = rhs;
      if (rhs.size() > 1 || lhs.empty()) {
        std::swap(chain, target);
      }
      if (target.size() > 1 || chain.empty()) {
        chain = lhs;
        auto inv = invert_word(a, rhs);
        chain.insert(chain.end(), inv.begin(), inv.end());
        target.clear();
      }
      if (chain.empty()) {
        continue;
      }
      std::vector<Fsa const*> fs;
      for (auto x : chain) {
        fs.push_back(&part(x));
      }
      if (!chain_within(fs, target.empty() ? id : part(target[0]), max_states)) {
        fail(fmt::format("composites differ for {} = {}", a.print(lhs), a.print(rhs)));
      }
    }
    return r;
  }

  bool axiom_check(AutomaticStructure& s, Presentation const& p) {
    s.verified = axiom_report(s.acceptor, s.multiplier.fsa, p).ok;
    return s.verified;
  }

  namespace {
    struct RuleKey {
      state_type m, su, s2;
      bool       operator==(RuleKey const&) const = default;
    };

    struct RuleKeyHash {
      std::size_t operator()(RuleKey const& k) const noexcept {
        std::uint64_t h = k.m;
        h               = h * 0x9E3779B97F4A7C15ULL + k.su;
        h               = h * 0x9E3779B97F4A7C15ULL + k.s2;
        return static_cast<std::size_t>(h ^ (h >> 31));
      }
    };

    bool labelled(Fsa const& M, state_type m, letter_type x) {
      return m != kNoState && M.label_contains(m, x);
    }
  }  // namespace

  MinimalRules minimal_rule_acceptor(AutomaticStructure const& s) {
    if (!s.verified) {
      throw NotVerified("minimal_rule_acceptor needs a verified structure");
    }
    auto const& W   = s.acceptor;
    auto const& M   = s.multiplier.fsa;
    auto const& a   = W.alphabet();
    auto const  pad = M.pad();

    // (M state, W state of u, W state of u without its first letter); s2 = 0
    // before the first letter. The final state F has no key.
    Fsa                  R(a, AlphabetKind::pair, 0);
    std::vector<RuleKey> keys{{0, 0, 0}};
    std::unordered_map<RuleKey, state_type, RuleKeyHash> index;
    auto intern = [&](RuleKey k) {
      auto [it, fresh] = index.emplace(k, static_cast<state_type>(keys.size()));
      if (fresh) {
        keys.push_back(k);
        R.add_state();
      }
      return it->second;
    };
    if (W.num_states() == 0 || M.num_states() == 0) {
      return {R, WordDifferenceSet(a)};
    }
    intern({1, 1, 0});
    state_type const F = R.add_state();  // state 2
    keys.push_back({0, 0, 0});
    R.set_accepting(F, true);

    for (state_type cur = 1; cur < keys.size(); ++cur) {
      if (cur == F) {
        continue;
      }
      auto const k = keys[cur];
      for (letter_type x = 0; x < a.size(); ++x) {
        auto const s2 = k.s2 == 0 ? W.initial() : W.target(k.s2, x);
        if (s2 == kNoState) {
          continue;
        }
        auto const su = W.target(k.su, x);
        for (letter_type b = 0; b <= pad; ++b) {
          auto const sym = R.symbol(x, b);
          if (su != kNoState) {
            auto m = M.target(k.m, sym);
            if (m != kNoState) {
              R.set_target(cur, sym, intern({m, su, s2}));
            }
          } else {
            auto m = b == pad ? k.m : M.target(k.m, M.symbol(pad, b));
            if (labelled(M, m, x)) {
              R.set_target(cur, sym, F);
            }
          }
        }
      }
    }
    MinimalRules out;
    out.rules = minimize(R);

    // differences along the rules, reduced exactly through the structure
    auto        dm  = build_wd_machine(s.diffs, rule_reducer(s.rules));
    DiffReducer red(dm, W);
    out.diffs = WordDifferenceSet(a);
    auto const& Rm = out.rules;
    if (Rm.num_states() == 0) {
      return out;
    }
    std::map<std::pair<state_type, std::uint32_t>, bool> seen;
    std::vector<std::pair<state_type, std::uint32_t>>    todo{{1, 0}};
    seen[{1, 0}] = true;
    word_type w;
    while (!todo.empty()) {
      auto [r, d] = todo.back();
      todo.pop_back();
      auto const* row = Rm.row(r);
      for (symbol_type sym = 0; sym < Rm.num_symbols(); ++sym) {
        auto t = row[sym];
        if (t == kNoState) {
          continue;
        }
        auto p = Rm.unpair(sym);
        w.clear();
        if (p.left != pad) {
          w.push_back(a.inverse(p.left));
        }
        auto const dw = out.diffs[d];
        w.insert(w.end(), dw.begin(), dw.end());
        if (p.right != pad) {
          w.push_back(p.right);
        }
        auto nd = out.diffs.add(red.reduce(w));
        out.diffs.record(d, sym, nd);
        if (seen.emplace(std::make_pair(t, nd), true).second) {
          todo.emplace_back(t, nd);
        }
      }
    }
    return out;
  }

}  // namespace autostruct
