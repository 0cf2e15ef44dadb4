#include "autostruct/query.hpp"

#include <map>

#include "autostruct/error.hpp"

namespace autostruct {

  namespace {
    void require(QueryStructure const& s) {
      if (!s.verified) {
        throw NotVerified("queries need a verified automatic structure");
      }
    }
  }  // namespace

  QueryStructure query_structure(AutomaticStructure const& s, MinimalRules const* minimal) {
    QueryStructure q;
    q.acceptor = s.acceptor;
    q.verified = s.verified;
    auto full  = build_wd_machine(s.diffs, rule_reducer(s.rules));
    if (minimal == nullptr) {
      q.dm = std::move(full);
      return q;
    }
    DiffReducer red(full, s.acceptor);
    q.dm = build_wd_machine(minimal->diffs, red);
    return q;
  }

  word_type reduce_word(QueryStructure const& s, word_type const& w) {
    require(s);
    return DiffReducer(s.dm, s.acceptor).reduce(w);
  }

  bool word_problem(QueryStructure const& s, word_type const& u, word_type const& v) {
    require(s);
    DiffReducer red(s.dm, s.acceptor);
    return red.reduce(u) == red.reduce(v);
  }

  bool certificate_valid(Fsa const& W, TraceCertificate const& c) {
    auto const k = c.base.size();
    if (k == 0 || c.states.empty() || c.states.front() != W.initial()
        || (c.states.size() - 1) % k != 0 || c.cycle_start % k != 0
        || c.cycle_start + 1 >= c.states.size()
        || c.states.back() != c.states[c.cycle_start]) {
      return false;
    }
    for (std::size_t i = 0; i + 1 < c.states.size(); ++i) {
      auto s = c.states[i];
      if (s == kNoState || !W.accepting(s) || W.target(s, c.base[i % k]) != c.states[i + 1]) {
        return false;
      }
    }
    return W.accepting(c.states.back());
  }

  OrderResult element_order(QueryStructure const& s, word_type const& w, std::size_t budget) {
    require(s);
    OrderResult r;
    DiffReducer red(s.dm, s.acceptor);
    auto        g = red.reduce(w);
    if (g.empty()) {
      r.kind  = OrderResult::Kind::finite;
      r.order = 1;
      return r;
    }

    // trace g^k through W, watching the state at each copy boundary
    auto const&                     W = s.acceptor;
    TraceCertificate                c{g, {W.initial()}, 0};
    std::map<state_type, std::size_t> boundary{{W.initial(), 0}};
    bool                            fell_off = false;
    while (!fell_off) {
      for (auto x : g) {
        auto t = W.target(c.states.back(), x);
        if (t == kNoState || !W.accepting(t)) {
          fell_off = true;
          break;
        }
        c.states.push_back(t);
      }
      if (fell_off) {
        break;
      }
      auto [it, fresh] = boundary.emplace(c.states.back(), c.states.size() - 1);
      if (!fresh) {
        c.cycle_start = it->second;
        r.kind        = OrderResult::Kind::infinite;
        r.certificate = std::move(c);
        return r;
      }
    }

    if (budget == 0) {
      auto n = language_count(W);
      budget = 1'000'000;
      if (auto* f = std::get_if<big_int>(&n); f != nullptr && *f < big_int(500'000)) {
        budget = 2 * static_cast<std::size_t>(*f);
      }
    }
    word_type h;
    for (std::size_t n = 1; n <= budget; ++n) {
      h.insert(h.end(), g.begin(), g.end());
      h = red.reduce(std::move(h));
      if (h.empty()) {
        r.kind  = OrderResult::Kind::finite;
        r.order = n;
        return r;
      }
    }
    r.kind   = OrderResult::Kind::unknown;
    r.budget = budget;
    return r;
  }

  Count group_order(QueryStructure const& s) {
    require(s);
    return language_count(s.acceptor);
  }

  std::vector<big_int> growth_series(QueryStructure const& s, std::size_t max_len) {
    require(s);
    return count_by_length(s.acceptor, max_len);
  }

}  // namespace autostruct
