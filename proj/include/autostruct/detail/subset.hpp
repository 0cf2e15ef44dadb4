#pragma once

// Generic on-the-fly subset construction. NFA states are encoded as 32-bit
// integers chosen by the caller; a DFA state is a sorted set of them.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>

#include "autostruct/error.hpp"
#include "autostruct/fsa.hpp"

namespace autostruct::detail {

  struct SetHash {
    std::size_t operator()(std::vector<std::uint32_t> const& v) const noexcept {
      std::uint64_t h = 1469598103934665603ULL;
      for (auto x : v) {
        h ^= x;
        h *= 1099511628211ULL;
      }
      return static_cast<std::size_t>(h ^ (h >> 29));
    }
  };

  // Successors(elem, emit) calls emit(symbol, elem') for every NFA edge.
  // Accept(set) decides acceptance. Reject(set) == true drops the transition
  // (used to prune sets known to be dead). Subsets are numbered in the order
  // they are discovered, which is breadth first by symbol.
  template <typename Successors, typename Accept, typename Reject>
  Fsa subset_construct(Alphabet const&            alphabet,
                       AlphabetKind               kind,
                       std::vector<std::uint32_t> initial,
                       Successors&&               successors,
                       Accept&&                   accept,
                       Reject&&                   reject,
                       std::size_t                max_states) {
    Fsa out(alphabet, kind, 0);
    std::sort(initial.begin(), initial.end());
    initial.erase(std::unique(initial.begin(), initial.end()), initial.end());
    if (initial.empty() || reject(initial)) {
      return out;
    }
    std::size_t const nsym = out.num_symbols();

    std::unordered_map<std::vector<std::uint32_t>, state_type, SetHash> index;
    std::vector<std::vector<std::uint32_t>>                             sets;
    sets.push_back({});  // state 0
    auto intern = [&](std::vector<std::uint32_t>&& s) -> state_type {
      auto it = index.find(s);
      if (it != index.end()) {
        return it->second;
      }
      if (sets.size() > max_states) {
        throw BudgetExceeded(
            fmt::format("subset construction exceeded {} states", max_states));
      }
      auto id = out.add_state();
      out.set_accepting(id, accept(s));
      index.emplace(s, id);
      sets.push_back(std::move(s));
      return id;
    };
    intern(std::move(initial));

    std::vector<std::vector<std::uint32_t>> buckets(nsym);
    std::vector<symbol_type>                touched;
    for (state_type cur = 1; cur < sets.size(); ++cur) {
      touched.clear();
      // copy: `sets` may reallocate while interning
      auto const members = sets[cur];
      for (auto e : members) {
        successors(e, [&](symbol_type a, std::uint32_t t) {
          if (buckets[a].empty()) {
            touched.push_back(a);
          }
          buckets[a].push_back(t);
        });
      }
      std::sort(touched.begin(), touched.end());
      for (auto a : touched) {
        auto& b = buckets[a];
        std::sort(b.begin(), b.end());
        b.erase(std::unique(b.begin(), b.end()), b.end());
        if (!reject(b)) {
          std::vector<std::uint32_t> key(b.begin(), b.end());
          auto                       t = intern(std::move(key));
          out.set_target(cur, a, t);
        }
        b.clear();
      }
    }
    return out;
  }

}  // namespace autostruct::detail
