#pragma once

// Word problem, normal forms, element orders, group order and growth from a
// verified automatic structure.

#include <cstddef>
#include <optional>
#include <vector>

#include "autostruct/autstruct.hpp"
#include "autostruct/fsa.hpp"
#include "autostruct/words.hpp"

namespace autostruct {

  //! What the queries need: the acceptor and a difference machine that
  //! reduces into its language.
  struct QueryStructure {
    Fsa                   acceptor;
    WordDifferenceMachine dm;
    bool                  verified = false;
  };

  //! Uses the minimal differences when \p minimal is given, otherwise the
  //! structure's own.
  QueryStructure query_structure(AutomaticStructure const& s,
                                 MinimalRules const*       minimal = nullptr);

  //! An acceptor path along base^k that closes into a cycle: states[i] is
  //! the state after i letters, and states.back() == states[cycle_start].
  //! Both indices are multiples of |base|.
  struct TraceCertificate {
    word_type               base;
    std::vector<state_type> states;
    std::size_t             cycle_start = 0;
  };

  struct OrderResult {
    enum class Kind : std::uint8_t { finite, infinite, unknown };

    Kind    kind = Kind::unknown;
    big_int order;  // when finite
    //! Powers tried before giving up, when unknown.
    std::size_t                     budget = 0;
    std::optional<TraceCertificate> certificate;
  };

  //! Throws NotVerified unless the structure is verified.
  word_type reduce_word(QueryStructure const& s, word_type const& w);
  bool      word_problem(QueryStructure const& s, word_type const& u, word_type const& v);

  //! Infinite with a trace certificate when base^k stays in L(W) through a
  //! cycle; otherwise powers are reduced one by one until the identity
  //! appears or \p budget (0: twice the group order if finite, else 10^6) is
  //! used up.
  OrderResult element_order(QueryStructure const& s, word_type const& w, std::size_t budget = 0);

  //! Checks a certificate against an acceptor.
  bool certificate_valid(Fsa const& W, TraceCertificate const& c);

  Count                group_order(QueryStructure const& s);
  std::vector<big_int> growth_series(QueryStructure const& s, std::size_t max_len);

}  // namespace autostruct
