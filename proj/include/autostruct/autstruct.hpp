#pragma once

// Word-difference machines, the word acceptor and multiplier built from
// them, the partial correctness test, axiom checking and the minimal rule
// automaton.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "autostruct/fsa.hpp"
#include "autostruct/kb.hpp"
#include "autostruct/words.hpp"

namespace autostruct {

  //! Replaces a word by an equal (in the group) word, ideally its normal
  //! form.
  using Reducer = std::function<void(word_type&)>;

  Reducer rule_reducer(RuleSet const& rs);

  //! Pair automaton whose state s stands for the difference diffs[s - 1];
  //! state 1 is the identity and the only accepting state.
  struct WordDifferenceMachine {
    Fsa                    fsa;
    std::vector<word_type> diffs;

    //! State standing for \p d, or 0.
    state_type state_of(word_type const& d) const;
  };

  //! One state per difference of \p wd, in index order. Transitions recorded
  //! in \p wd are kept; when \p closure is set every other (d, (x, y)) whose
  //! reduced x^-1 d y lies in the set is added as well. Throws Error if a
  //! recorded transition leaves the set.
  WordDifferenceMachine build_wd_machine(WordDifferenceSet const& wd,
                                         Reducer const&           reduce,
                                         bool                     closure = true);

  //! Reads a machine back from its Fsa form (word labels are differences).
  WordDifferenceMachine wd_machine_from_fsa(Fsa f);

  //! The difference set (with every transition as recorded) of a machine.
  WordDifferenceSet difference_set(WordDifferenceMachine const& dm);

  struct BuildOptions {
    std::size_t     max_states = kDefaultMaxStates;
    MinimizeOptions minimize;
  };

  //! Accepts w iff no v <shortlex w with a dm run on (w, v) from the
  //! identity back to the identity exists. Every state accepts.
  Fsa build_word_acceptor(WordDifferenceMachine const& dm, BuildOptions const& opts = {});

  //! Letter-set labelled pair automaton: (u, v) with u, v in L(W) reaches a
  //! state labelled g iff the dm run on (u, v) ends at the normal form of g
  //! (the identity mark for the identity).
  struct Multiplier {
    Fsa         fsa;
    std::size_t raw_states = 0;
  };

  Multiplier build_multiplier(WordDifferenceMachine const& dm,
                              Fsa const&                   W,
                              BuildOptions const&          opts = {});

  //! Reduction to the W-language: the shortest W-rejected prefix p is
  //! replaced by an equal smaller word found by searching dm, until W
  //! accepts.
  class DiffReducer {
   public:
    DiffReducer(WordDifferenceMachine const& dm, Fsa const& W);

    word_type reduce(word_type w) const;

    //! Some v <shortlex p with a dm run on (p, v) ending at the identity.
    std::optional<word_type> smaller_equal(word_type const& p) const;

    void operator()(word_type& w) const {
      w = reduce(std::move(w));
    }

   private:
    WordDifferenceMachine const*                             dm_;
    Fsa const*                                               W_;
    std::size_t                                              stride_;
    std::vector<std::vector<std::pair<letter_type, state_type>>> by_first_;
  };

  struct CheckFailure {
    //! The generator, or kIdentityMark when M_identity is not diagonal.
    letter_type letter;
    word_type   u;
    //! An accepted word equal to u * letter (for kIdentityMark, the smaller
    //! of two accepted equal words, u being the larger).
    word_type              v;
    std::vector<word_type> new_diffs;
  };

  struct CheckResult {
    std::vector<CheckFailure> failures;

    bool ok() const noexcept {
      return failures.empty();
    }
  };

  //! For every generator g, the shortlex-least words u in L(W) (up to
  //! \p witnesses of them, none a prefix of another) with no (u, v) in the
  //! g-component of M; and one non-diagonal pair of the identity component
  //! if there is one. When \p dm is given it is used to reduce v into L(W)
  //! and new_diffs lists differences outside it.
  CheckResult partial_correctness_check(Fsa const&                   W,
                                        Multiplier const&            M,
                                        RuleSet const&               rs,
                                        WordDifferenceMachine const* dm        = nullptr,
                                        std::size_t                  witnesses = 1);

  struct PassRecord {
    std::size_t pass;
    std::size_t wdiffs;
    std::size_t W;
    std::size_t M_raw;
    std::size_t M;
    bool        check_ok;
  };

  struct AutomaticStructure {
    Presentation            presentation;
    Fsa                     acceptor;
    Multiplier              multiplier;
    WordDifferenceSet       diffs;
    RuleSet                 rules;
    HaltReason              kb_halt = HaltReason::budget;
    std::vector<KbPass>     kb_passes;
    std::vector<PassRecord> passes;
    bool                    verified = false;
  };

  struct SynthesisConfig {
    KbConfig     kb;
    std::size_t  max_iterations = 20;
    //! Failures repaired per generator and pass.
    std::size_t  witnesses = 16;
    BuildOptions build;

    std::function<void(KbPass const&)>                   on_kb_pass;
    std::function<void(PassRecord const&)>               on_pass;
    std::function<void(AutomaticStructure const&)>       on_kb_done;
    //! Called before each build/check pass with the rules and differences
    //! it will use.
    std::function<void(AutomaticStructure const&)>       on_pass_start;
    std::function<void(std::string const&)>              log;
  };

  //! Knuth-Bendix, then build/check/repair passes, then axiom_check.
  AutomaticStructure synthesize(Presentation const& p, SynthesisConfig const& cfg = {});

  //! As synthesize, but starting after completion from \p start (whose
  //! rules, diffs and kb fields are used).
  AutomaticStructure synthesize_from(AutomaticStructure start, SynthesisConfig const& cfg = {});

  //! The x-component of a multiplier (x may be kIdentityMark).
  Fsa multiplier_component(Fsa const& M, letter_type x);

  //! The pairs (u, u) with u in L(W).
  Fsa diagonal(Fsa const& W);

  //! Left-to-right composite of the multiplier components along \p w; the
  //! identity component when w is empty.
  Fsa composite(Fsa const& M, word_type const& w, std::size_t max_states = kDefaultMaxStates);

  struct AxiomReport {
    bool                     ok = true;
    std::vector<std::string> failures;
  };

  //! Checks that the identity component is the diagonal of L(W), that every
  //! generator component is the graph of a map from L(W) to L(W), and that for every relation (the implicit
  //! x inverse(x) = 1 included) both sides give the same map.
  AxiomReport axiom_report(Fsa const&          W,
                           Fsa const&          M,
                           Presentation const& p,
                           std::size_t         max_states = kDefaultMaxStates);

  //! axiom_report on the stored automata; sets s.verified.
  bool axiom_check(AutomaticStructure& s, Presentation const& p);

  struct MinimalRules {
    //! Pairs (u, v): u is a minimal reducible word (every proper subword
    //! accepted) and v its accepted representative.
    Fsa rules;
    //! Differences occurring on those pairs, reduced to accepted words.
    WordDifferenceSet diffs;
  };

  //! Throws NotVerified unless s.verified.
  MinimalRules minimal_rule_acceptor(AutomaticStructure const& s);

}  // namespace autostruct
