#pragma once

// Deterministic and nondeterministic finite state automata over a single
// alphabet or over padded pairs of letters.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "autostruct/words.hpp"

namespace autostruct {

  //! States are numbered from 1; 0 means "no transition".
  using state_type  = std::uint32_t;
  using symbol_type = std::uint32_t;

  inline constexpr state_type kNoState = 0;

  //! Marks the identity in a letter-set label.
  inline constexpr letter_type kIdentityMark = 0xFFFF;

  enum class AlphabetKind : std::uint8_t { single, pair };

  enum class LabelKind : std::uint8_t {
    none,
    //! sorted set of letters, possibly containing kIdentityMark
    letter_set,
    //! a word, e.g. the word difference a state stands for
    word
  };

  //! One symbol of the padded two-variable alphabet. The padding mark is the
  //! letter index equal to the alphabet size; (pad, pad) is not a symbol.
  struct PaddedSymbol {
    letter_type left;
    letter_type right;

    bool operator==(PaddedSymbol const&) const = default;
  };

  //! Partial deterministic automaton. State 1 is initial whenever the
  //! automaton has at least one state; an automaton with no states accepts
  //! nothing.
  class Fsa {
   public:
    Fsa() = default;
    Fsa(Alphabet alphabet, AlphabetKind kind, state_type num_states = 0);

    Alphabet const& alphabet() const noexcept {
      return alphabet_;
    }

    AlphabetKind kind() const noexcept {
      return kind_;
    }

    std::size_t num_symbols() const noexcept {
      return num_symbols_;
    }

    state_type num_states() const noexcept {
      return num_states_;
    }

    state_type initial() const noexcept {
      return num_states_ == 0 ? kNoState : 1;
    }

    //! The padding mark, for pair alphabets.
    letter_type pad() const noexcept {
      return static_cast<letter_type>(alphabet_.size());
    }

    symbol_type symbol(letter_type left, letter_type right) const noexcept {
      return static_cast<symbol_type>(left) * (alphabet_.size() + 1) + right;
    }

    PaddedSymbol unpair(symbol_type a) const noexcept {
      auto n = static_cast<symbol_type>(alphabet_.size() + 1);
      return {static_cast<letter_type>(a / n), static_cast<letter_type>(a % n)};
    }

    state_type target(state_type s, symbol_type a) const noexcept {
      return table_[static_cast<std::size_t>(s) * num_symbols_ + a];
    }

    void set_target(state_type s, symbol_type a, state_type t) noexcept {
      table_[static_cast<std::size_t>(s) * num_symbols_ + a] = t;
    }

    //! The row of transitions out of \p s, indexed by symbol.
    state_type const* row(state_type s) const noexcept {
      return table_.data() + static_cast<std::size_t>(s) * num_symbols_;
    }

    state_type add_state();
    void       resize(state_type num_states);

    bool accepting(state_type s) const noexcept {
      return accepting_[s] != 0;
    }

    void set_accepting(state_type s, bool v) noexcept {
      accepting_[s] = v ? 1 : 0;
    }

    void set_all_accepting() noexcept;
    bool all_accepting() const noexcept;

    LabelKind label_kind() const noexcept {
      return label_kind_;
    }

    void set_label_kind(LabelKind k);

    //! Label id of \p s; 0 means unlabelled.
    std::uint32_t label_id(state_type s) const noexcept {
      return labels_.empty() ? 0 : labels_[s];
    }

    //! The label of \p s (empty if unlabelled).
    word_type const& label(state_type s) const noexcept {
      return label_table_[label_id(s)];
    }

    bool has_label(state_type s) const noexcept {
      return label_id(s) != 0;
    }

    //! Attaches \p label to \p s, interning equal labels to the same id.
    void set_label(state_type s, word_type label);
    void clear_label(state_type s);

    //! Interned label words; index 0 is the "no label" sentinel.
    std::vector<word_type> const& label_table() const noexcept {
      return label_table_;
    }

    //! True if \p s carries a letter-set label containing \p x.
    bool label_contains(state_type s, letter_type x) const noexcept;

    //! Number of defined transitions.
    std::size_t num_transitions() const noexcept;

    //! Bytes used by the dense transition table.
    std::size_t table_bytes() const noexcept {
      return table_.size() * sizeof(state_type);
    }

    bool same_alphabet(Fsa const& other) const noexcept {
      return kind_ == other.kind_ && alphabet_ == other.alphabet_;
    }

    //! Runs a single-variable word from \p from; 0 if it falls off.
    state_type run(word_type const& w, state_type from = 1) const noexcept;

    bool accepts(word_type const& w) const noexcept;

    //! Runs the padded pair (u, v) through a pair automaton.
    state_type run_pair(word_type const& u, word_type const& v) const noexcept;
    bool       accepts_pair(word_type const& u, word_type const& v) const noexcept;

    //! The padded symbol sequence of the pair (u, v).
    std::vector<symbol_type> pair_symbols(word_type const& u,
                                          word_type const& v) const;

    bool operator==(Fsa const&) const = default;

   private:
    Alphabet                   alphabet_;
    AlphabetKind               kind_        = AlphabetKind::single;
    std::size_t                num_symbols_ = 0;
    state_type                 num_states_  = 0;
    std::vector<state_type>    table_;       // row 0 is unused
    std::vector<std::uint8_t>  accepting_;   // index 0 unused
    LabelKind                  label_kind_ = LabelKind::none;
    std::vector<std::uint32_t> labels_;
    std::vector<word_type>     label_table_{word_type{}};
  };

  //! Nondeterministic automaton without epsilon transitions; several initial
  //! states are allowed.
  class Nfa {
   public:
    Nfa(Alphabet alphabet, AlphabetKind kind, state_type num_states = 0);

    Alphabet const& alphabet() const noexcept {
      return alphabet_;
    }

    AlphabetKind kind() const noexcept {
      return kind_;
    }

    std::size_t num_symbols() const noexcept {
      return num_symbols_;
    }

    state_type num_states() const noexcept {
      return static_cast<state_type>(out_.size() - 1);
    }

    state_type add_state();
    void       add_transition(state_type s, symbol_type a, state_type t);
    void       set_initial(state_type s, bool v = true);
    void       set_accepting(state_type s, bool v = true);

    bool initial(state_type s) const noexcept {
      return initial_[s] != 0;
    }

    bool accepting(state_type s) const noexcept {
      return accepting_[s] != 0;
    }

    struct Edge {
      symbol_type symbol;
      state_type  target;
    };

    std::vector<Edge> const& edges(state_type s) const noexcept {
      return out_[s];
    }

    //! Membership by direct simulation of the state-set.
    bool accepts(std::vector<symbol_type> const& symbols) const;

   private:
    Alphabet                       alphabet_;
    AlphabetKind                   kind_;
    std::size_t                    num_symbols_;
    std::vector<std::vector<Edge>> out_;
    std::vector<std::uint8_t>      initial_;
    std::vector<std::uint8_t>      accepting_;
  };

  //! Default cap on states created by subset and product constructions.
  inline constexpr std::size_t kDefaultMaxStates = std::size_t(1) << 26;

  //! Removes states unreachable from the initial state and states from which
  //! no accepting state is reachable, then renumbers breadth first.
  Fsa trim(Fsa const& f);

  //! Renumbers states in breadth-first order from the initial state,
  //! visiting symbols in increasing order. Unreachable states are dropped.
  Fsa canonical_renumber(Fsa const& f);

  //! Subset construction; only reachable subsets are built. Throws
  //! BudgetExceeded past \p max_states.
  Fsa determinize(Nfa const& n, std::size_t max_states = kDefaultMaxStates);

  struct MinimizeOptions {
    //! Estimated transition-table size above which the table is streamed
    //! from a temporary file instead of held in memory.
    std::size_t external_threshold_bytes = std::size_t(1) << 30;
    //! Directory for the temporary file; empty means the system default.
    std::string temp_dir;
  };

  //! Minimal partial DFA for the language of \p f. States with different
  //! (accepting, label) pairs are never merged; the result is trimmed and
  //! canonically renumbered.
  Fsa minimize(Fsa const& f, MinimizeOptions const& opts = {});

  //! Complement relative to all words (single alphabet) or to well-padded
  //! pair words (pair alphabet). Labels are dropped.
  Fsa complement(Fsa const& f, std::size_t max_states = kDefaultMaxStates);

  //! Product automaton accepting L(f) and L(g). Throws AlphabetMismatch.
  Fsa intersect(Fsa const& f,
                Fsa const& g,
                std::size_t max_states = kDefaultMaxStates);

  enum class Side : std::uint8_t { first, second };

  //! Accepts { u : (u, v) in L(f) for some v } (or symmetrically for the
  //! second side). The result is over the single alphabet, determinized
  //! and minimized.
  Fsa exists_project(Fsa const& f,
                     Side        side,
                     std::size_t max_states = kDefaultMaxStates);

  //! Accepts { (u, w) : (u, v) in L(f) and (v, w) in L(g) for some v }.
  //! The middle word is guessed letter by letter and may outrun both outer
  //! words. The result is determinized and minimized.
  Fsa compose(Fsa const& f,
              Fsa const& g,
              std::size_t max_states = kDefaultMaxStates);

  //! L(f) == L(g), decided by searching the product for a reachable pair of
  //! states that disagree on acceptance. Throws AlphabetMismatch.
  bool language_equal(Fsa const& f, Fsa const& g);

  //! When the languages differ, a shortlex-least symbol sequence in their
  //! symmetric difference.
  std::optional<std::vector<symbol_type>> language_difference(Fsa const& f,
                                                              Fsa const& g);

  using big_int = boost::multiprecision::cpp_int;

  struct Infinite {
    bool operator==(Infinite const&) const = default;
  };

  using Count = std::variant<big_int, Infinite>;

  //! Number of accepted words, or Infinite when some cycle lies on an
  //! accepting path.
  Count language_count(Fsa const& f);

  //! Number of accepted words of each length 0..max_len.
  std::vector<big_int> count_by_length(Fsa const& f, std::size_t max_len);

  struct Trace {
    //! Visited states, starting with the initial state.
    std::vector<state_type> states;
    //! Index of the letter that had no transition, if the run fell off.
    std::optional<std::size_t> failed_at;
  };

  Trace trace(Fsa const& f, word_type const& w);

  //! All accepted words of length at most \p max_len in shortlex order
  //! (single alphabet only).
  std::vector<word_type> enumerate(Fsa const& f, std::size_t max_len);

  //! All accepted pairs (u, v) whose padded length is at most \p max_len.
  std::vector<std::pair<word_type, word_type>> enumerate_pairs(
      Fsa const&  f,
      std::size_t max_len);

  //! Copy of \p f accepting only at states whose letter-set label contains
  //! \p x. Labels are dropped.
  Fsa label_component(Fsa const& f, letter_type x);

  //! Two-state-per-side checker of the padding discipline: once padding
  //! appears on a side it stays until the end.
  Fsa well_padded(Alphabet const& a);

  //! True when no accepted pair word of \p f breaks the padding discipline.
  bool padding_well_formed(Fsa const& f);

  // Text serialization, one record per line:
  //
  //     fsa <name>
  //     alphabet: single|pair <letters...> pad: _
  //     states: <n> initial: 1
  //     accepting: <list>|all
  //     labels: <state>: <letters...>
  //     t <state> <symbol> <state>
  //     end
  void write_fsa(std::ostream&      out,
                 Fsa const&         f,
                 std::string const& name);
  Fsa  read_fsa(std::istream& in, std::string* name = nullptr);

  void write_fsa_file(std::string const& path,
                      Fsa const&         f,
                      std::string const& name);
  Fsa  read_fsa_file(std::string const& path, std::string* name = nullptr);

}  // namespace autostruct
