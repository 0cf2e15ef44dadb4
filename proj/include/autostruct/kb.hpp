#pragma once

// Knuth-Bendix completion for shortlex-ordered rewriting systems over group
// presentations, and the word differences of the equations it produces.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "autostruct/fsa.hpp"
#include "autostruct/words.hpp"

namespace autostruct {

  struct RewriteRule {
    word_type lhs;
    word_type rhs;

    bool operator==(RewriteRule const&) const = default;
  };

  //! Rules indexed by left-hand side. Rule ids are stable: removing a rule
  //! only marks it dead.
  class RuleSet {
   public:
    RuleSet() = default;
    explicit RuleSet(Alphabet alphabet);

    Alphabet const& alphabet() const noexcept {
      return alphabet_;
    }

    //! Number of live rules.
    std::size_t size() const noexcept {
      return live_;
    }

    //! Number of ids ever issued, live or dead.
    std::uint32_t num_ids() const noexcept {
      return static_cast<std::uint32_t>(rules_.size());
    }

    bool alive(std::uint32_t id) const noexcept {
      return alive_[id] != 0;
    }

    RewriteRule const& rule(std::uint32_t id) const noexcept {
      return rules_[id];
    }

    //! Live rules in id order.
    std::vector<RewriteRule> rules() const;

    //! Adds lhs -> rhs. Throws std::invalid_argument unless rhs is shortlex
    //! less than lhs.
    std::uint32_t add_rule(word_type lhs, word_type rhs);
    void          remove_rule(std::uint32_t id);
    void          set_rhs(std::uint32_t id, word_type rhs);

    //! Drops dead trie nodes.
    void rebuild_index();

    //! Leftmost reduction: letters are appended one at a time and the
    //! shortest left-hand side ending at the new letter is replaced.
    word_type rewrite(word_type const& w) const;
    void      rewrite_in_place(word_type& w) const;

    //! True when some left-hand side occurs in w[first, last).
    bool reducible(word_type const& w, std::size_t first, std::size_t last) const;

    bool reducible(word_type const& w) const {
      return reducible(w, 0, w.size());
    }

    std::size_t max_lhs_length() const noexcept {
      return max_lhs_;
    }

    //! Calls f(id) for every live rule whose lhs starts with
    //! w[first, last) and is strictly longer than it.
    template <typename F>
    void for_each_extension(word_type const& w,
                            std::size_t      first,
                            std::size_t      last,
                            F&&              f) const;

    //! Calls f(id) for every live rule whose lhs ends with w[first, last) and
    //! is strictly longer than it.
    template <typename F>
    void for_each_prefix_extension(word_type const& w,
                                   std::size_t      first,
                                   std::size_t      last,
                                   F&&              f) const;

    //! Estimated bytes held by rules and indices.
    std::size_t memory_bytes() const noexcept;

   private:
    struct Trie {
      std::size_t                degree = 0;
      std::vector<std::uint32_t> child;     // node * degree + letter
      std::vector<std::uint32_t> terminal;  // rule id + 1, or 0

      void          clear(std::size_t d);
      std::uint32_t node_count() const noexcept {
        return static_cast<std::uint32_t>(terminal.size());
      }
      std::uint32_t add_node();
      template <typename F>
      void for_each_below(std::uint32_t node, F&& f) const;
    };

    void index_rule(std::uint32_t id);

    Alphabet                  alphabet_;
    std::vector<RewriteRule>  rules_;
    std::vector<std::uint8_t> alive_;
    std::size_t               live_    = 0;
    std::size_t               max_lhs_ = 0;
    std::size_t               letters_ = 0;
    Trie                      forward_;
    Trie                      reverse_;
  };

  //! One rule per line, `lhs -> rhs`, words printed by the alphabet.
  void    write_rules(std::ostream& out, RuleSet const& rs);
  RuleSet read_rules(std::istream& in, Alphabet const& a);

  //! The trivial rules x inverse(x) -> 1.
  RuleSet inverse_rules(Alphabet const& a);

  //! Word differences with the transitions d -> x^-1 d y that equations
  //! actually used. Index 0 is the empty word.
  class WordDifferenceSet {
   public:
    WordDifferenceSet() = default;
    explicit WordDifferenceSet(Alphabet alphabet);

    Alphabet const& alphabet() const noexcept {
      return alphabet_;
    }

    std::size_t size() const noexcept {
      return diffs_.size();
    }

    word_type const& operator[](std::size_t i) const noexcept {
      return diffs_[i];
    }

    std::vector<word_type> const& diffs() const noexcept {
      return diffs_;
    }

    //! Index of \p d, or -1.
    std::int64_t find(word_type const& d) const;
    bool         contains(word_type const& d) const {
      return find(d) >= 0;
    }

    std::uint32_t add(word_type const& d);

    //! Pair symbol (x, y) as in a padded Fsa; the pad is alphabet().size().
    symbol_type symbol(letter_type x, letter_type y) const noexcept {
      return static_cast<symbol_type>(x) * (alphabet_.size() + 1) + y;
    }

    //! Records d --(x,y)--> d'. The first record for a (d, symbol) wins.
    void record(std::uint32_t from, symbol_type a, std::uint32_t to);

    std::map<std::pair<std::uint32_t, symbol_type>, std::uint32_t> const&
    transitions() const noexcept {
      return transitions_;
    }

    //! Adds the differences of the equation u = v, read synchronously with
    //! the shorter side padded: d_0 = 1, d_{i+1} = x_i^-1 d_i y_i reduced.
    //! The last step is recorded as landing on the identity.
    void add_equation(word_type const& u, word_type const& v, RuleSet const& rs) {
      add_path(u, v, word_type{}, rs);
    }

    //! As add_equation for a pair with u^-1 v = \p last in the group; the
    //! last step is recorded as landing on \p last.
    void add_path(word_type const& u,
                  word_type const& v,
                  word_type const& last,
                  RuleSet const&   rs);

    //! Adds the differences and recorded transitions of \p other.
    void merge(WordDifferenceSet const& other);

    //! Reduces every difference again, merging those that now agree.
    void renormalize(RuleSet const& rs);

    bool inverse_closed() const noexcept {
      return inverse_closed_;
    }

    void set_inverse_closed(bool v) noexcept {
      inverse_closed_ = v;
    }

    bool operator==(WordDifferenceSet const&) const = default;

   private:
    Alphabet                                                       alphabet_;
    std::vector<word_type>                                         diffs_;
    std::map<word_type, std::uint32_t>                             index_;
    std::map<std::pair<std::uint32_t, symbol_type>, std::uint32_t> transitions_;
    bool                                                           inverse_closed_ = false;
  };

  WordDifferenceSet extract_word_differences(
      std::vector<std::pair<word_type, word_type>> const& equations,
      RuleSet const&                                       reducer);

  WordDifferenceSet close_under_inversion(WordDifferenceSet const& wd,
                                          RuleSet const&           reducer);

  struct KbConfig {
    std::size_t max_equations = 2'000'000;
    //! 0 means 2 * longest relator + 2.
    std::size_t max_word_len = 0;
    //! Upper limit the word length may grow to.
    std::size_t max_word_len_cap = 64;
    std::size_t stabilization_window = 3;
    std::size_t memory_budget        = std::size_t(3) << 30;
    //! New rules between tidies; one tidy ends a pass.
    std::size_t tidy_interval = 200;
    //! Cap on equations waiting for a longer word-length limit.
    std::size_t max_deferred = 1'000'000;
  };

  enum class HaltReason : std::uint8_t { confluent, stabilized, budget };

  std::string to_string(HaltReason h);

  struct KbPass {
    std::size_t pass;
    std::size_t rules;
    std::size_t equations;
    std::size_t wdiffs;
    std::size_t wdiffs_inv;
  };

  struct KbResult {
    RuleSet             rules;
    WordDifferenceSet   diffs;
    HaltReason          halt = HaltReason::budget;
    std::vector<KbPass> passes;
    std::size_t         discarded = 0;
  };

  //! Completion state that can be run, halted by the difference heuristic,
  //! and run again.
  class KnuthBendix {
   public:
    KnuthBendix(Presentation const& p, KbConfig cfg);

    //! Starts from an existing rule set; overlaps are rechecked from the
    //! first rule.
    KnuthBendix(Presentation const& p, RuleSet rules, KbConfig cfg);

    //! Runs until confluence, stabilization of the inverse-closed
    //! difference count, or a budget.
    HaltReason run();

    //! Adds an equation known to hold in the group.
    void add_equation(word_type const& u, word_type const& v);

    RuleSet const& rules() const noexcept {
      return rules_;
    }

    WordDifferenceSet const& diffs() const noexcept {
      return diffs_;
    }

    std::vector<KbPass> const& passes() const noexcept {
      return passes_;
    }

    std::size_t discarded() const noexcept {
      return discarded_;
    }

    std::size_t equations_processed() const noexcept {
      return equations_;
    }

    KbConfig& config() noexcept {
      return cfg_;
    }

    //! Called with every pass record as it is produced.
    void on_pass(std::function<void(KbPass const&)> f) {
      on_pass_ = std::move(f);
    }

   private:
    void process(word_type u, word_type v);
    void drain();
    void overlaps_of(std::uint32_t i);
    bool tidy();
    void end_pass();

    Presentation                                  presentation_;
    KbConfig                                      cfg_;
    RuleSet                                       rules_;
    WordDifferenceSet                             diffs_;
    std::deque<std::pair<word_type, word_type>>   pending_;
    std::vector<std::pair<word_type, word_type>>  deferred_;
    std::vector<KbPass>                           passes_;
    std::function<void(KbPass const&)>            on_pass_;
    std::uint32_t                                 next_ = 0;
    std::size_t                                   added_since_tidy_ = 0;
    std::size_t                                   equations_        = 0;
    std::size_t                                   discarded_        = 0;
    std::size_t                                   max_len_          = 0;
    std::size_t                                   stable_           = 0;
    bool                                          over_budget_      = false;
  };

  KbResult kb_complete(Presentation const& p, KbConfig const& cfg = {});

  //! Every overlap equation between live rules whose sides still differ
  //! after rewriting; empty iff the rules are confluent (given that no lhs
  //! contains another).
  std::vector<std::pair<word_type, word_type>> critical_pairs(RuleSet const& rs);

  // Template definitions

  template <typename F>
  void RuleSet::Trie::for_each_below(std::uint32_t node, F&& f) const {
    std::vector<std::uint32_t> stack{node};
    while (!stack.empty()) {
      auto n = stack.back();
      stack.pop_back();
      if (terminal[n] != 0) {
        f(terminal[n] - 1);
      }
      auto const* c = child.data() + static_cast<std::size_t>(n) * degree;
      for (std::size_t x = degree; x-- > 0;) {
        if (c[x] != 0) {
          stack.push_back(c[x]);
        }
      }
    }
  }

  template <typename F>
  void RuleSet::for_each_extension(word_type const& w,
                                   std::size_t      first,
                                   std::size_t      last,
                                   F&&              f) const {
    std::uint32_t n = 0;
    for (auto k = first; k < last; ++k) {
      n = forward_.child[static_cast<std::size_t>(n) * letters_ + w[k]];
      if (n == 0) {
        return;
      }
    }
    auto const len = last - first;
    forward_.for_each_below(n, [&](std::uint32_t id) {
      if (alive_[id] && rules_[id].lhs.size() > len) {
        f(id);
      }
    });
  }

  template <typename F>
  void RuleSet::for_each_prefix_extension(word_type const& w,
                                          std::size_t      first,
                                          std::size_t      last,
                                          F&&              f) const {
    std::uint32_t n = 0;
    for (auto k = last; k-- > first;) {
      n = reverse_.child[static_cast<std::size_t>(n) * letters_ + w[k]];
      if (n == 0) {
        return;
      }
    }
    auto const len = last - first;
    reverse_.for_each_below(n, [&](std::uint32_t id) {
      if (alive_[id] && rules_[id].lhs.size() > len) {
        f(id);
      }
    });
  }

}  // namespace autostruct
