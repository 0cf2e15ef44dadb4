#pragma once

// Alphabets, words, shortlex order and group presentations.

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace autostruct {

  //! Index of a letter in its alphabet. The index is also the letter's rank
  //! in the shortlex order.
  using letter_type = std::uint16_t;

  //! A word is a sequence of letter indices; the empty word is the identity.
  using word_type = std::vector<letter_type>;

  //! An ordered, inverse-closed monoid generating set.
  class Alphabet {
   public:
    Alphabet() = default;

    //! Builds an alphabet from names listed in shortlex order and an
    //! involution on their indices. Throws ParseError if \p inverse is not an
    //! involution or the names are not distinct.
    Alphabet(std::vector<std::string> names, std::vector<letter_type> inverse);

    std::size_t size() const noexcept {
      return names_.size();
    }

    letter_type inverse(letter_type x) const {
      return inverse_[x];
    }

    std::string const& name(letter_type x) const {
      return names_[x];
    }

    std::vector<std::string> const& names() const noexcept {
      return names_;
    }

    std::vector<letter_type> const& inverses() const noexcept {
      return inverse_;
    }

    //! Index of the letter called \p name, or -1.
    int index(std::string_view name) const;

    //! True when every letter of \p w is a letter of this alphabet.
    bool contains(word_type const& w) const noexcept;

    //! Parses a word. Accepts names written with or without separating
    //! spaces (longest name wins), `x^-1` and `x^k` suffixes, and `1` or the
    //! empty string for the identity.
    word_type parse(std::string_view text) const;

    //! Prints a word; names are concatenated when every name is a single
    //! character and space separated otherwise. The identity prints as `1`.
    std::string print(word_type const& w) const;

    bool operator==(Alphabet const&) const = default;

   private:
    std::vector<std::string> names_;
    std::vector<letter_type> inverse_;
  };

  //! Shortlex order: shorter words first, then lexicographic by letter
  //! index. Throws AlphabetMismatch if a letter lies outside \p a.
  std::strong_ordering shortlex_compare(Alphabet const& a,
                                        word_type const& u,
                                        word_type const& v);

  //! Unchecked shortlex strict less-than.
  inline bool shortlex_less(word_type const& u, word_type const& v) noexcept {
    if (u.size() != v.size()) {
      return u.size() < v.size();
    }
    return u < v;
  }

  //! Reverses \p w and replaces every letter by its inverse.
  word_type invert_word(Alphabet const& a, word_type const& w);

  //! Deletes adjacent `x inverse(x)` pairs until none remain.
  word_type free_reduce(Alphabet const& a, word_type const& w);

  //! A finitely presented group; relations are equations lhs = rhs. The
  //! relations x inverse(x) = 1 are implicit.
  struct Presentation {
    Alphabet                                     alphabet;
    std::vector<std::pair<word_type, word_type>> relations;

    //! Length of the longest relator lhs * rhs^-1.
    std::size_t max_relator_length() const noexcept;
  };

  //! The Fibonacci group F(2,n): generators a1, A1, ..., an, An (Ai is the
  //! inverse of ai) and relations ai a(i+1) = a(i+2), indices mod n.
  //! Throws std::invalid_argument if n < 2.
  Presentation fibonacci_presentation(unsigned n);

  //! Reads the line oriented presentation format:
  //!
  //!     generators: a1 A1 a2 A2
  //!     inverses: a1 A1, a2 A2
  //!     relation: a1 a2 = a3
  //!
  //! `#` starts a comment. When `inverses:` is omitted each name is paired
  //! with the name whose first character has the opposite case.
  Presentation read_presentation(std::istream& in);
  Presentation parse_presentation(std::string_view text);
  void         write_presentation(std::ostream& out, Presentation const& p);

  //! Builds a presentation from either `fib <n>` or a file path.
  Presentation load_presentation(std::string const& input);

}  // namespace autostruct
