#pragma once

// Independent oracles for the test suites: coset enumeration, exponent
// counting in free abelian groups, brute-force normal forms.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "autostruct/words.hpp"

namespace oracle {

  using autostruct::letter_type;
  using autostruct::word_type;

  // Coset enumeration over the trivial subgroup (HLT strategy with
  // coincidence processing). Generators are the letters of the alphabet;
  // inverse pairs are tied in the table, relators are lhs * rhs^-1.
  class ToddCoxeter {
   public:
    explicit ToddCoxeter(autostruct::Presentation const& p) : n_(p.alphabet.size()) {
      for (letter_type x = 0; x < n_; ++x) {
        inv_.push_back(p.alphabet.inverse(x));
      }
      for (auto const& [l, r] : p.relations) {
        word_type rel = l;
        for (auto it = r.rbegin(); it != r.rend(); ++it) {
          rel.push_back(inv_[*it]);
        }
        if (!rel.empty()) {
          rels_.push_back(rel);
        }
      }
    }

    // Number of cosets, i.e. the group order, or nullopt past the limit.
    std::optional<std::size_t> run(std::size_t max_cosets = 2'000'000) {
      table_.assign(2 * n_, 0);  // coset 0 unused
      rep_  = {0, 1};
      live_ = 1;
      for (std::size_t c = 1; c < rep_.size(); ++c) {
        for (auto const& r : rels_) {
          if (rep_[c] != c) {
            break;
          }
          scan_and_fill(c, r, max_cosets);
          if (overflow_) {
            return std::nullopt;
          }
        }
        for (letter_type x = 0; x < n_ && rep_[c] == c; ++x) {
          if (at(c, x) == 0) {
            define(c, x, max_cosets);
            if (overflow_) {
              return std::nullopt;
            }
          }
        }
      }
      // number the live cosets
      number_.assign(rep_.size(), 0);
      std::size_t k = 0;
      for (std::size_t c = 1; c < rep_.size(); ++c) {
        if (rep_[c] == c) {
          number_[c] = k++;
        }
      }
      return k;
    }

    // Index (0 = identity) of the element represented by w; run() first.
    std::size_t element(word_type const& w) const {
      std::size_t c = 1;
      for (auto x : w) {
        c = find(at(c, x));
      }
      return number_[c];
    }

   private:
    std::size_t& at(std::size_t c, letter_type x) {
      return table_[c * n_ + x];
    }
    std::size_t at(std::size_t c, letter_type x) const {
      return table_[c * n_ + x];
    }

    std::size_t find(std::size_t c) const {
      while (rep_[c] != c) {
        c = rep_[c];
      }
      return c;
    }

    void define(std::size_t c, letter_type x, std::size_t max_cosets) {
      if (live_ >= max_cosets) {
        overflow_ = true;
        return;
      }
      auto d = rep_.size();
      rep_.push_back(d);
      table_.resize((d + 1) * n_, 0);
      ++live_;
      at(c, x)        = d;
      at(d, inv_[x])  = c;
    }

    void scan_and_fill(std::size_t c, word_type const& r, std::size_t max_cosets) {
      std::size_t f = c, b = c;
      long        i = 0, j = static_cast<long>(r.size()) - 1;
      while (true) {
        while (i <= j && at(f, r[i]) != 0) {
          f = at(f, r[i++]);
        }
        if (i > j) {
          if (f != b) {
            coincidence(f, b);
          }
          return;
        }
        while (j >= i && at(b, inv_[r[j]]) != 0) {
          b = at(b, inv_[r[j--]]);
        }
        if (j < i) {
          coincidence(f, b);
          return;
        }
        if (i == j) {
          at(f, r[i])       = b;
          at(b, inv_[r[i]]) = f;
          return;
        }
        define(f, r[i], max_cosets);
        if (overflow_) {
          return;
        }
      }
    }

    void merge(std::size_t k, std::size_t l, std::vector<std::size_t>& q) {
      k = find(k);
      l = find(l);
      if (k == l) {
        return;
      }
      auto [m, n] = std::minmax(k, l);
      rep_[n]     = m;
      --live_;
      q.push_back(n);
    }

    void coincidence(std::size_t a, std::size_t b) {
      std::vector<std::size_t> q;
      merge(a, b, q);
      for (std::size_t i = 0; i < q.size(); ++i) {
        auto e = q[i];
        for (letter_type x = 0; x < n_; ++x) {
          auto f = at(e, x);
          if (f == 0) {
            continue;
          }
          if (at(f, inv_[x]) == e) {
            at(f, inv_[x]) = 0;
          }
          auto e1 = find(e), f1 = find(f);
          if (at(e1, x) != 0) {
            merge(f1, at(e1, x), q);
          } else if (at(f1, inv_[x]) != 0) {
            merge(e1, at(f1, inv_[x]), q);
          } else {
            at(e1, x)       = f1;
            at(f1, inv_[x]) = e1;
          }
        }
      }
    }

    std::size_t                         n_;
    std::vector<letter_type>            inv_;
    std::vector<word_type>              rels_;
    std::vector<std::size_t>            table_;
    std::vector<std::size_t>            rep_;
    std::vector<std::size_t>            number_;
    std::size_t                         live_     = 0;
    bool                                overflow_ = false;
  };

  // Exponent vector of w in the free abelian group on the generators with
  // letters ordered x1 X1 x2 X2 ...
  inline std::vector<long> exponents(word_type const& w, std::size_t rank) {
    std::vector<long> e(rank, 0);
    for (auto x : w) {
      e[x / 2] += (x % 2 == 0) ? 1 : -1;
    }
    return e;
  }

  // Shortlex normal form in Z^rank (letters x1 X1 x2 X2 ...): x1^a x2^b ...
  inline word_type abelian_normal_form(std::vector<long> const& e) {
    word_type w;
    for (std::size_t i = 0; i < e.size(); ++i) {
      auto x = static_cast<letter_type>(2 * i + (e[i] < 0 ? 1 : 0));
      for (long k = 0; k < std::labs(e[i]); ++k) {
        w.push_back(x);
      }
    }
    return w;
  }

  // Every word over n letters of length at most len, shortlex ordered.
  inline std::vector<word_type> all_words(std::size_t n, std::size_t len) {
    std::vector<word_type> out{{}};
    for (std::size_t b = 0; b < out.size(); ++b) {
      if (out[b].size() == len) {
        continue;
      }
      for (letter_type x = 0; x < n; ++x) {
        auto w = out[b];
        w.push_back(x);
        out.push_back(w);
      }
    }
    return out;
  }

  // Free reduction, written out here so the oracle does not lean on the
  // library.
  inline word_type freely_reduce(word_type const& w, std::vector<letter_type> const& inv) {
    word_type out;
    for (auto x : w) {
      if (!out.empty() && out.back() == inv[x]) {
        out.pop_back();
      } else {
        out.push_back(x);
      }
    }
    return out;
  }

}  // namespace oracle
