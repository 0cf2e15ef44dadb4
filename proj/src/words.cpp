#include "autostruct/words.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "autostruct/error.hpp"

namespace autostruct {

  namespace {
    std::string_view trim(std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
      }
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
      }
      return s;
    }

    std::vector<std::string> split_ws(std::string_view s) {
      std::vector<std::string> out;
      std::istringstream       in{std::string(s)};
      std::string              tok;
      while (in >> tok) {
        out.push_back(tok);
      }
      return out;
    }

    bool valid_name(std::string const& n) {
      if (n.empty() || !std::isalpha(static_cast<unsigned char>(n[0]))) {
        return false;
      }
      return std::all_of(n.begin(), n.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_'
               || c == '.';
      });
    }
  }  // namespace

  Alphabet::Alphabet(std::vector<std::string> names,
                     std::vector<letter_type> inverse)
      : names_(std::move(names)), inverse_(std::move(inverse)) {
    if (names_.size() != inverse_.size()) {
      throw ParseError("alphabet: every generator needs an inverse");
    }
    if (names_.size() >= 0xFFFF) {
      throw ParseError("alphabet: too many generators");
    }
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (!valid_name(names_[i])) {
        throw ParseError(fmt::format("alphabet: bad generator name '{}'",
                                     names_[i]));
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (names_[i] == names_[j]) {
          throw ParseError(
              fmt::format("alphabet: duplicate generator '{}'", names_[i]));
        }
      }
      if (inverse_[i] >= names_.size() || inverse_[inverse_[i]] != i) {
        throw ParseError(fmt::format(
            "alphabet: inverse of '{}' is not an involution", names_[i]));
      }
    }
  }

  int Alphabet::index(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == name) {
        return static_cast<int>(i);
      }
    }
    return -1;
  }

  bool Alphabet::contains(word_type const& w) const noexcept {
    return std::all_of(
        w.begin(), w.end(), [this](letter_type x) { return x < size(); });
  }

  word_type Alphabet::parse(std::string_view text) const {
    word_type   out;
    std::size_t pos = 0;
    auto        fail = [&](std::string_view why) {
      throw ParseError(fmt::format("word '{}': {}", text, why));
    };
    while (pos < text.size()) {
      char c = text[pos];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '*'
          || c == '.') {
        ++pos;
        continue;
      }
      if (c == '1') {
        // identity; only meaningful as a standalone token
        ++pos;
        continue;
      }
      std::size_t best = 0;
      int         which = -1;
      for (std::size_t i = 0; i < names_.size(); ++i) {
        auto const& n = names_[i];
        if (n.size() > best && text.substr(pos, n.size()) == n) {
          best  = n.size();
          which = static_cast<int>(i);
        }
      }
      if (which < 0) {
        fail(fmt::format("unknown generator at offset {}", pos));
      }
      pos += best;
      long power = 1;
      if (pos < text.size() && text[pos] == '^') {
        ++pos;
        std::size_t start = pos;
        if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
          ++pos;
        }
        while (pos < text.size()
               && std::isdigit(static_cast<unsigned char>(text[pos]))) {
          ++pos;
        }
        auto num = text.substr(start, pos - start);
        if (!num.empty() && num[0] == '+') {
          num.remove_prefix(1);
        }
        auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), power);
        if (ec != std::errc() || p != num.data() + num.size()) {
          fail("bad exponent");
        }
      }
      auto x = static_cast<letter_type>(which);
      if (power < 0) {
        x     = inverse_[x];
        power = -power;
      }
      out.insert(out.end(), static_cast<std::size_t>(power), x);
    }
    return out;
  }

  std::string Alphabet::print(word_type const& w) const {
    if (w.empty()) {
      return "1";
    }
    bool single = std::all_of(
        names_.begin(), names_.end(), [](auto const& n) { return n.size() == 1; });
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!single && i > 0) {
        out += ' ';
      }
      out += names_.at(w[i]);
    }
    return out;
  }

  std::strong_ordering shortlex_compare(Alphabet const&  a,
                                        word_type const& u,
                                        word_type const& v) {
    if (!a.contains(u) || !a.contains(v)) {
      throw AlphabetMismatch("shortlex_compare: letter outside the alphabet");
    }
    if (u.size() != v.size()) {
      return u.size() <=> v.size();
    }
    return u <=> v;
  }

  word_type invert_word(Alphabet const& a, word_type const& w) {
    word_type out(w.size());
    std::transform(
        w.rbegin(), w.rend(), out.begin(), [&a](letter_type x) { return a.inverse(x); });
    return out;
  }

  word_type free_reduce(Alphabet const& a, word_type const& w) {
    word_type out;
    out.reserve(w.size());
    for (letter_type x : w) {
      if (!out.empty() && out.back() == a.inverse(x)) {
        out.pop_back();
      } else {
        out.push_back(x);
      }
    }
    return out;
  }

  std::size_t Presentation::max_relator_length() const noexcept {
    std::size_t m = 2;
    for (auto const& [l, r] : relations) {
      m = std::max(m, l.size() + r.size());
    }
    return m;
  }

  Presentation fibonacci_presentation(unsigned n) {
    if (n < 2) {
      throw std::invalid_argument("fibonacci_presentation: n must be >= 2");
    }
    std::vector<std::string> names;
    std::vector<letter_type> inv;
    for (unsigned i = 1; i <= n; ++i) {
      names.push_back(fmt::format("a{}", i));
      names.push_back(fmt::format("A{}", i));
      inv.push_back(static_cast<letter_type>(2 * i - 1));
      inv.push_back(static_cast<letter_type>(2 * i - 2));
    }
    Presentation p{Alphabet(std::move(names), std::move(inv)), {}};
    auto gen = [n](unsigned i) { return static_cast<letter_type>(2 * (i % n)); };
    for (unsigned i = 0; i < n; ++i) {
      p.relations.push_back({{gen(i), gen(i + 1)}, {gen(i + 2)}});
    }
    return p;
  }

  Presentation parse_presentation(std::string_view text) {
    std::istringstream in{std::string(text)};
    return read_presentation(in);
  }

  Presentation read_presentation(std::istream& in) {
    std::vector<std::string>                           gens;
    std::vector<std::pair<std::string, std::string>>   inv_pairs;
    bool                                               have_inverses = false;
    std::vector<std::pair<std::string, std::string>>   rel_text;
    std::string                                        line;
    std::size_t                                        lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) {
        line.erase(hash);
      }
      auto body = trim(line);
      if (body.empty()) {
        continue;
      }
      auto colon = body.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(fmt::format("line {}: expected 'key: value'", lineno));
      }
      auto key   = trim(body.substr(0, colon));
      auto value = trim(body.substr(colon + 1));
      if (key == "generators") {
        if (!gens.empty()) {
          throw ParseError(fmt::format("line {}: generators given twice", lineno));
        }
        gens = split_ws(value);
        if (gens.empty()) {
          throw ParseError(fmt::format("line {}: no generators", lineno));
        }
      } else if (key == "inverses") {
        have_inverses = true;
        std::string_view rest = value;
        while (!rest.empty()) {
          auto comma = rest.find(',');
          auto item  = trim(rest.substr(0, comma));
          rest = comma == std::string_view::npos ? std::string_view{}
                                                 : rest.substr(comma + 1);
          if (item.empty()) {
            continue;
          }
          auto toks = split_ws(item);
          if (toks.size() == 1) {
            toks.push_back(toks[0]);
          }
          if (toks.size() != 2) {
            throw ParseError(
                fmt::format("line {}: inverse pairs are 'x X'", lineno));
          }
          inv_pairs.emplace_back(toks[0], toks[1]);
        }
      } else if (key == "relation") {
        auto eq = value.find('=');
        if (eq == std::string_view::npos) {
          throw ParseError(fmt::format("line {}: relation needs '='", lineno));
        }
        rel_text.emplace_back(std::string(trim(value.substr(0, eq))),
                              std::string(trim(value.substr(eq + 1))));
      } else {
        throw ParseError(fmt::format("line {}: unknown key '{}'", lineno, key));
      }
    }
    if (gens.empty()) {
      throw ParseError("presentation: missing 'generators:' line");
    }
    std::vector<letter_type> inv(gens.size(), 0xFFFF);
    auto find = [&](std::string const& n) -> letter_type {
      auto it = std::find(gens.begin(), gens.end(), n);
      if (it == gens.end()) {
        throw ParseError(fmt::format("presentation: unknown generator '{}'", n));
      }
      return static_cast<letter_type>(it - gens.begin());
    };
    if (have_inverses) {
      for (auto const& [x, y] : inv_pairs) {
        auto i = find(x), j = find(y);
        if ((inv[i] != 0xFFFF && inv[i] != j) || (inv[j] != 0xFFFF && inv[j] != i)) {
          throw ParseError(
              fmt::format("presentation: conflicting inverse for '{}'", x));
        }
        inv[i] = j;
        inv[j] = i;
      }
    } else {
      for (std::size_t i = 0; i < gens.size(); ++i) {
        std::string other = gens[i];
        char&       c     = other[0];
        c = std::isupper(static_cast<unsigned char>(c))
                ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
                : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        auto it = std::find(gens.begin(), gens.end(), other);
        if (it != gens.end()) {
          inv[i] = static_cast<letter_type>(it - gens.begin());
        }
      }
    }
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (inv[i] == 0xFFFF) {
        throw ParseError(
            fmt::format("presentation: generator '{}' has no inverse", gens[i]));
      }
    }
    Presentation p{Alphabet(std::move(gens), std::move(inv)), {}};
    for (auto const& [l, r] : rel_text) {
      p.relations.emplace_back(p.alphabet.parse(l), p.alphabet.parse(r));
    }
    return p;
  }

  void write_presentation(std::ostream& out, Presentation const& p) {
    auto const& a = p.alphabet;
    out << "generators:";
    for (auto const& n : a.names()) {
      out << ' ' << n;
    }
    out << "\ninverses:";
    bool first = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
      auto j = a.inverse(static_cast<letter_type>(i));
      if (j < i) {
        continue;
      }
      out << (first ? " " : ", ") << a.name(static_cast<letter_type>(i)) << ' '
          << a.name(j);
      first = false;
    }
    out << '\n';
    for (auto const& [l, r] : p.relations) {
      out << "relation: " << a.print(l) << " = " << a.print(r) << '\n';
    }
  }

  Presentation load_presentation(std::string const& input) {
    auto s = trim(input);
    if (s.substr(0, 3) == "fib") {
      auto        rest = trim(s.substr(3));
      unsigned    n    = 0;
      auto [p, ec]     = std::from_chars(rest.data(), rest.data() + rest.size(), n);
      if (ec == std::errc() && p == rest.data() + rest.size() && !rest.empty()) {
        if (n < 2) {
          throw ParseError("fib n: n must be at least 2");
        }
        return fibonacci_presentation(n);
      }
    }
    std::ifstream in{std::string(s)};
    if (!in) {
      throw ParseError(fmt::format("cannot open presentation '{}'", s));
    }
    return read_presentation(in);
  }

}  // namespace autostruct
