#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "autostruct/error.hpp"
#include "autostruct/fsa.hpp"

namespace autostruct {

  namespace {
    constexpr char const* kPad = "_";

    std::string symbol_name(Fsa const& f, symbol_type a) {
      auto const& al = f.alphabet();
      if (f.kind() == AlphabetKind::single) {
        return al.name(static_cast<letter_type>(a));
      }
      auto ps   = f.unpair(a);
      auto side = [&](letter_type x) {
        return x == f.pad() ? std::string(kPad) : al.name(x);
      };
      return side(ps.left) + "," + side(ps.right);
    }

    std::string label_text(Fsa const& f, word_type const& l) {
      std::string out;
      for (auto x : l) {
        out += ' ';
        out += x == kIdentityMark ? std::string("1") : f.alphabet().name(x);
      }
      if (l.empty()) {
        out = " 1";
      }
      return out;
    }

    std::vector<std::string> tokens(std::string const& s) {
      std::istringstream       in(s);
      std::vector<std::string> out;
      std::string              t;
      while (in >> t) {
        out.push_back(t);
      }
      return out;
    }

    [[noreturn]] void bad(std::size_t line, std::string const& why) {
      throw ParseError(fmt::format("fsa line {}: {}", line, why));
    }
  }  // namespace

  void write_fsa(std::ostream& out, Fsa const& f, std::string const& name) {
    out << "fsa " << name << '\n';
    out << "alphabet: " << (f.kind() == AlphabetKind::single ? "single" : "pair");
    for (auto const& n : f.alphabet().names()) {
      out << ' ' << n;
    }
    out << "  pad: " << kPad << '\n';
    out << "inverses:";
    for (std::size_t i = 0; i < f.alphabet().size(); ++i) {
      out << ' ' << f.alphabet().name(f.alphabet().inverse(static_cast<letter_type>(i)));
    }
    out << '\n';
    out << "states: " << f.num_states() << "  initial: " << f.initial() << '\n';
    out << "accepting:";
    if (f.num_states() > 0 && f.all_accepting()) {
      out << " all";
    } else {
      for (state_type s = 1; s <= f.num_states(); ++s) {
        if (f.accepting(s)) {
          out << ' ' << s;
        }
      }
    }
    out << '\n';
    if (f.label_kind() != LabelKind::none) {
      out << "labelkind: " << (f.label_kind() == LabelKind::word ? "word" : "set")
          << '\n';
      for (state_type s = 1; s <= f.num_states(); ++s) {
        if (f.has_label(s)) {
          out << "labels: " << s << ':' << label_text(f, f.label(s)) << '\n';
        }
      }
    }
    for (state_type s = 1; s <= f.num_states(); ++s) {
      auto const* row = f.row(s);
      for (symbol_type a = 0; a < f.num_symbols(); ++a) {
        if (row[a] != kNoState) {
          out << "t " << s << ' ' << symbol_name(f, a) << ' ' << row[a] << '\n';
        }
      }
    }
    out << "end\n";
  }

  Fsa read_fsa(std::istream& in, std::string* name) {
    std::string              line;
    std::size_t              lineno = 0;
    std::vector<std::string> names;
    std::vector<std::string> inverse_names;
    AlphabetKind             kind = AlphabetKind::single;
    Fsa                      f;
    bool                     have_alphabet = false, have_states = false, ended = false;
    LabelKind                lk = LabelKind::none;

    auto build = [&]() {
      std::vector<letter_type> inv(names.size());
      for (std::size_t i = 0; i < names.size(); ++i) {
        auto it = std::find(names.begin(), names.end(),
                            inverse_names.empty() ? names[i] : inverse_names.at(i));
        if (it == names.end()) {
          bad(lineno, "unknown inverse name");
        }
        inv[i] = static_cast<letter_type>(it - names.begin());
      }
      return Alphabet(names, inv);
    };

    auto letter = [&](std::string const& t) -> letter_type {
      if (t == kPad) {
        return static_cast<letter_type>(names.size());
      }
      auto it = std::find(names.begin(), names.end(), t);
      if (it == names.end()) {
        bad(lineno, fmt::format("unknown letter '{}'", t));
      }
      return static_cast<letter_type>(it - names.begin());
    };

    while (!ended && std::getline(in, line)) {
      ++lineno;
      auto tok = tokens(line);
      if (tok.empty()) {
        continue;
      }
      auto const& k = tok[0];
      if (k == "fsa") {
        if (name != nullptr) {
          *name = tok.size() > 1 ? tok[1] : "";
        }
      } else if (k == "alphabet:") {
        if (tok.size() < 2 || (tok[1] != "single" && tok[1] != "pair")) {
          bad(lineno, "alphabet kind must be single or pair");
        }
        kind = tok[1] == "single" ? AlphabetKind::single : AlphabetKind::pair;
        for (std::size_t i = 2; i < tok.size(); ++i) {
          if (tok[i] == "pad:") {
            break;
          }
          names.push_back(tok[i]);
        }
        have_alphabet = true;
      } else if (k == "inverses:") {
        inverse_names.assign(tok.begin() + 1, tok.end());
        if (inverse_names.size() != names.size()) {
          bad(lineno, "inverses must list one name per letter");
        }
      } else if (k == "states:") {
        if (!have_alphabet) {
          bad(lineno, "states before alphabet");
        }
        try {
          f = Fsa(build(), kind, static_cast<state_type>(std::stoul(tok.at(1))));
        } catch (ParseError const&) {
          throw;
        } catch (std::exception const&) {
          bad(lineno, "bad state count");
        }
        have_states = true;
      } else if (k == "accepting:") {
        if (!have_states) {
          bad(lineno, "accepting before states");
        }
        if (tok.size() == 2 && tok[1] == "all") {
          f.set_all_accepting();
        } else {
          for (std::size_t i = 1; i < tok.size(); ++i) {
            auto s = std::stoul(tok[i]);
            if (s == 0 || s > f.num_states()) {
              bad(lineno, "accepting state out of range");
            }
            f.set_accepting(static_cast<state_type>(s), true);
          }
        }
      } else if (k == "labelkind:") {
        if (!have_states || tok.size() != 2) {
          bad(lineno, "bad labelkind line");
        }
        lk = tok[1] == "word" ? LabelKind::word : LabelKind::letter_set;
        f.set_label_kind(lk);
      } else if (k == "labels:") {
        if (lk == LabelKind::none || tok.size() < 2 || tok[1].back() != ':') {
          bad(lineno, "bad labels line");
        }
        auto      s = std::stoul(tok[1].substr(0, tok[1].size() - 1));
        word_type l;
        for (std::size_t i = 2; i < tok.size(); ++i) {
          if (tok[i] == "1") {
            if (lk == LabelKind::letter_set) {
              l.push_back(kIdentityMark);
            }
          } else {
            l.push_back(letter(tok[i]));
          }
        }
        if (s == 0 || s > f.num_states()) {
          bad(lineno, "label state out of range");
        }
        f.set_label(static_cast<state_type>(s), std::move(l));
      } else if (k == "t") {
        if (!have_states || tok.size() != 4) {
          bad(lineno, "transition lines are 't <state> <symbol> <state>'");
        }
        auto        s = std::stoul(tok[1]);
        auto        t = std::stoul(tok[3]);
        symbol_type a = 0;
        if (kind == AlphabetKind::single) {
          a = letter(tok[2]);
          if (a >= names.size()) {
            bad(lineno, "padding in a single-alphabet automaton");
          }
        } else {
          auto comma = tok[2].find(',');
          if (comma == std::string::npos) {
            bad(lineno, "pair symbols are written x,y");
          }
          auto x = letter(tok[2].substr(0, comma));
          auto y = letter(tok[2].substr(comma + 1));
          if (x == names.size() && y == names.size()) {
            bad(lineno, "(pad,pad) is not a symbol");
          }
          a = f.symbol(x, y);
        }
        if (s == 0 || s > f.num_states() || t > f.num_states()) {
          bad(lineno, "transition state out of range");
        }
        f.set_target(static_cast<state_type>(s), a, static_cast<state_type>(t));
      } else if (k == "end") {
        ended = true;
      } else {
        bad(lineno, fmt::format("unknown record '{}'", k));
      }
    }
    if (!have_states || !ended) {
      throw ParseError("fsa: truncated automaton");
    }
    return f;
  }

  void write_fsa_file(std::string const& path, Fsa const& f, std::string const& name) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
      throw Error(fmt::format("cannot write '{}'", path));
    }
    write_fsa(out, f, name);
    if (!out) {
      throw Error(fmt::format("writing '{}' failed", path));
    }
  }

  Fsa read_fsa_file(std::string const& path, std::string* name) {
    std::ifstream in(path);
    if (!in) {
      throw ParseError(fmt::format("cannot open '{}'", path));
    }
    return read_fsa(in, name);
  }

}  // namespace autostruct
