#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "autostruct/kb.hpp"
#include "support/oracles.hpp"

using namespace autostruct;

namespace {
  Presentation z() {
    return parse_presentation("generators: a A\n");
  }

  Presentation z2() {
    return parse_presentation("generators: a A b B\nrelation: b a = a b\n");
  }

  std::set<std::pair<std::string, std::string>> rule_strings(RuleSet const& rs) {
    std::set<std::pair<std::string, std::string>> out;
    for (auto const& r : rs.rules()) {
      out.emplace(rs.alphabet().print(r.lhs), rs.alphabet().print(r.rhs));
    }
    return out;
  }

  std::set<std::string> diff_strings(WordDifferenceSet const& wd) {
    std::set<std::string> out;
    for (auto const& d : wd.diffs()) {
      out.insert(wd.alphabet().print(d));
    }
    return out;
  }
}  // namespace

TEST_CASE("rules must decrease in shortlex order", "[kb]") {
  auto    p = z2();
  RuleSet rs(p.alphabet);
  CHECK_THROWS_AS(rs.add_rule(p.alphabet.parse("ab"), p.alphabet.parse("ba")),
                  std::invalid_argument);
  rs.add_rule(p.alphabet.parse("ba"), p.alphabet.parse("ab"));
  CHECK(rs.size() == 1);
}

TEST_CASE("completion of Z", "[kb]") {
  auto p = z();
  auto r = kb_complete(p);
  CHECK(r.halt == HaltReason::confluent);
  CHECK(rule_strings(r.rules) == std::set<std::pair<std::string, std::string>>{
                                     {"aA", "1"}, {"Aa", "1"}});
  CHECK(diff_strings(close_under_inversion(r.diffs, r.rules))
        == std::set<std::string>{"1", "a", "A"});
  CHECK(critical_pairs(r.rules).empty());
  auto const& a = p.alphabet;
  CHECK(a.print(r.rules.rewrite(a.parse("aaA"))) == "a");
  CHECK(r.rules.rewrite({}).empty());
}

TEST_CASE("completion of Z^2 against exponent counting", "[kb]") {
  auto p = z2();
  auto r = kb_complete(p);
  CHECK(r.halt == HaltReason::confluent);
  CHECK(rule_strings(r.rules)
        == std::set<std::pair<std::string, std::string>>{{"aA", "1"},
                                                         {"Aa", "1"},
                                                         {"bB", "1"},
                                                         {"Bb", "1"},
                                                         {"ba", "ab"},
                                                         {"bA", "Ab"},
                                                         {"Ba", "aB"},
                                                         {"BA", "AB"}});
  for (auto const& w : oracle::all_words(4, 6)) {
    auto nf = r.rules.rewrite(w);
    REQUIRE(nf == oracle::abelian_normal_form(oracle::exponents(w, 2)));
  }
  CHECK(p.alphabet.print(r.rules.rewrite(p.alphabet.parse("baB"))) == "a");
}

TEST_CASE("critical pairs", "[kb]") {
  auto    p = z2();
  auto    a = p.alphabet;
  RuleSet rs = inverse_rules(a);
  rs.add_rule(a.parse("ba"), a.parse("ab"));
  auto cps = critical_pairs(rs);
  // b a A: (ab)A -> a b A versus b(aA) -> b; so abA = b, i.e. bA = Ab
  bool found = false;
  for (auto [u, v] : cps) {
    rs.rewrite_in_place(u);
    rs.rewrite_in_place(v);
    found = found || (u == a.parse("abA") && v == a.parse("b"))
            || (v == a.parse("abA") && u == a.parse("b"));
  }
  CHECK(found);

  RuleSet single(a);
  single.add_rule(a.parse("ab"), a.parse("a"));
  CHECK(critical_pairs(single).empty());
}

TEST_CASE("word differences of single equations", "[kb]") {
  auto p  = z2();
  auto a  = p.alphabet;
  auto rs = kb_complete(p).rules;
  CHECK(diff_strings(extract_word_differences({{a.parse("ba"), a.parse("ab")}}, rs))
        == std::set<std::string>{"1", "aB"});
  auto w = a.parse("abBA");
  CHECK(diff_strings(extract_word_differences({{w, w}}, rs)) == std::set<std::string>{"1"});
  CHECK(diff_strings(extract_word_differences({{a.parse("aA"), {}}}, rs))
        == std::set<std::string>{"1", "A"});

  auto d = extract_word_differences({{a.parse("ba"), a.parse("ab")}}, rs);
  auto c = close_under_inversion(d, rs);
  CHECK(diff_strings(c) == std::set<std::string>{"1", "aB", "Ab"});
  CHECK(c.inverse_closed());
  CHECK(diff_strings(close_under_inversion(c, rs)) == diff_strings(c));

  // the oracle view of aB: its exponent vector
  CHECK(oracle::exponents(a.parse("aB"), 2) == std::vector<long>{1, -1});
}

TEST_CASE("small Fibonacci completions agree with coset enumeration", "[kb]") {
  for (unsigned n : {3u, 4u, 5u}) {
    auto p = fibonacci_presentation(n);
    auto r = kb_complete(p);
    REQUIRE(r.halt == HaltReason::confluent);
    oracle::ToddCoxeter tc(p);
    auto                order = tc.run();
    REQUIRE(order.has_value());
    // irreducible words are exactly the normal forms
    std::set<word_type>  forms;
    std::set<std::size_t> elements;
    for (auto const& w : oracle::all_words(p.alphabet.size(), 6)) {
      if (!r.rules.reducible(w)) {
        forms.insert(w);
        elements.insert(tc.element(w));
      }
      REQUIRE(tc.element(r.rules.rewrite(w)) == tc.element(w));
    }
    CHECK(forms.size() == *order);
    CHECK(elements.size() == *order);
  }
}

TEST_CASE("F(2,9) completion stabilizes", "[kb]") {
  auto p = fibonacci_presentation(9);
  auto r = kb_complete(p);
  CHECK(r.halt == HaltReason::stabilized);
  auto inv = close_under_inversion(r.diffs, r.rules);
  CHECK(inv.size() >= r.diffs.size());
  // every rule is orientation correct and none is reducible by another
  for (auto const& rule : r.rules.rules()) {
    REQUIRE(shortlex_less(rule.rhs, rule.lhs));
  }
  CHECK(!r.passes.empty());
}

TEST_CASE("rules files round trip", "[kb]") {
  auto p = fibonacci_presentation(4);
  auto r = kb_complete(p);
  std::stringstream io;
  write_rules(io, r.rules);
  auto back = read_rules(io, p.alphabet);
  CHECK(rule_strings(back) == rule_strings(r.rules));
  for (auto const& w : oracle::all_words(p.alphabet.size(), 4)) {
    REQUIRE(back.rewrite(w) == r.rules.rewrite(w));
  }
}
