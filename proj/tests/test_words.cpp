#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "autostruct/error.hpp"
#include "autostruct/words.hpp"
#include "support/oracles.hpp"

using namespace autostruct;

namespace {
  Alphabet ab() {
    return Alphabet({"a", "A", "b", "B"}, {1, 0, 3, 2});
  }
}  // namespace

TEST_CASE("alphabet rejects non-involutions and duplicate names", "[words]") {
  CHECK_THROWS_AS(Alphabet({"a", "A"}, {0, 0}), ParseError);
  CHECK_THROWS_AS(Alphabet({"a", "a"}, {1, 0}), ParseError);
  auto a = ab();
  for (letter_type x = 0; x < a.size(); ++x) {
    CHECK(a.inverse(a.inverse(x)) == x);
  }
}

TEST_CASE("shortlex compare", "[words]") {
  auto a = ab();
  CHECK(shortlex_compare(a, a.parse("b"), a.parse("aa")) == std::strong_ordering::less);
  CHECK(shortlex_compare(a, a.parse("aAb"), a.parse("aAb"))
        == std::strong_ordering::equal);
  CHECK(shortlex_compare(a, a.parse("ab"), a.parse("aA")) == std::strong_ordering::greater);
  CHECK_THROWS_AS(shortlex_compare(a, word_type{7}, word_type{0}), AlphabetMismatch);
}

TEST_CASE("invert and free reduce", "[words]") {
  auto a = ab();
  CHECK(a.print(invert_word(a, a.parse("ab"))) == "BA");
  CHECK(invert_word(a, {}).empty());
  CHECK(a.print(invert_word(a, a.parse("aA"))) == "aA");
  CHECK(a.print(free_reduce(a, a.parse("aAb"))) == "b");
  CHECK(free_reduce(a, {}).empty());
  CHECK(free_reduce(a, a.parse("abBA")).empty());
}

TEST_CASE("word parsing and printing", "[words]") {
  auto f = fibonacci_presentation(9);
  auto const& a = f.alphabet;
  CHECK(a.parse("a1 a2") == a.parse("a1a2"));
  CHECK(a.parse("a1^-1") == a.parse("A1"));
  CHECK(a.parse("a1^3") == a.parse("a1 a1 a1"));
  CHECK(a.parse("1").empty());
  CHECK(a.print({}) == "1");
  CHECK(a.print(a.parse("a1 A9")) == "a1 A9");
  CHECK_THROWS_AS(a.parse("a10"), ParseError);
}

TEST_CASE("Fibonacci presentations", "[words]") {
  auto p9 = fibonacci_presentation(9);
  auto const& a = p9.alphabet;
  REQUIRE(p9.relations.size() == 9);
  CHECK(p9.relations.front().first == a.parse("a1 a2"));
  CHECK(p9.relations.front().second == a.parse("a3"));
  CHECK(p9.relations.back().first == a.parse("a9 a1"));
  CHECK(p9.relations.back().second == a.parse("a2"));
  CHECK(a.names()[0] == "a1");
  CHECK(a.names()[1] == "A1");

  auto p2 = fibonacci_presentation(2);
  auto const& b = p2.alphabet;
  REQUIRE(p2.relations.size() == 2);
  CHECK(p2.relations[0].first == b.parse("a1 a2"));
  CHECK(p2.relations[0].second == b.parse("a1"));
  CHECK(p2.relations[1].first == b.parse("a2 a1"));
  CHECK(p2.relations[1].second == b.parse("a2"));

  oracle::ToddCoxeter tc(fibonacci_presentation(5));
  CHECK(tc.run() == std::optional<std::size_t>(11));
  CHECK_THROWS_AS(fibonacci_presentation(1), std::invalid_argument);
}

TEST_CASE("presentation text round trip", "[words]") {
  auto p = parse_presentation(
      "# Z^2\n"
      "generators: a A b B\n"
      "relation: b a = a b\n");
  CHECK(p.alphabet.size() == 4);
  CHECK(p.alphabet.inverse(0) == 1);
  REQUIRE(p.relations.size() == 1);
  std::ostringstream out;
  write_presentation(out, p);
  auto q = parse_presentation(out.str());
  CHECK(q.alphabet == p.alphabet);
  CHECK(q.relations == p.relations);

  auto f = fibonacci_presentation(4);
  std::ostringstream fo;
  write_presentation(fo, f);
  CHECK(parse_presentation(fo.str()).relations == f.relations);
}

TEST_CASE("malformed presentations are parse errors", "[words]") {
  CHECK_THROWS_AS(parse_presentation("relation: a = b\n"), ParseError);
  CHECK_THROWS_AS(parse_presentation("generators: a A\nrelation: a c = a\n"), ParseError);
  CHECK_THROWS_AS(parse_presentation("generators: a A\nbogus line\n"), ParseError);
  CHECK_THROWS_AS(load_presentation("fib x"), std::exception);
}
