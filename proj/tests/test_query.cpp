#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "autostruct/error.hpp"
#include "autostruct/query.hpp"
#include "support/oracles.hpp"

using namespace autostruct;

namespace {
  QueryStructure const& query(std::string const& key) {
    static std::map<std::string, QueryStructure> cache;
    auto it = cache.find(key);
    if (it == cache.end()) {
      Presentation p = key == "Z"    ? parse_presentation("generators: a A\n")
                       : key == "Z2" ? parse_presentation(
                                           "generators: a A b B\nrelation: b a = a b\n")
                                     : fibonacci_presentation(std::stoi(key.substr(3)));
      auto s = synthesize(p);
      REQUIRE(s.verified);
      auto mr = minimal_rule_acceptor(s);
      it      = cache.emplace(key, query_structure(s, &mr)).first;
    }
    return it->second;
  }
}  // namespace

TEST_CASE("reduction and the word problem", "[query]") {
  auto const& z2 = query("Z2");
  auto const& a  = z2.acceptor.alphabet();
  CHECK(reduce_word(z2, {}).empty());
  CHECK(a.print(reduce_word(z2, a.parse("baB"))) == "a");
  CHECK(word_problem(z2, a.parse("ab"), a.parse("ba")));
  CHECK_FALSE(word_problem(z2, a.parse("a"), a.parse("b")));
  for (auto const& w : oracle::all_words(4, 5)) {
    REQUIRE(reduce_word(z2, w) == oracle::abelian_normal_form(oracle::exponents(w, 2)));
  }

  auto const& z = query("Z");
  auto const& b = z.acceptor.alphabet();
  CHECK(word_problem(z, b.parse("aA"), {}));
}

TEST_CASE("element orders", "[query]") {
  auto const& z = query("Z");
  auto        r = element_order(z, z.acceptor.alphabet().parse("a"));
  CHECK(r.kind == OrderResult::Kind::infinite);
  REQUIRE(r.certificate.has_value());
  CHECK(certificate_valid(z.acceptor, *r.certificate));

  auto const& f5 = query("fib5");
  auto const& a  = f5.acceptor.alphabet();
  auto        o  = element_order(f5, a.parse("a1"));
  CHECK(o.kind == OrderResult::Kind::finite);
  CHECK(o.order == 11);
  CHECK(element_order(f5, {}).order == 1);
  CHECK(element_order(f5, a.parse("a1 A1")).order == 1);

  // F(2,5) is cyclic of order 11, so every non-identity element has order 11
  oracle::ToddCoxeter tc(fibonacci_presentation(5));
  REQUIRE(tc.run() == std::optional<std::size_t>(11));
  for (auto const& w : oracle::all_words(a.size(), 2)) {
    auto e = element_order(f5, w);
    REQUIRE(e.kind == OrderResult::Kind::finite);
    REQUIRE(e.order == (tc.element(w) == 0 ? 1 : 11));
  }

  auto u = element_order(f5, a.parse("a1"), 3);
  CHECK(u.kind == OrderResult::Kind::unknown);
  CHECK(u.budget == 3);
}

TEST_CASE("certificates are checked against the acceptor", "[query]") {
  auto const& z = query("Z");
  auto        r = element_order(z, z.acceptor.alphabet().parse("a"));
  REQUIRE(r.certificate.has_value());
  auto c = *r.certificate;
  c.states.back() += 7;
  CHECK_FALSE(certificate_valid(z.acceptor, c));
}

TEST_CASE("group order and growth", "[query]") {
  CHECK(group_order(query("fib3")) == Count{big_int(8)});
  CHECK(std::holds_alternative<Infinite>(group_order(query("Z"))));
  CHECK(growth_series(query("Z"), 3) == std::vector<big_int>{1, 2, 2, 2});
  CHECK(growth_series(query("Z2"), 3) == std::vector<big_int>{1, 4, 8, 12});
  auto    g = growth_series(query("fib5"), 12);
  big_int total = 0;
  for (auto const& x : g) {
    total += x;
  }
  CHECK(total == 11);
}

TEST_CASE("queries refuse unverified structures", "[query]") {
  auto q     = query("Z");
  q.verified = false;
  CHECK_THROWS_AS(reduce_word(q, {}), NotVerified);
  CHECK_THROWS_AS(group_order(q), NotVerified);
  CHECK_THROWS_AS(element_order(q, {0}), NotVerified);
}
