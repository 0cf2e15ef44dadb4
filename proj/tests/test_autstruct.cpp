#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "autostruct/autstruct.hpp"
#include "autostruct/error.hpp"
#include "support/oracles.hpp"

using namespace autostruct;

namespace {
  Presentation z() {
    return parse_presentation("generators: a A\n");
  }

  Presentation z2() {
    return parse_presentation("generators: a A b B\nrelation: b a = a b\n");
  }

  AutomaticStructure const& structure(std::string const& key) {
    static std::map<std::string, AutomaticStructure> cache;
    auto it = cache.find(key);
    if (it == cache.end()) {
      Presentation p = key == "Z"    ? z()
                       : key == "Z2" ? z2()
                                     : fibonacci_presentation(std::stoi(key.substr(3)));
      it = cache.emplace(key, synthesize(p)).first;
    }
    return it->second;
  }

  std::set<std::pair<std::string, std::string>> pair_strings(
      Alphabet const&                                     a,
      std::vector<std::pair<word_type, word_type>> const& pairs) {
    std::set<std::pair<std::string, std::string>> out;
    for (auto const& [u, v] : pairs) {
      out.emplace(a.print(u), a.print(v));
    }
    return out;
  }
}  // namespace

TEST_CASE("difference machine of the identity alone is the diagonal", "[autstruct]") {
  auto              p = z2();
  WordDifferenceSet wd(p.alphabet);
  wd.add({});
  auto dm = build_wd_machine(wd, rule_reducer(kb_complete(p).rules));
  CHECK(dm.fsa.num_states() == 1);
  CHECK(dm.fsa.accepts_pair(p.alphabet.parse("abB"), p.alphabet.parse("abB")));
  CHECK_FALSE(dm.fsa.accepts_pair(p.alphabet.parse("ab"), p.alphabet.parse("ba")));
}

TEST_CASE("difference machines of Z and Z^2", "[autstruct]") {
  auto const& sz = structure("Z");
  auto        dz = build_wd_machine(sz.diffs, rule_reducer(sz.rules));
  auto const& a  = sz.presentation.alphabet;
  CHECK(dz.fsa.num_states() == 3);
  auto t = dz.fsa.target(1, dz.fsa.symbol(dz.fsa.pad(), 0));
  REQUIRE(t != kNoState);
  CHECK(dz.diffs[t - 1] == a.parse("a"));

  auto const& s2 = structure("Z2");
  auto        d2 = build_wd_machine(s2.diffs, rule_reducer(s2.rules));
  auto const& b  = s2.presentation.alphabet;
  auto        u  = d2.fsa.target(1, d2.fsa.symbol(b.parse("b")[0], b.parse("a")[0]));
  REQUIRE(u != kNoState);
  CHECK(d2.diffs[u - 1] == b.parse("aB"));
  // every transition is x^-1 d y in the group, by exponent counting
  for (state_type s = 1; s <= d2.fsa.num_states(); ++s) {
    for (symbol_type x = 0; x < d2.fsa.num_symbols(); ++x) {
      auto tt = d2.fsa.target(s, x);
      if (tt == kNoState) {
        continue;
      }
      auto      pr = d2.fsa.unpair(x);
      word_type w;
      if (pr.left != d2.fsa.pad()) {
        w.push_back(b.inverse(pr.left));
      }
      w.insert(w.end(), d2.diffs[s - 1].begin(), d2.diffs[s - 1].end());
      if (pr.right != d2.fsa.pad()) {
        w.push_back(pr.right);
      }
      REQUIRE(oracle::exponents(w, 2) == oracle::exponents(d2.diffs[tt - 1], 2));
    }
  }
}

TEST_CASE("word acceptors of Z and Z^2", "[autstruct]") {
  auto const& sz = structure("Z");
  CHECK(sz.verified);
  CHECK(sz.passes.size() == 1);
  CHECK(sz.acceptor.num_states() == 3);
  auto const& a = sz.presentation.alphabet;
  auto        t = trace(sz.acceptor, a.parse("aaa"));
  REQUIRE(t.states.size() == 4);
  CHECK(t.states[1] == t.states[2]);
  CHECK(t.states[2] == t.states[3]);
  CHECK(trace(sz.acceptor, a.parse("aA")).failed_at == std::optional<std::size_t>(1));

  auto const& s2 = structure("Z2");
  CHECK(s2.verified);
  CHECK(s2.acceptor.num_states() == 5);
  CHECK(enumerate(s2.acceptor, 1).size() == 5);
  std::set<std::vector<long>> seen;
  for (auto const& w : enumerate(s2.acceptor, 6)) {
    auto e = oracle::exponents(w, 2);
    REQUIRE(w == oracle::abelian_normal_form(e));
    REQUIRE(seen.insert(e).second);
  }
  CHECK(seen.size() == 85);  // lattice points with |x| + |y| <= 6
}

TEST_CASE("multipliers", "[autstruct]") {
  auto const& sz = structure("Z");
  auto const& a  = sz.presentation.alphabet;
  auto        Ma = label_component(sz.multiplier.fsa, 0);
  CHECK(Ma.accepts_pair({}, a.parse("a")));
  CHECK(Ma.accepts_pair(a.parse("a"), a.parse("aa")));
  CHECK(Ma.accepts_pair(a.parse("A"), {}));
  CHECK_FALSE(Ma.accepts_pair(a.parse("a"), {}));
  CHECK(language_equal(multiplier_component(sz.multiplier.fsa, kIdentityMark),
                       diagonal(sz.acceptor)));
  CHECK(language_equal(exists_project(Ma, Side::first), sz.acceptor));

  auto const& s2 = structure("Z2");
  for (letter_type g = 0; g < 4; ++g) {
    auto comp = label_component(s2.multiplier.fsa, g);
    for (auto const& [u, v] : enumerate_pairs(comp, 5)) {
      auto lhs = oracle::exponents(u, 2);
      auto rhs = oracle::exponents(v, 2);
      auto eg  = oracle::exponents({g}, 2);
      REQUIRE(rhs[0] - lhs[0] == eg[0]);
      REQUIRE(rhs[1] - lhs[1] == eg[1]);
      REQUIRE(u.size() + 1 >= v.size());
      REQUIRE(v.size() + 1 >= u.size());
    }
  }
}

TEST_CASE("partial correctness", "[autstruct]") {
  auto const& sz = structure("Z");
  CHECK(partial_correctness_check(sz.acceptor, sz.multiplier, sz.rules).ok());

  // drop aB from the Z^2 differences
  auto const&       s2 = structure("Z2");
  auto const&       a  = s2.presentation.alphabet;
  WordDifferenceSet pruned(a);
  for (auto const& d : s2.diffs.diffs()) {
    if (d != a.parse("aB")) {
      pruned.add(d);
    }
  }
  auto dm    = build_wd_machine(pruned, rule_reducer(s2.rules));
  auto W     = build_word_acceptor(dm);
  auto M     = build_multiplier(dm, W);
  auto check = partial_correctness_check(W, M, s2.rules, &dm);
  REQUIRE_FALSE(check.ok());
  bool proposes = false;
  for (auto const& f : check.failures) {
    for (auto const& d : f.new_diffs) {
      proposes = proposes || d == a.parse("aB");
    }
  }
  CHECK(proposes);
  CHECK(check.failures.front().letter == 0);
}

TEST_CASE("axiom checking", "[autstruct]") {
  auto const& sz = structure("Z");
  auto const& M  = sz.multiplier.fsa;
  CHECK(language_equal(compose(multiplier_component(M, 0), multiplier_component(M, 1)),
                       multiplier_component(M, kIdentityMark)));
  CHECK(language_equal(compose(multiplier_component(M, kIdentityMark), multiplier_component(M, 0)),
                       multiplier_component(M, 0)));
  CHECK(axiom_report(sz.acceptor, M, sz.presentation).ok);

  auto const& s3 = structure("fib3");
  CHECK(s3.verified);
  auto const& M3 = s3.multiplier.fsa;
  auto const& a  = s3.presentation.alphabet;
  auto        a1 = a.parse("a1")[0], a2 = a.parse("a2")[0], a3 = a.parse("a3")[0];
  CHECK(language_equal(compose(multiplier_component(M3, a1), multiplier_component(M3, a2)),
                       multiplier_component(M3, a3)));
  oracle::ToddCoxeter tc(s3.presentation);
  CHECK(tc.run() == std::optional<std::size_t>(8));
  CHECK(language_count(s3.acceptor) == Count{big_int(8)});

  // remove one accept label from the Z^2 multiplier
  auto const& s2 = structure("Z2");
  auto        bad = s2.multiplier.fsa;
  for (state_type s = 1; s <= bad.num_states(); ++s) {
    if (bad.label_contains(s, 0)) {
      auto l = bad.label(s);
      l.erase(std::find(l.begin(), l.end(), letter_type{0}));
      if (l.empty()) {
        bad.clear_label(s);
        bad.set_accepting(s, false);
      } else {
        bad.set_label(s, l);
      }
      break;
    }
  }
  CHECK_FALSE(axiom_report(s2.acceptor, bad, s2.presentation).ok);

  // the a-component also accepting (u, u) makes it two-valued
  auto twice = M;
  for (state_type s = 1; s <= twice.num_states(); ++s) {
    if (twice.label_contains(s, kIdentityMark)) {
      auto l = twice.label(s);
      l.push_back(0);
      std::sort(l.begin(), l.end());
      twice.set_label(s, l);
    }
  }
  auto rep = axiom_report(sz.acceptor, twice, sz.presentation);
  CHECK_FALSE(rep.ok);
  CHECK(std::any_of(rep.failures.begin(), rep.failures.end(),
                    [](auto const& f) { return f.find("single-valued") != std::string::npos; }));
}

TEST_CASE("minimal rules", "[autstruct]") {
  auto const& sz = structure("Z");
  auto        mz = minimal_rule_acceptor(sz);
  auto const& a  = sz.presentation.alphabet;
  CHECK(pair_strings(a, enumerate_pairs(mz.rules, 8))
        == std::set<std::pair<std::string, std::string>>{{"aA", "1"}, {"Aa", "1"}});
  std::set<std::string> dz;
  for (auto const& d : mz.diffs.diffs()) {
    dz.insert(a.print(d));
  }
  CHECK(dz == std::set<std::string>{"1", "a", "A"});

  auto const& s2 = structure("Z2");
  auto        m2 = minimal_rule_acceptor(s2);
  auto const& b  = s2.presentation.alphabet;
  std::set<std::pair<std::string, std::string>> expect;
  for (auto const& r : kb_complete(s2.presentation).rules.rules()) {
    expect.emplace(b.print(r.lhs), b.print(r.rhs));
  }
  CHECK(expect.size() == 8);
  CHECK(pair_strings(b, enumerate_pairs(m2.rules, 8)) == expect);

  AutomaticStructure unverified = sz;
  unverified.verified           = false;
  CHECK_THROWS_AS(minimal_rule_acceptor(unverified), NotVerified);
}

TEST_CASE("difference reduction reaches the normal form", "[autstruct]") {
  auto const& s  = structure("fib5");
  auto        dm = build_wd_machine(s.diffs, rule_reducer(s.rules));
  DiffReducer red(dm, s.acceptor);
  oracle::ToddCoxeter tc(s.presentation);
  REQUIRE(tc.run() == std::optional<std::size_t>(11));
  for (auto const& w : oracle::all_words(s.presentation.alphabet.size(), 4)) {
    auto r = red.reduce(w);
    REQUIRE(s.acceptor.accepts(r));
    REQUIRE(tc.element(r) == tc.element(w));
  }
}
