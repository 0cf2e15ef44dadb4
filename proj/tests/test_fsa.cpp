#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "autostruct/error.hpp"
#include "autostruct/fsa.hpp"
#include "autostruct/minimize.hpp"
#include "support/properties.hpp"

using namespace autostruct;

namespace {
  Alphabet just_a() {
    return Alphabet({"a", "A"}, {1, 0});
  }

  // a* over {a, A}
  Fsa a_star() {
    Fsa f(just_a(), AlphabetKind::single, 1);
    f.set_accepting(1, true);
    f.set_target(1, 0, 1);
    return f;
  }

  // (aa)* over {a, A}
  Fsa aa_star() {
    Fsa f(just_a(), AlphabetKind::single, 2);
    f.set_accepting(1, true);
    f.set_target(1, 0, 2);
    f.set_target(2, 0, 1);
    return f;
  }

  word_type aw(std::size_t n) {
    return word_type(n, 0);
  }
}  // namespace

TEST_CASE("determinize", "[fsa]") {
  Nfa n(just_a(), AlphabetKind::single, 2);
  n.set_initial(1);
  n.set_initial(2);
  n.set_accepting(1);
  n.set_accepting(2);
  n.add_transition(1, 0, 1);
  n.add_transition(1, 0, 2);
  n.add_transition(2, 0, 1);
  auto d = determinize(n);
  CHECK(d.num_states() <= 2);
  CHECK(language_equal(d, a_star()));

  std::mt19937_64 rng(7);
  auto            f = props::random_fsa(rng, just_a(), AlphabetKind::single);
  Nfa  m(just_a(), AlphabetKind::single, f.num_states());
  m.set_initial(1);
  for (state_type s = 1; s <= f.num_states(); ++s) {
    m.set_accepting(s, f.accepting(s));
    for (symbol_type x = 0; x < f.num_symbols(); ++x) {
      if (f.target(s, x) != kNoState) {
        m.add_transition(s, x, f.target(s, x));
      }
    }
  }
  CHECK(language_equal(determinize(m), f));
}

TEST_CASE("minimize", "[fsa]") {
  Fsa chain(just_a(), AlphabetKind::single, 5);
  chain.set_all_accepting();
  for (state_type s = 1; s < 5; ++s) {
    chain.set_target(s, 0, s + 1);
  }
  chain.set_target(5, 0, 5);
  auto m = minimize(chain);
  CHECK(m.num_states() == 1);
  CHECK(language_equal(m, a_star()));
}

TEST_CASE("minimize keeps differently labelled states apart", "[fsa]") {
  Fsa f(just_a(), AlphabetKind::single, 3);
  f.set_all_accepting();
  f.set_target(1, 0, 2);
  f.set_target(2, 0, 3);
  f.set_label_kind(LabelKind::letter_set);
  f.set_label(2, {0});
  auto m = minimize(f);
  CHECK(m.num_states() == 3);
}

TEST_CASE("external minimization matches the in-memory result", "[fsa]") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    auto            f = props::random_fsa(rng, props::small_alphabet(true), AlphabetKind::pair);
    MinimizeOptions tiny;
    tiny.external_threshold_bytes = 1;
    auto a = minimize(f);
    auto b = minimize(f, tiny);
    CHECK(props::dump(a) == props::dump(b));

    TableSpool spool(f.alphabet(), f.kind(), tiny);
    for (state_type s = 1; s <= f.num_states(); ++s) {
      spool.add_state(f.accepting(s));
    }
    std::vector<TableSpool::Edge> row;
    for (state_type s = 1; s <= f.num_states(); ++s) {
      row.clear();
      for (symbol_type x = 0; x < f.num_symbols(); ++x) {
        if (f.target(s, x) != kNoState) {
          row.emplace_back(x, f.target(s, x));
        }
      }
      spool.append_row(row);
    }
    CHECK(spool.spilled());
    CHECK(props::dump(spool.minimize(LabelKind::none, {{}})) == props::dump(a));
  }
}

TEST_CASE("complement", "[fsa]") {
  auto c = complement(a_star());
  CHECK_FALSE(c.accepts({}));
  CHECK_FALSE(c.accepts(aw(3)));
  CHECK(c.accepts({1}));
  CHECK(c.accepts({0, 1, 0}));
  CHECK(language_equal(complement(c), a_star()));

  Fsa empty(Alphabet({"a"}, {0}), AlphabetKind::single, 0);
  auto full = complement(empty);
  for (std::size_t n = 0; n < 5; ++n) {
    CHECK(full.accepts(aw(n)));
  }
}

TEST_CASE("intersect and language equality", "[fsa]") {
  auto i = intersect(a_star(), aa_star());
  CHECK(language_equal(i, aa_star()));
  CHECK(language_equal(intersect(aa_star(), aa_star()), aa_star()));
  CHECK_FALSE(language_equal(a_star(), aa_star()));

  // a* a and a a*
  Fsa x(just_a(), AlphabetKind::single, 2);
  x.set_target(1, 0, 2);
  x.set_target(2, 0, 2);
  x.set_accepting(2, true);
  Fsa y(just_a(), AlphabetKind::single, 3);
  y.set_target(1, 0, 2);
  y.set_target(2, 0, 3);
  y.set_target(3, 0, 3);
  y.set_accepting(2, true);
  y.set_accepting(3, true);
  CHECK(language_equal(x, y));
  CHECK_FALSE(language_difference(x, y).has_value());
  auto d = language_difference(a_star(), aa_star());
  REQUIRE(d.has_value());
  CHECK(d->size() == 1);

  Fsa other(Alphabet({"b", "B"}, {1, 0}), AlphabetKind::single, 1);
  CHECK_THROWS_AS(intersect(a_star(), other), AlphabetMismatch);
}

TEST_CASE("exists_project", "[fsa]") {
  Fsa diag(just_a(), AlphabetKind::pair, 1);
  diag.set_accepting(1, true);
  diag.set_target(1, diag.symbol(0, 0), 1);
  CHECK(language_equal(exists_project(diag, Side::first), a_star()));
  CHECK(language_equal(exists_project(diag, Side::second), a_star()));

  Fsa none(just_a(), AlphabetKind::pair, 0);
  CHECK(language_count(exists_project(none, Side::first)) == Count{big_int(0)});
}

TEST_CASE("compose", "[fsa]") {
  // (a^n, a^(n+1)) composed with itself gives (a^n, a^(n+2))
  Fsa s(just_a(), AlphabetKind::pair, 2);
  s.set_target(1, s.symbol(0, 0), 1);
  s.set_target(1, s.symbol(s.pad(), 0), 2);
  s.set_accepting(2, true);
  auto c = compose(s, s);
  CHECK(c.accepts_pair(aw(0), aw(2)));
  CHECK(c.accepts_pair(aw(3), aw(5)));
  CHECK_FALSE(c.accepts_pair(aw(3), aw(4)));
  CHECK(padding_well_formed(c));
}

TEST_CASE("counting, tracing and enumeration", "[fsa]") {
  Fsa z(just_a(), AlphabetKind::single, 3);
  z.set_all_accepting();
  z.set_target(1, 0, 2);
  z.set_target(1, 1, 3);
  z.set_target(2, 0, 2);
  z.set_target(3, 1, 3);
  CHECK(std::holds_alternative<Infinite>(language_count(z)));
  CHECK(count_by_length(z, 3) == std::vector<big_int>{1, 2, 2, 2});

  auto t = trace(z, {0, 0, 0});
  CHECK(t.states == std::vector<state_type>{1, 2, 2, 2});
  CHECK_FALSE(t.failed_at.has_value());
  auto bad = trace(z, {0, 1});
  REQUIRE(bad.failed_at.has_value());
  CHECK(*bad.failed_at == 1);

  auto words = enumerate(z, 2);
  CHECK(words == std::vector<word_type>{{}, {0}, {1}, {0, 0}, {1, 1}});

  Fsa eps(just_a(), AlphabetKind::single, 1);
  eps.set_accepting(1, true);
  CHECK(language_count(eps) == Count{big_int(1)});
  Fsa empty(just_a(), AlphabetKind::single, 0);
  CHECK(enumerate(empty, 4).empty());
}

TEST_CASE("fsa files round trip", "[fsa]") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 30; ++i) {
    auto f = props::random_fsa(rng, props::small_alphabet(i % 2 == 0),
                               i % 3 == 0 ? AlphabetKind::pair : AlphabetKind::single);
    if (i % 4 == 0) {
      f.set_label_kind(LabelKind::letter_set);
      f.set_label(1, {0, kIdentityMark});
    } else if (i % 4 == 1) {
      f.set_label_kind(LabelKind::word);
      f.set_label(1, {});
      if (f.num_states() > 1) {
        f.set_label(2, {0, 3 % static_cast<letter_type>(f.alphabet().size())});
      }
    }
    std::stringstream io;
    write_fsa(io, f, "t");
    std::string name;
    auto        g = read_fsa(io, &name);
    CHECK(name == "t");
    CHECK(props::dump(g) == props::dump(f));
  }
  std::istringstream junk("fsa x\nalphabet: single a A\nstates: nope\n");
  CHECK_THROWS_AS(read_fsa(junk), ParseError);
}

TEST_CASE("random automata property suite", "[fsa][property]") {
  auto st = props::run_suite(250, 20240517);
  CHECK(st.automata >= 1000);
  CHECK(st.failures.empty());
  for (auto const& f : st.failures) {
    UNSCOPED_INFO(f);
  }
}
