#include "doctest.h"

#include <random>

#include "test_support.hpp"
#include "tropsand/sandpile.hpp"

using namespace tropsand;
using tropsand::testing::CoefficientSeries;
using tropsand::testing::ninth_state;
using tropsand::testing::ninths;
using tropsand::testing::to_rational;

namespace {

Rational ninth(int k) { return Rational(k, 9); }

/// F(x) as the minimum over tropical monomials; independent of evaluate().
Rational monomial_min(const SandpileState& s, Coord x) {
  return CoefficientSeries::from_breaks(to_rational(s))(s.grid().value(x));
}

}  // namespace

TEST_CASE("initial state is the empty zero series") {
  const SandpileState s = initial_state(Grid(8));
  CHECK(s.empty());
  CHECK(is_valid(s));
  for (int k : {0, 4, 8}) CHECK(evaluate(s, Coord{k}) == Rational(0));
}

TEST_CASE("find_component") {
  const auto empty = initial_state(Grid(9));
  auto c = find_component(empty, Coord{4});
  REQUIRE(c);
  CHECK(c->lo == Coord{0});
  CHECK(c->hi == Coord{9});

  const auto s = ninth_state({{4, 1}, {5, 1}});
  c = find_component(s, Coord{3});
  REQUIRE(c);
  CHECK(c->lo == Coord{0});
  CHECK(c->hi == Coord{4});
  CHECK_FALSE(find_component(s, Coord{4}).has_value());

  CHECK_THROWS_AS(find_component(s, Coord{0}), std::invalid_argument);
  CHECK_THROWS_AS(find_component(s, Coord{9}), std::invalid_argument);
}

TEST_CASE("topple reproduces the four-step relaxation on ninths") {
  SandpileState s = initial_state(Grid(9));
  s = topple(s, Coord{4});
  CHECK(s == ninth_state({{4, 1}, {5, 1}}));
  s = topple(s, Coord{3});
  CHECK(s == ninth_state({{1, 1}, {3, 1}, {5, 1}}));
  s = topple(s, Coord{4});
  CHECK(s == ninth_state({{1, 1}, {4, 2}}));
  s = topple(s, Coord{3});
  CHECK(s == ninth_state({{2, 1}, {3, 1}, {4, 1}}));
}

TEST_CASE("topple on a break point is the identity") {
  const SandpileState s(Grid(2), {Break{Coord{1}, 2}});
  CHECK(topple(s, Coord{1}) == s);
}

TEST_CASE("topple at the midpoint of a component merges into multiplicity two") {
  const SandpileState s = topple(initial_state(Grid(2)), Coord{1});
  CHECK(s == SandpileState(Grid(2), {Break{Coord{1}, 2}}));
}

TEST_CASE("sweep") {
  const auto cfg = ninths({4, 3});
  auto [s1, changed1] = sweep(initial_state(Grid(9)), cfg);
  CHECK(changed1);
  CHECK(s1 == ninth_state({{1, 1}, {3, 1}, {5, 1}}));

  const auto fixed = ninth_state({{2, 1}, {3, 1}, {4, 1}});
  auto [s2, changed2] = sweep(fixed, cfg);
  CHECK_FALSE(changed2);
  CHECK(s2 == fixed);

  const SandpileState thirds(Grid(3), {Break{Coord{1}, 1}, Break{Coord{2}, 1}});
  auto [s3, changed3] = sweep(thirds, PointConfig(Grid(3), {Coord{1}}));
  CHECK_FALSE(changed3);
  CHECK(s3 == thirds);
}

TEST_CASE("relax") {
  SUBCASE("two points on ninths") {
    RelaxOptions opts;
    opts.trace = true;
    const RelaxResult r = relax(ninths({4, 3}), opts);
    CHECK(r.final_state == ninth_state({{2, 1}, {3, 1}, {4, 1}}));
    CHECK(r.sweeps == 2);
    REQUIRE(r.trace.size() == 4);
    CHECK(r.trace[0].point_index == 0);
    CHECK(r.trace[1].point_index == 1);
    CHECK(r.trace[2].state == ninth_state({{1, 1}, {4, 2}}));
  }
  SUBCASE("single point") {
    const RelaxResult r = relax(PointConfig(Grid(3), {Coord{1}}));
    CHECK(r.final_state ==
          SandpileState(Grid(3), {Break{Coord{1}, 1}, Break{Coord{2}, 1}}));
    CHECK(r.sweeps == 1);
  }
  SUBCASE("midpoint") {
    const RelaxResult r = relax(PointConfig(Grid(2), {Coord{1}}));
    CHECK(r.final_state == SandpileState(Grid(2), {Break{Coord{1}, 2}}));
    CHECK(r.sweeps == 1);
  }
  SUBCASE("guard trips with the current state attached") {
    RelaxOptions opts;
    opts.max_sweeps = 1;
    try {
      relax(ninths({4, 3}), opts);
      FAIL("expected GuardTripped");
    } catch (const GuardTripped& e) {
      CHECK(e.sweeps() == 2);
      CHECK(e.state() == ninth_state({{2, 1}, {3, 1}, {4, 1}}));
    }
    opts.max_sweeps = 2;
    CHECK(relax(ninths({4, 3}), opts).sweeps == 2);
  }
}

TEST_CASE("PointConfig rejects boundary and repeated points") {
  CHECK_THROWS_AS(PointConfig(Grid(4), {Coord{0}}), std::invalid_argument);
  CHECK_THROWS_AS(PointConfig(Grid(4), {Coord{4}}), std::invalid_argument);
  CHECK_THROWS_AS(PointConfig(Grid(4), {Coord{1}, Coord{2}, Coord{1}}),
                  std::invalid_argument);
  CHECK_NOTHROW(PointConfig(Grid(4), {Coord{1}, Coord{3}}));
}

TEST_CASE("fractional_q") {
  CHECK(fractional_q(ninths({4, 3})) == Coord{2});
  CHECK(fractional_q(PointConfig(Grid(4), {Coord{1}, Coord{3}})) == Coord{0});
  CHECK(fractional_q(PointConfig(Grid(3), {Coord{1}})) == Coord{2});
  // Sums far beyond 64 bits on the production grid.
  const Grid g;
  const std::int64_t big = g.denominator() - 1;
  std::vector<Coord> pts;
  for (int k = 0; k < 8; ++k) pts.push_back(Coord{big - k});
  // sum = 8D - (1 + 2 + ... + 8), so q = 36 / D
  CHECK(fractional_q(PointConfig(g, pts)) == Coord{36});
}

TEST_CASE("limit_state covers the three cases") {
  const PointConfig quarters(Grid(4), {Coord{1}, Coord{3}});
  CHECK(limit_case(quarters) == LimitCase::kIntegral);
  CHECK(limit_state(quarters) ==
        SandpileState(Grid(4), {Break{Coord{1}, 1}, Break{Coord{3}, 1}}));

  CHECK(limit_case(ninths({4, 3})) == LimitCase::kGeneric);
  CHECK(limit_state(ninths({4, 3})) == ninth_state({{2, 1}, {3, 1}, {4, 1}}));

  const PointConfig half(Grid(2), {Coord{1}});
  CHECK(limit_case(half) == LimitCase::kCoincident);
  CHECK(limit_state(half) == SandpileState(Grid(2), {Break{Coord{1}, 2}}));
}

TEST_CASE("evaluate") {
  const SandpileState thirds(Grid(6), {Break{Coord{2}, 1}, Break{Coord{4}, 1}});
  CHECK(evaluate(thirds, Coord{0}) == Rational(0));
  CHECK(evaluate(thirds, Coord{6}) == Rational(0));
  // Oracle: min(x, 1/3, 1 - x) at x = 1/2.
  CHECK(monomial_min(thirds, Coord{3}) == Rational(1, 3));
  CHECK(evaluate(thirds, Coord{3}) == Rational(1, 3));

  const auto s = ninth_state({{2, 1}, {3, 1}, {4, 1}});
  // Oracle: min(2x, x + 2/9, 5/9, 1 - x) at x = 3/9 is 5/9.
  CHECK(monomial_min(s, Coord{3}) == Rational(5, 9));
  CHECK(evaluate(s, Coord{3}) == Rational(5, 9));

  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const Grid g = tropsand::testing::random_grid(rng);
    const SandpileState r = tropsand::testing::random_reachable_state(rng, g);
    std::uniform_int_distribution<std::int64_t> coord(0, g.denominator());
    for (int k = 0; k < 10; ++k) {
      const Coord x{coord(rng)};
      CHECK(evaluate(r, x) == monomial_min(r, x));
    }
  }
}

TEST_CASE("is_valid") {
  CHECK(is_valid(initial_state()));
  CHECK(is_valid(ninth_state({{4, 1}, {5, 1}})));
  CHECK_FALSE(is_valid(SandpileState(Grid(3), {Break{Coord{1}, 1}})));
  // Multiplicity three is never produced and is rejected.
  CHECK_FALSE(is_valid(SandpileState(Grid(3), {Break{Coord{1}, 3}})));
  CHECK_FALSE(is_valid(ninth_state({{5, 1}, {4, 1}})));
  CHECK_FALSE(is_valid(ninth_state({{0, 1}, {9, 1}})));
}

TEST_CASE("boundary_slopes") {
  CHECK(boundary_slopes(initial_state()) == std::pair<std::int64_t, std::int64_t>{0, 0});
  const auto two = ninth_state({{4, 1}, {5, 1}});
  const auto three = ninth_state({{2, 1}, {3, 1}, {4, 1}});
  CHECK(boundary_slopes(two) == std::pair<std::int64_t, std::int64_t>{1, -1});
  CHECK(boundary_slopes(three) == std::pair<std::int64_t, std::int64_t>{2, -1});

  // Finite differences of evaluate at both ends.
  for (const auto& s : {two, three}) {
    const auto [s0, s1] = boundary_slopes(s);
    CHECK(evaluate(s, Coord{1}) - evaluate(s, Coord{0}) == Rational(s0, 9));
    CHECK(evaluate(s, Coord{9}) - evaluate(s, Coord{8}) == Rational(s1, 9));
    CHECK(s0 - s1 == s.total_multiplicity());
  }
  CHECK_THROWS_AS(boundary_slopes(SandpileState(Grid(3), {Break{Coord{1}, 1}})),
                  std::domain_error);
}

TEST_CASE("topple agrees with the coefficient-form operator") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 300; ++t) {
    const Grid g = tropsand::testing::random_grid(rng);
    const SandpileState s = tropsand::testing::random_reachable_state(rng, g, 8);
    std::uniform_int_distribution<std::int64_t> coord(1, g.denominator() - 1);
    const Coord p{coord(rng)};
    const auto oracle =
        CoefficientSeries::from_breaks(to_rational(s)).apply(g.value(p)).breaks();
    CHECK(to_rational(topple(s, p)) == oracle);
  }
}

TEST_CASE("relax of two points matches the coefficient-form replay") {
  CHECK(tropsand::testing::oracle_length(ninths({4, 3})) == 2);
  CHECK(tropsand::testing::oracle_length(ninths({3, 4})) == 3);
  CHECK(relax(ninths({3, 4})).sweeps == 3);

  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const Grid g = tropsand::testing::random_grid(rng);
    std::uniform_int_distribution<int> size(1, 4);
    const PointConfig cfg = tropsand::testing::random_config(rng, g, size(rng));
    CHECK(relax(cfg).sweeps == tropsand::testing::oracle_length(cfg));
  }
}
