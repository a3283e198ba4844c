#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "surplus/prob.hpp"
#include "test_util.hpp"

using namespace surplus;
using Catch::Approx;

TEST_CASE("ProbSpace rejects invalid constructions") {
  CHECK_THROWS_AS(ProbSpace({"a", "b"}, {0.5, 0.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(ProbSpace({"a", "b"}, {0.5, 0.0}), std::invalid_argument);   // zero atom
  CHECK_THROWS_AS(ProbSpace({"a", "b"}, {0.6, 0.6}), std::invalid_argument);   // sum > 1
  CHECK_THROWS_AS(ProbSpace({"a", "a"}, {0.5, 0.5}), std::invalid_argument);   // duplicate id
  CHECK_THROWS_AS(ProbSpace({}, {}), std::invalid_argument);
  CHECK_NOTHROW(ProbSpace({"a", "b"}, {0.5, 0.5}));
}

TEST_CASE("Measure validation") {
  CHECK_THROWS_AS(Measure({0.5, -0.2, 0.7}), std::invalid_argument);
  CHECK_THROWS_AS(Measure({0.5, 0.4}), std::invalid_argument);
  const Measure pm = Measure::point_mass(3, 1);
  CHECK(pm[0] == 0.0);
  CHECK(pm[1] == 1.0);
  // Weights may carry tiny negative rounding residue; they clamp to zero.
  const Measure clamped({1.0 + 1e-13, -1e-13});
  CHECK(clamped[1] == 0.0);
}

TEST_CASE("expectation on the reference fixture") {
  const ProbSpace space = testutil::w1_space();
  const RandomVar s = aggregate_sum(testutil::w1_claims());
  const Measure p = base_measure(space);
  // Direct sum oracle: (0 + 1 + 2 + 4) / 4.
  CHECK(expectation(space, s, p) == Approx(7.0 / 4.0).margin(1e-15));
}

TEST_CASE("expectation degenerate cases") {
  const ProbSpace space = testutil::w1_space();
  const Measure p = base_measure(space);
  CHECK(expectation(space, constant_var(4, 3.25), p) == Approx(3.25).margin(1e-15));
  const RandomVar x({5.0, -1.0, 2.0, 0.5});
  CHECK(expectation(space, x, Measure::point_mass(4, 2)) == Approx(2.0).margin(1e-15));
  CHECK_THROWS_AS(expectation(space, RandomVar({1.0, 2.0}), p), std::invalid_argument);
}

TEST_CASE("expectation is linear and bounded") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 50; ++t) {
    const ProbSpace space = testutil::random_space(rng, 2 + t % 6);
    const Measure p = base_measure(space);
    const RandomVar x = testutil::random_var(rng, space.size());
    const RandomVar y = testutil::random_var(rng, space.size());
    const double a = 1.7, b = -0.4;
    CHECK(expectation(space, a * x + b * y, p) ==
          Approx(a * expectation(space, x, p) + b * expectation(space, y, p)).margin(1e-12));
    const double e = expectation(space, x, p);
    CHECK(e >= min_value(x) - 1e-12);
    CHECK(e <= max_value(x) + 1e-12);
  }
}

TEST_CASE("survival on the reference fixture") {
  const ProbSpace space = testutil::w1_space();
  const RandomVar s = aggregate_sum(testutil::w1_claims());
  const Measure p = base_measure(space);
  CHECK(survival(space, s, 1.0, p) == Approx(0.5).margin(1e-15));  // strict: w3, w4
  CHECK(survival(space, s, -0.5, p) == 1.0);
  CHECK(survival(space, s, 4.0, p) == 0.0);
  CHECK(survival(space, s, 5.0, p) == 0.0);
}

TEST_CASE("expectation is linear in the measure") {
  std::mt19937_64 rng(2025);
  const ProbSpace space = testutil::random_space(rng, 5);
  const RandomVar x = testutil::random_var(rng, 5);
  const Measure a = base_measure(space);
  const Measure b = Measure::point_mass(5, 2);
  std::vector<double> mixed(5);
  for (std::size_t i = 0; i < 5; ++i) mixed[i] = 0.3 * a[i] + 0.7 * b[i];
  CHECK(expectation(space, x, Measure(mixed)) ==
        Approx(0.3 * expectation(space, x, a) + 0.7 * expectation(space, x, b)).margin(1e-12));
}

TEST_CASE("survival is right-continuous at the jump points") {
  const ProbSpace space = testutil::w1_space();
  const RandomVar s = aggregate_sum(testutil::w1_claims());
  const Measure p = base_measure(space);
  for (double v : {0.0, 1.0, 2.0, 4.0}) {
    CHECK(survival(space, s, v, p) == survival(space, s, v + 1e-12, p));
    CHECK(survival(space, s, v - 1e-12, p) > survival(space, s, v, p));
  }
}

TEST_CASE("survival is non-increasing and integrates to the expectation") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 30; ++t) {
    const ProbSpace space = testutil::random_space(rng, 2 + t % 5);
    const Measure p = base_measure(space);
    RandomVar x = testutil::random_var(rng, space.size(), 0.0, 5.0);
    double prev = 1.0;
    for (double u = 0.0; u <= 5.0; u += 0.125) {
      const double sv = survival(space, x, u, p);
      CHECK(sv <= prev + 1e-15);
      prev = sv;
    }
    // Breakpoint integral of the survival function equals E[x] for x >= 0.
    std::vector<double> vs = x.values;
    vs.push_back(0.0);
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < vs.size(); ++k)
      integral += (vs[k + 1] - vs[k]) * survival(space, x, vs[k], p);
    CHECK(integral == Approx(expectation(space, x, p)).margin(1e-10));
  }
}

TEST_CASE("comonotone_order on the reference fixture") {
  const ProbSpace space = testutil::w1_space();
  const RandomVar s = aggregate_sum(testutil::w1_claims());
  const ComonotoneOrder order = comonotone_order(space, s);
  CHECK(order.order == std::vector<std::size_t>{3, 2, 1, 0});
  CHECK_FALSE(order.has_nontrivial_ties());
  CHECK(order.tie_groups.size() == 4);
}

TEST_CASE("comonotone_order ties") {
  const ProbSpace space({"w1", "w2", "w3"}, {0.25, 0.25, 0.5});

  const ComonotoneOrder flat = comonotone_order(space, constant_var(3, 2.0));
  CHECK(flat.order == std::vector<std::size_t>{0, 1, 2});  // stable by atom index
  CHECK(flat.tie_groups.size() == 1);
  CHECK(flat.tie_groups[0] == std::pair<std::size_t, std::size_t>{0, 3});

  const ComonotoneOrder two = comonotone_order(space, RandomVar({5.0, 5.0, 1.0}));
  CHECK(two.order == std::vector<std::size_t>{0, 1, 2});
  CHECK(two.tie_groups[0] == std::pair<std::size_t, std::size_t>{0, 2});
  CHECK(two.tie_groups[1] == std::pair<std::size_t, std::size_t>{2, 3});
}

TEST_CASE("comonotone_order is invariant under strictly increasing transforms") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 40; ++t) {
    const ProbSpace space = testutil::random_space(rng, 2 + t % 6);
    RandomVar ref = testutil::random_var(rng, space.size());
    if (t % 3 == 0) ref.values[0] = ref.values[space.size() - 1];  // force a tie sometimes
    std::vector<double> mapped(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) mapped[i] = std::exp(0.5 * ref[i]) + 2.0;
    const ComonotoneOrder a = comonotone_order(space, ref);
    const ComonotoneOrder b = comonotone_order(space, RandomVar(mapped));
    CHECK(a.order == b.order);
    CHECK(a.tie_groups == b.tie_groups);
  }
}

TEST_CASE("is_comonotonic") {
  const RandomVar s({0.0, 1.0, 2.0, 4.0});
  for (double r : {0.5, 1.0, 2.5, 4.0}) {
    CHECK(is_comonotonic(cap(s, r), excess(s, r)));  // the retention split
  }
  CHECK_FALSE(is_comonotonic(s, -s));
  CHECK(is_comonotonic(RandomVar({1, 2, 3}), RandomVar({0, 0, 7})));
  CHECK(is_comonotonic(constant_var(4, 1.0), -s));  // constants pair with anything
  CHECK_THROWS_AS(is_comonotonic(s, RandomVar({1.0, 2.0})), std::invalid_argument);
}

TEST_CASE("comonotone pairs stay comonotone with their sum") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 60; ++t) {
    const auto [x, y] = testutil::comonotone_pair(rng, 2 + t % 6);
    REQUIRE(is_comonotonic(x, y));
    CHECK(is_comonotonic(x, x + y));
    CHECK(is_comonotonic(y, x + y));
  }
}

TEST_CASE("RandomVar arithmetic and validation") {
  CHECK_THROWS_AS(RandomVar({1.0, std::nan("")}), std::invalid_argument);
  const RandomVar x({1.0, -2.0, 3.0});
  CHECK(pos_part(x).values == std::vector<double>{1.0, 0.0, 3.0});
  CHECK(cap(x, 1.5).values == std::vector<double>{1.0, -2.0, 1.5});
  CHECK(excess(x, 1.0).values == std::vector<double>{0.0, 0.0, 2.0});
  CHECK(indicator_gt(x, 1.0).values == std::vector<double>{0.0, 0.0, 1.0});
  CHECK(hadamard(x, indicator_gt(x, 0.0)).values == std::vector<double>{1.0, 0.0, 3.0});
  CHECK(min_value(x) == -2.0);
  CHECK(max_value(x) == 3.0);
  CHECK_THROWS_AS(aggregate_sum({}), std::invalid_argument);
}
