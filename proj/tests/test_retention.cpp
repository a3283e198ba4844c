#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "surplus/allocation.hpp"
#include "surplus/oracle.hpp"
#include "surplus/retention.hpp"
#include "test_util.hpp"

using namespace surplus;
using Catch::Approx;

namespace {

RetentionProblem w1_problem(const Distortion& f, double target) {
  const ProbSpace space = testutil::w1_space();
  const RandomVar s = aggregate_sum(testutil::w1_claims());
  const Measure q = worst_case_measure(space, f, s).measure;
  return RetentionProblem{space, s, q, target};
}

}  // namespace

TEST_CASE("phi evaluation on the reference fixture") {
  const RetentionProblem pb = w1_problem(Distortion::power(2), 1.0);
  // cdf under Q0 steps 1/16 on [0,1) and 4/16 on [1,2).
  CHECK(phi_eval(pb, 2.0) == Approx(5.0 / 16.0).margin(1e-14));
  CHECK(phi_eval(pb, 0.0) == 0.0);
  CHECK(phi_eval(pb, 1.0) == Approx(1.0 / 16.0).margin(1e-14));
  CHECK(phi_eval(pb, 4.0) == Approx(23.0 / 16.0).margin(1e-14));
  CHECK_THROWS_AS(phi_eval(pb, -0.5), std::invalid_argument);
}

TEST_CASE("phi of a constant aggregate") {
  const ProbSpace space = testutil::w1_space();
  const RetentionProblem pb{space, constant_var(4, 2.0), base_measure(space), 0.0};
  CHECK(phi_eval(pb, 1.0) == 0.0);
  CHECK(phi_eval(pb, 2.0) == 0.0);
  CHECK(phi_eval(pb, 3.5) == Approx(1.5).margin(1e-15));
}

TEST_CASE("retention solve on the reference fixture") {
  SECTION("insurer measure, target k0 = 1") {
    const RetentionProblem pb = w1_problem(Distortion::power(2), 1.0);
    // Independent bisection first, then the frozen rational 29/9.
    const double bisected = oracle::oracle_retention(pb.space, pb.q, pb.s, 1.0);
    REQUIRE(bisected == Approx(29.0 / 9.0).margin(1e-9));
    const RetentionSolution sol = solve_retention(pb);
    CHECK(sol.R == Approx(29.0 / 9.0).margin(1e-12));
    CHECK(sol.pi_R == Approx(20.0 / 9.0).margin(1e-12));
    CHECK(sol.rho_R == Approx(49.0 / 144.0).margin(1e-12));
    CHECK(sol.exact);
    CHECK(sol.segment == 2);  // the [2, 4] piece
  }

  SECTION("reinsurer measure: solution beyond the largest claim") {
    const RetentionProblem pb = w1_problem(Distortion::power(3), 1.0);
    REQUIRE(oracle::oracle_retention(pb.space, pb.q, pb.s, 1.0) ==
            Approx(257.0 / 64.0).margin(1e-9));
    const RetentionSolution sol = solve_retention(pb);
    CHECK(sol.R == Approx(257.0 / 64.0).margin(1e-12));
    CHECK(sol.rho_R == 0.0);
    CHECK(sol.segment == 4);  // past every breakpoint
  }
}

TEST_CASE("retention with target zero") {
  const ProbSpace space = testutil::w1_space();
  const RandomVar s = aggregate_sum(testutil::w1_claims());

  SECTION("mass at zero gives R = 0") {
    const RetentionProblem pb = w1_problem(Distortion::power(2), 0.0);
    CHECK(solve_retention(pb).R == 0.0);
  }

  SECTION("zero-mass bottom atoms push R to the q-essential infimum") {
    // Expected shortfall at level 1/2 zeroes the two smallest-S atoms of Q0.
    const Measure q = worst_case_measure(space, Distortion::expected_shortfall(0.5), s).measure;
    REQUIRE(q[0] == 0.0);
    REQUIRE(q[1] == 0.0);
    const RetentionSolution sol = solve_retention(RetentionProblem{space, s, q, 0.0});
    CHECK(sol.R == Approx(2.0).margin(0.0));  // smallest value with positive q-mass
    CHECK(phi_eval(RetentionProblem{space, s, q, 0.0}, sol.R) == 0.0);
  }

  SECTION("constant aggregate returns the constant") {
    const RetentionProblem pb{space, constant_var(4, 2.5), base_measure(space), 0.0};
    CHECK(solve_retention(pb).R == Approx(2.5).margin(0.0));
  }

  SECTION("identically zero aggregate returns zero") {
    const RetentionProblem pb{space, constant_var(4, 0.0), base_measure(space), 0.0};
    CHECK(solve_retention(pb).R == 0.0);
  }
}

TEST_CASE("retention invariants on random problems") {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 80; ++t) {
    const ProbSpace space = testutil::random_space(rng, 2 + t % 7);
    RandomVar s = testutil::random_var(rng, space.size(), 0.0, 5.0);
    if (t % 4 == 0) s.values[0] = 0.0;
    const Distortion f = testutil::random_distortion(rng);
    const Measure q = worst_case_measure(space, f, s).measure;
    std::uniform_real_distribution<double> tgt(0.0, 4.0);
    const double target = tgt(rng);

    const RetentionProblem pb{space, s, q, target};
    const RetentionSolution sol = solve_retention(pb);

    // Round-trip and the defining identities.
    CHECK(phi_eval(pb, sol.R) == Approx(target).margin(1e-12));
    CHECK(sol.R - sol.pi_R == Approx(target).margin(1e-9));
    CHECK(sol.pi_R + sol.rho_R == Approx(expectation(space, s, q)).margin(1e-9));
    CHECK(sol.R >= -1e-12);

    // Agreement with the bisection oracle.
    CHECK(sol.R == Approx(oracle::oracle_retention(space, q, s, target)).margin(1e-8));
  }
}

TEST_CASE("phi is convex, non-decreasing and has cdf slopes") {
  std::mt19937_64 rng(103);
  for (int t = 0; t < 30; ++t) {
    const ProbSpace space = testutil::random_space(rng, 2 + t % 6);
    const RandomVar s = testutil::random_var(rng, space.size(), 0.0, 4.0);
    const Distortion f = testutil::random_distortion(rng);
    const Measure q = worst_case_measure(space, f, s).measure;
    const RetentionProblem pb{space, s, q, 0.0};

    double prev = 0.0;
    double prev_slope = -1.0;
    const double h = 1.0 / 64.0;
    for (double x = h; x <= 6.0; x += h) {
      const double value = phi_eval(pb, x);
      CHECK(value >= prev - 1e-12);
      const double slope = (value - prev) / h;
      CHECK(slope >= prev_slope - 1e-9);
      prev = value;
      prev_slope = slope;
    }

    // Between breakpoints the derivative is q(s <= x).
    for (double x : {0.33, 1.11, 2.47, 3.89, 5.01}) {
      bool near_break = false;
      for (double v : s.values)
        if (std::fabs(v - x) < 2e-3) near_break = true;
      if (near_break) continue;
      const double deriv = (phi_eval(pb, x + 1e-3) - phi_eval(pb, x)) / 1e-3;
      long double cdf = 0.0L;
      for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i] <= x) cdf += q[i];
      CHECK(deriv == Approx(static_cast<double>(cdf)).margin(1e-9));
    }
  }
}

TEST_CASE("phi grows with unit slope past the largest claim") {
  std::mt19937_64 rng(109);
  for (int t = 0; t < 10; ++t) {
    const ProbSpace space = testutil::random_space(rng, 3 + t % 5);
    const RandomVar s = testutil::random_var(rng, space.size(), 0.0, 4.0);
    const Measure q = worst_case_measure(space, testutil::random_distortion(rng), s).measure;
    const RetentionProblem pb{space, s, q, 0.0};
    const double es = expectation(space, s, q);
    for (double x : {10.0, 100.0, 1000.0}) {
      CHECK(phi_eval(pb, x) == Approx(x - es).margin(1e-9));
      CHECK(phi_eval(pb, x) / x == Approx(1.0).margin(es / x + 1e-12));
    }
  }
}

TEST_CASE("retention is monotone in the target") {
  std::mt19937_64 rng(107);
  for (int t = 0; t < 30; ++t) {
    const ProbSpace space = testutil::random_space(rng, 3 + t % 5);
    const RandomVar s = testutil::random_var(rng, space.size(), 0.0, 4.0);
    const Measure q = worst_case_measure(space, testutil::random_distortion(rng), s).measure;
    double prev = -1.0;
    for (double target = 0.0; target <= 3.0; target += 0.25) {
      const double r = solve_retention(RetentionProblem{space, s, q, target}).R;
      CHECK(r >= prev - 1e-12);
      prev = r;
    }
  }
}

TEST_CASE("retention rejects bad inputs") {
  const RetentionProblem pb = w1_problem(Distortion::power(2), -0.5);
  CHECK_THROWS_AS(solve_retention(pb), std::invalid_argument);
  const ProbSpace space = testutil::w1_space();
  const RetentionProblem neg{space, RandomVar({0, -1, 0, 0}), base_measure(space), 1.0};
  CHECK_THROWS_AS(solve_retention(neg), std::invalid_argument);
}
