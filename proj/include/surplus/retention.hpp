#pragma once

// Exact evaluation and inversion of the retention function
// Φ(x) = x − E_q[s∧x] = E_q[(x−s)^+], which is piecewise linear on finite
// spaces with slope q(s ≤ a) between breakpoints and slope 1 beyond max(s).

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "surplus/prob.hpp"

namespace surplus {

struct RetentionProblem {
  ProbSpace space;
  RandomVar s;       // aggregate claims, s ≥ 0
  Measure q;         // pricing measure
  double target;     // right-hand side, ≥ 0

  void check() const {
    if (s.size() != space.size() || q.size() != space.size())
      throw std::invalid_argument("RetentionProblem: dimension mismatch");
    if (!s.nonnegative())
      throw std::invalid_argument("RetentionProblem: aggregate must be nonnegative");
    if (!(target >= 0.0))
      throw std::invalid_argument("RetentionProblem: target must be nonnegative");
  }
};

struct RetentionSolution {
  double R = 0.0;
  double pi_R = 0.0;          // E_q[s∧R]
  double rho_R = 0.0;         // E_q[(s−R)^+]
  std::size_t segment = 0;    // index of the breakpoint segment holding R;
                              // equal to the breakpoint count when R > max(s)
  bool exact = false;         // closed-form segment inversion
};

/// Φ(x) for x ≥ 0.
inline double phi_eval(const RetentionProblem& problem, double x) {
  problem.check();
  if (x < 0.0) throw std::invalid_argument("phi_eval: x must be nonnegative");
  long double acc = 0.0L;
  for (std::size_t i = 0; i < problem.s.size(); ++i)
    acc += static_cast<long double>(problem.q[i]) * std::max(x - problem.s[i], 0.0);
  return static_cast<double>(acc);
}

/// Largest R with Φ(R) = target. Φ is inverted in closed form on the segment
/// containing the target; for target = 0 the right endpoint of the flat zero
/// segment (the q-essential infimum of s) is returned.
inline RetentionSolution solve_retention(const RetentionProblem& problem) {
  problem.check();
  const RandomVar& s = problem.s;
  const Measure& q = problem.q;

  std::vector<double> breakpoints(s.values);
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

  // cdf[k] = q(s ≤ breakpoints[k]) — the slope of Φ on [v_k, v_{k+1}).
  std::vector<double> cdf(breakpoints.size());
  {
    long double acc = 0.0L;
    for (std::size_t k = 0; k < breakpoints.size(); ++k) {
      for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i] == breakpoints[k]) acc += q[i];
      cdf[k] = (k + 1 == breakpoints.size()) ? 1.0 : static_cast<double>(acc);
    }
  }

  RetentionSolution sol;
  sol.exact = true;

  double R;
  std::size_t segment = 0;
  if (problem.target == 0.0) {
    // Right endpoint of {Φ = 0}: the first breakpoint carrying q-mass.
    std::size_t k = 0;
    while (k + 1 < breakpoints.size() && cdf[k] <= 0.0) ++k;
    R = breakpoints[k];
    segment = k;
  } else {
    // Φ at successive breakpoints until the target is bracketed.
    long double phi = 0.0L;  // Φ(breakpoints[0]) = 0 (zero slope below min s)
    std::size_t k = 0;
    bool found = false;
    for (; k + 1 < breakpoints.size(); ++k) {
      const long double next = phi + static_cast<long double>(cdf[k]) *
                                         (breakpoints[k + 1] - breakpoints[k]);
      if (static_cast<double>(next) >= problem.target) {
        R = breakpoints[k] + (problem.target - static_cast<double>(phi)) / cdf[k];
        segment = k;
        found = true;
        break;
      }
      phi = next;
    }
    if (!found) {
      // Beyond max(s) the slope is 1.
      R = breakpoints.back() + (problem.target - static_cast<double>(phi));
      segment = breakpoints.size();
    }
  }

  sol.R = R;
  sol.segment = segment;
  sol.pi_R = expectation(problem.space, cap(s, R), q);
  sol.rho_R = expectation(problem.space, excess(s, R), q);
  return sol;
}

}  // namespace surplus
