#pragma once

// Test-only brute-force verifiers: full enumeration of the permutation
// extreme points of a distortion core, bisection retention solving, and a
// deterministic random-portfolio generator. Everything here is guarded
// against factorial blowup and shares no code path with the production
// implementations it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "surplus/allocation.hpp"
#include "surplus/distortion.hpp"
#include "surplus/models.hpp"
#include "surplus/prob.hpp"

namespace surplus::oracle {

inline constexpr std::size_t kMaxEnumAtoms = 8;

struct ExtremePointSet {
  std::vector<Measure> measures;
  std::vector<std::vector<std::size_t>> permutations;  // generator per measure
};

/// For each permutation σ of the atoms, the measure giving atom σ(k) the
/// weight f(c_k) − f(c_{k−1}) with c_k the cumulative base probability along σ.
inline ExtremePointSet core_extreme_points(const ProbSpace& space, const Distortion& f) {
  f.require_valid();
  if (space.size() > kMaxEnumAtoms)
    throw std::invalid_argument("core_extreme_points: more than " +
                                std::to_string(kMaxEnumAtoms) + " atoms");
  std::vector<std::size_t> perm(space.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  ExtremePointSet result;
  do {
    std::vector<double> weights(space.size(), 0.0);
    long double cum = 0.0L;
    double prev = 0.0;
    for (std::size_t k = 0; k < perm.size(); ++k) {
      cum += space.prob(perm[k]);
      const double c = (k + 1 == perm.size()) ? 1.0 : static_cast<double>(cum);
      const double v = f(c);
      weights[perm[k]] = v - prev;
      prev = v;
    }
    result.measures.emplace_back(std::move(weights));
    result.permutations.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return result;
}

/// min over all permutation extreme points of E_Q[x]; the infimum over the
/// whole core is attained there.
inline double oracle_utility(const ProbSpace& space, const Distortion& f, const RandomVar& x) {
  const ExtremePointSet eps = core_extreme_points(space, f);
  double best = std::numeric_limits<double>::infinity();
  for (const Measure& q : eps.measures)
    best = std::min(best, expectation(space, x, q));
  return best;
}

/// Bisection on Φ(x) = E_q[(x−s)^+] to bracket width 1e-10, returning the
/// right endpoint (largest-solution semantics). No breakpoint structure.
inline double oracle_retention(const ProbSpace& space, const Measure& q, const RandomVar& s,
                               double target) {
  if (s.size() != space.size() || q.size() != space.size())
    throw std::invalid_argument("oracle_retention: dimension mismatch");
  if (!(target >= 0.0)) throw std::invalid_argument("oracle_retention: target must be >= 0");
  const auto phi = [&](double x) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < s.size(); ++i)
      acc += static_cast<long double>(q[i]) * std::max(x - s[i], 0.0);
    return static_cast<double>(acc);
  };
  double lo = 0.0;
  double hi = max_value(s) + target + 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid) <= target) lo = mid;
    else hi = mid;
  }
  return hi;
}

struct InstanceDims {
  std::size_t atoms = 4;
  std::size_t agents = 2;
  double tie_frequency = 0.25;
  bool with_premia = true;
};

struct RandomInstance {
  Portfolio portfolio;
  std::uint64_t seed = 0;
};

namespace detail {

/// Convex piecewise-linear distortion from sorted nonnegative slope draws.
inline Distortion random_convex_pwl(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_segments(2, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int m = n_segments(rng);
  std::vector<double> xs{0.0, 1.0};
  for (int i = 0; i < m - 1; ++i) xs.push_back(unit(rng));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> slopes(xs.size() - 1);
  for (double& v : slopes) v = unit(rng);
  if (unit(rng) < 0.3) slopes.front() = 0.0;  // flat start, expected-shortfall style
  std::sort(slopes.begin(), slopes.end());
  long double rise = 0.0L;
  for (std::size_t i = 0; i < slopes.size(); ++i) rise += slopes[i] * (xs[i + 1] - xs[i]);
  if (static_cast<double>(rise) <= 0.0) return Distortion::identity();
  std::vector<std::pair<double, double>> knots;
  knots.emplace_back(0.0, 0.0);
  long double y = 0.0L;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    y += slopes[i] * (xs[i + 1] - xs[i]) / static_cast<double>(rise);
    knots.emplace_back(xs[i + 1], i + 1 == slopes.size() ? 1.0 : static_cast<double>(y));
  }
  return Distortion::piecewise_linear(std::move(knots));
}

/// Piecewise-linear upper envelope: secant interpolation of max(f, g) on the
/// union of both knot sets plus a uniform grid. Convexity is preserved and
/// the result dominates both inputs pointwise (chords of convex functions lie
/// above them).
inline Distortion pwl_upper_envelope(const Distortion& f, const Distortion& g) {
  std::vector<double> xs;
  for (int k = 0; k <= 16; ++k) xs.push_back(k / 16.0);
  for (double x : f.knot_xs()) xs.push_back(x);
  for (double x : g.knot_xs()) xs.push_back(x);
  std::sort(xs.begin(), xs.end());
  // Merge near-coincident sample points; tiny segments make secant slopes
  // ill-conditioned.
  std::vector<double> merged{0.0};
  for (double x : xs)
    if (x - merged.back() >= 1e-6 && x <= 1.0 - 1e-6) merged.push_back(x);
  merged.push_back(1.0);
  xs = std::move(merged);
  std::vector<std::pair<double, double>> knots;
  knots.reserve(xs.size());
  for (double x : xs) knots.emplace_back(x, std::max(f(x), g(x)));
  knots.front().second = 0.0;
  knots.back().second = 1.0;
  return Distortion::piecewise_linear(std::move(knots));
}

}  // namespace detail

/// Deterministic random portfolio: positive normalized probabilities, claims
/// with controllable tie frequency, distortions ordered f_i ≤ f_r ≤ f_0 by
/// upper-envelope cascading, and (optionally) charged premia above both fair
/// floors.
inline RandomInstance random_instance(std::uint64_t seed, const InstanceDims& dims) {
  if (dims.atoms < 1 || dims.atoms > kMaxEnumAtoms)
    throw std::invalid_argument("random_instance: atoms must be in 1..8");
  if (dims.agents < 1 || dims.agents > 5)
    throw std::invalid_argument("random_instance: agents must be in 1..5");
  if (dims.tie_frequency < 0.0 || dims.tie_frequency > 1.0)
    throw std::invalid_argument("random_instance: tie frequency must be in [0,1]");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::string> atoms;
  std::vector<double> probs(dims.atoms);
  {
    long double total = 0.0L;
    for (std::size_t i = 0; i < dims.atoms; ++i) {
      atoms.push_back("w" + std::to_string(i + 1));
      probs[i] = 0.05 + unit(rng);
      total += probs[i];
    }
    for (double& p : probs) p /= static_cast<double>(total);
    // Re-normalize the largest entry so the sum is exactly 1.
    long double sum = 0.0L;
    for (double p : probs) sum += p;
    probs[std::max_element(probs.begin(), probs.end()) - probs.begin()] +=
        1.0 - static_cast<double>(sum);
  }
  ProbSpace space(atoms, probs);

  Portfolio pf{space, {}, {}, 0.0, std::nullopt, Distortion::identity(), std::nullopt, {}};
  for (std::size_t a = 0; a < dims.agents; ++a) {
    pf.agents.push_back("a" + std::to_string(a + 1));
    const double common = std::round(unit(rng) * 16.0) / 4.0;
    std::vector<double> values(dims.atoms);
    for (double& v : values) {
      if (unit(rng) < dims.tie_frequency) v = common;
      else v = std::round(unit(rng) * 16.0) / 4.0;
    }
    pf.claims.emplace_back(std::move(values));
  }
  pf.k0 = 0.25 + 2.0 * unit(rng);

  // Ordered distortion triple; mix analytic families with pwl envelopes.
  const double mode = unit(rng);
  Distortion f_i = Distortion::identity(), f_r = f_i, f_0 = f_i;
  if (mode < 0.3) {
    const double g0 = 1.0 + 2.0 * unit(rng);
    const double gr = g0 + 2.0 * unit(rng);
    const double gi = gr + 2.0 * unit(rng);
    f_0 = Distortion::power(g0);
    f_r = Distortion::power(gr);
    f_i = Distortion::power(gi);
  } else if (mode < 0.45) {
    const double a0 = 0.2 + 0.8 * unit(rng);
    const double ar = a0 * (0.3 + 0.7 * unit(rng));
    const double ai = ar * (0.3 + 0.7 * unit(rng));
    f_0 = Distortion::expected_shortfall(a0);
    f_r = Distortion::expected_shortfall(ar);
    f_i = Distortion::expected_shortfall(ai);
  } else {
    if (mode < 0.6) f_i = Distortion::power(1.5 + 3.0 * unit(rng));
    else if (mode < 0.75) f_i = Distortion::expected_shortfall(0.2 + 0.7 * unit(rng));
    else f_i = detail::random_convex_pwl(rng);
    f_r = detail::pwl_upper_envelope(f_i, detail::random_convex_pwl(rng));
    f_0 = detail::pwl_upper_envelope(f_r, detail::random_convex_pwl(rng));
  }
  pf.f0 = f_0;
  pf.fr = f_r;
  pf.fi.assign(dims.agents, f_i);

  if (dims.with_premia) {
    const PremiumVector pi = fair_premia(space, f_0, pf.claims);
    const PremiumVector pir = fair_premia(space, f_r, pf.claims);
    std::vector<double> premia(dims.agents);
    for (std::size_t i = 0; i < dims.agents; ++i) {
      const double floor = std::max(pi.per_agent[i], pir.per_agent[i]);
      const double bound = -choquet_utility(space, f_r, -pf.claims[i]);  // reinsurer premium cap
      const double headroom = std::max(bound - floor, 0.0);
      premia[i] = floor + unit(rng) * 1.15 * headroom;
    }
    pf.premia = std::move(premia);
  }

  return RandomInstance{std::move(pf), seed};
}

}  // namespace surplus::oracle
