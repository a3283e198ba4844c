#pragma once

// Worst-case comonotone measure for aggregate claims and the resulting
// capital-allocation fair premia.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "surplus/choquet.hpp"
#include "surplus/distortion.hpp"
#include "surplus/prob.hpp"

namespace surplus {

/// Measure attaining sup over the core of f∘P of E_Q[s], adapted to the
/// comonotone order of s. It simultaneously maximizes E_Q[g(s)] for every
/// non-decreasing g (in particular s∧a and (s−a)^+).
struct WorstCaseMeasure {
  Measure measure;
  ComonotoneOrder order;
  Distortion distortion;
};

/// Atom at descending rank k gets weight f̂(c_k) − f̂(c_{k−1}); a tie group's
/// total weight is split across its atoms proportionally to base probability.
inline WorstCaseMeasure worst_case_measure(const ProbSpace& space, const Distortion& f,
                                           const RandomVar& s) {
  f.require_valid();
  if (s.size() != space.size())
    throw std::invalid_argument("worst_case_measure: dimension mismatch");
  ComonotoneOrder order = comonotone_order(space, s);
  std::vector<double> weights(space.size(), 0.0);
  long double cum = 0.0L;
  double prev_dual = 0.0;
  for (const auto& [begin, end] : order.tie_groups) {
    long double group_p = 0.0L;
    for (std::size_t k = begin; k < end; ++k) group_p += space.prob(order.order[k]);
    cum += group_p;
    const double c = (end == order.order.size()) ? 1.0 : static_cast<double>(cum);
    const double d = f.dual(c);
    const double group_weight = d - prev_dual;
    prev_dual = d;
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t atom = order.order[k];
      weights[atom] = group_weight * (space.prob(atom) / static_cast<double>(group_p));
    }
  }
  return WorstCaseMeasure{Measure(std::move(weights)), std::move(order), f};
}

inline void require_nonnegative_claims(const std::vector<RandomVar>& claims) {
  for (std::size_t i = 0; i < claims.size(); ++i)
    if (!claims[i].nonnegative())
      throw std::invalid_argument("claims[" + std::to_string(i) + "]: negative entry");
}

/// π_0 = −u(−S) = E_{Q0}[S], the minimal total premium.
inline double total_premium(const ProbSpace& space, const Distortion& f,
                            const std::vector<RandomVar>& claims) {
  require_nonnegative_claims(claims);
  const RandomVar s = aggregate_sum(claims);
  return -choquet_utility(space, f, -s);
}

struct PremiumVector {
  std::vector<double> per_agent;
  double total = 0.0;
};

/// π_i = E_{Q0}[X_i] under the worst-case measure for the aggregate; the
/// allocation exhausts the total premium.
inline PremiumVector fair_premia(const ProbSpace& space, const Distortion& f,
                                 const std::vector<RandomVar>& claims) {
  require_nonnegative_claims(claims);
  const RandomVar s = aggregate_sum(claims);
  const WorstCaseMeasure q0 = worst_case_measure(space, f, s);
  PremiumVector pv;
  pv.per_agent.reserve(claims.size());
  long double total = 0.0L;
  for (const RandomVar& x : claims) {
    const double pi = expectation(space, x, q0.measure);
    pv.per_agent.push_back(pi);
    total += pi;
  }
  pv.total = static_cast<double>(total);
  return pv;
}

/// Marginal-contribution premium −(u(−S − εX_i) − u(−S))/ε; converges to the
/// fair premium as ε ↓ 0 when the aggregate has distinct atom values.
inline double marginal_premium(const ProbSpace& space, const Distortion& f,
                               const std::vector<RandomVar>& claims, std::size_t agent,
                               double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("marginal_premium: epsilon must be > 0");
  if (agent >= claims.size()) throw std::invalid_argument("marginal_premium: bad agent index");
  require_nonnegative_claims(claims);
  const RandomVar s = aggregate_sum(claims);
  const double base = choquet_utility(space, f, -s);
  const double bumped = choquet_utility(space, f, -(s + epsilon * claims[agent]));
  return -(bumped - base) / epsilon;
}

}  // namespace surplus
