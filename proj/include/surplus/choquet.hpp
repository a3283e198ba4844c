#pragma once

// Coherent utility evaluation. Distortion (commonotonic) utilities go through
// the sorted-weights Choquet formula; general coherent utilities are minima
// over an explicit list of scenario measures. The distortion core is never
// materialized — it has factorially many extreme points.

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "surplus/distortion.hpp"
#include "surplus/prob.hpp"

namespace surplus {

/// u(x) = inf over the core of f∘P of E_Q[x]. Atoms are ranked by ascending
/// value; the atom at ascending rank k receives weight f̂(s_k) − f̂(s_{k−1})
/// with s_k the cumulative base probability. Ties share a group weight, so the
/// value does not depend on intra-group order.
inline double choquet_utility(const ProbSpace& space, const Distortion& f, const RandomVar& x) {
  f.require_valid();
  if (x.size() != space.size())
    throw std::invalid_argument("choquet_utility: dimension mismatch");
  // Descending order of −x is ascending order of x, ties intact.
  const ComonotoneOrder asc = comonotone_order(space, -x);
  long double utility = 0.0L;
  long double cum = 0.0L;
  double prev_dual = 0.0;  // f̂(0)
  const std::size_t n = space.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t atom = asc.order[k];
    cum += space.prob(atom);
    const double s = (k + 1 == n) ? 1.0 : static_cast<double>(cum);
    const double d = f.dual(s);
    utility += static_cast<long double>(d - prev_dual) * x[atom];
    prev_dual = d;
  }
  return static_cast<double>(utility);
}

struct ScenarioUtility {
  double value;
  std::size_t attaining;  // first index in the list achieving the minimum
};

/// min over an explicit measure list of E_Q[x].
inline ScenarioUtility scenario_utility(const ProbSpace& space,
                                        const std::vector<Measure>& measures,
                                        const RandomVar& x) {
  if (measures.empty())
    throw std::invalid_argument("scenario_utility: empty measure list");
  ScenarioUtility best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < measures.size(); ++i) {
    const double e = expectation(space, x, measures[i]);
    if (e < best.value) {
      best.value = e;
      best.attaining = i;
    }
  }
  return best;
}

/// Scenario set of a coherent utility: either the core of a distortion game
/// (kept symbolic) or an explicit finite list of measures.
class ScenarioSet {
 public:
  static ScenarioSet from_distortion(Distortion f) {
    f.require_valid();
    ScenarioSet s;
    s.distortion_ = std::move(f);
    return s;
  }

  static ScenarioSet from_measures(std::vector<Measure> measures) {
    if (measures.empty())
      throw std::invalid_argument("ScenarioSet: explicit list must be non-empty");
    ScenarioSet s;
    s.measures_ = std::move(measures);
    return s;
  }

  bool is_distortion() const { return distortion_.has_value(); }
  const Distortion& distortion() const {
    if (!distortion_) throw std::logic_error("ScenarioSet: not distortion-generated");
    return *distortion_;
  }
  const std::vector<Measure>& measures() const { return measures_; }

 private:
  ScenarioSet() = default;
  std::optional<Distortion> distortion_;
  std::vector<Measure> measures_;
};

class CoherentUtility {
 public:
  explicit CoherentUtility(ScenarioSet scenario) : scenario_(std::move(scenario)) {}

  double operator()(const ProbSpace& space, const RandomVar& x) const {
    if (scenario_.is_distortion())
      return choquet_utility(space, scenario_.distortion(), x);
    return scenario_utility(space, scenario_.measures(), x).value;
  }

  const ScenarioSet& scenario() const { return scenario_; }

 private:
  ScenarioSet scenario_;
};

}  // namespace surplus
