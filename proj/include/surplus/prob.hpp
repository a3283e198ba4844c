#pragma once

// Finite probability spaces, random variables, probability measures and
// comonotone orderings. Everything here is an immutable value type; all
// accumulation runs in long double.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace surplus {

// Absolute tolerance for comparisons on probabilities and monetary values.
inline constexpr double kValueTol = 1e-9;
// Tighter tolerance for total-mass and share-normalization checks.
inline constexpr double kMassTol = 1e-12;

/// Sample space with strictly positive atom probabilities summing to one.
class ProbSpace {
 public:
  ProbSpace(std::vector<std::string> atoms, std::vector<double> probs)
      : atoms_(std::move(atoms)), probs_(std::move(probs)) {
    if (atoms_.empty()) throw std::invalid_argument("ProbSpace: no atoms");
    if (atoms_.size() != probs_.size())
      throw std::invalid_argument("ProbSpace: atom/probability count mismatch");
    std::unordered_set<std::string> seen;
    long double total = 0.0L;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (!seen.insert(atoms_[i]).second)
        throw std::invalid_argument("ProbSpace: duplicate atom id '" + atoms_[i] + "'");
      if (!(probs_[i] > 0.0) || !std::isfinite(probs_[i]))
        throw std::invalid_argument("ProbSpace: atom '" + atoms_[i] +
                                    "' must have strictly positive probability");
      total += probs_[i];
    }
    if (std::fabs(static_cast<double>(total) - 1.0) > kMassTol)
      throw std::invalid_argument("ProbSpace: probabilities must sum to 1");
  }

  std::size_t size() const { return atoms_.size(); }
  const std::vector<std::string>& atoms() const { return atoms_; }
  const std::vector<double>& probs() const { return probs_; }
  double prob(std::size_t i) const { return probs_.at(i); }
  const std::string& atom(std::size_t i) const { return atoms_.at(i); }

  std::size_t index_of(const std::string& id) const {
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      if (atoms_[i] == id) return i;
    throw std::invalid_argument("ProbSpace: unknown atom id '" + id + "'");
  }

 private:
  std::vector<std::string> atoms_;
  std::vector<double> probs_;
};

/// One finite real value per atom (already discounted).
struct RandomVar {
  std::vector<double> values;

  RandomVar() = default;
  explicit RandomVar(std::vector<double> v) : values(std::move(v)) {
    for (double x : values)
      if (!std::isfinite(x)) throw std::invalid_argument("RandomVar: non-finite value");
  }

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }

  bool nonnegative(double tol = 0.0) const {
    return std::all_of(values.begin(), values.end(), [tol](double x) { return x >= -tol; });
  }
};

inline RandomVar constant_var(std::size_t n, double c) {
  return RandomVar(std::vector<double>(n, c));
}

inline void check_same_size(const RandomVar& x, const RandomVar& y, const char* what) {
  if (x.size() != y.size())
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

inline RandomVar operator+(const RandomVar& x, const RandomVar& y) {
  check_same_size(x, y, "RandomVar::operator+");
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = x[i] + y[i];
  return RandomVar(std::move(v));
}

inline RandomVar operator-(const RandomVar& x, const RandomVar& y) {
  check_same_size(x, y, "RandomVar::operator-");
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = x[i] - y[i];
  return RandomVar(std::move(v));
}

inline RandomVar operator-(const RandomVar& x) {
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = -x[i];
  return RandomVar(std::move(v));
}

inline RandomVar operator*(double a, const RandomVar& x) {
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a * x[i];
  return RandomVar(std::move(v));
}

inline RandomVar shift(const RandomVar& x, double a) {
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = x[i] + a;
  return RandomVar(std::move(v));
}

/// x ∧ a, atomwise.
inline RandomVar cap(const RandomVar& x, double a) {
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::min(x[i], a);
  return RandomVar(std::move(v));
}

/// (x − a)^+, atomwise.
inline RandomVar excess(const RandomVar& x, double a) {
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(x[i] - a, 0.0);
  return RandomVar(std::move(v));
}

inline RandomVar pos_part(const RandomVar& x) { return excess(x, 0.0); }

/// 1_{x > a}, atomwise.
inline RandomVar indicator_gt(const RandomVar& x, double a) {
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = x[i] > a ? 1.0 : 0.0;
  return RandomVar(std::move(v));
}

inline RandomVar hadamard(const RandomVar& x, const RandomVar& y) {
  check_same_size(x, y, "hadamard");
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = x[i] * y[i];
  return RandomVar(std::move(v));
}

inline RandomVar aggregate_sum(const std::vector<RandomVar>& xs) {
  if (xs.empty()) throw std::invalid_argument("aggregate_sum: empty claim list");
  RandomVar s = xs.front();
  for (std::size_t i = 1; i < xs.size(); ++i) s = s + xs[i];
  return s;
}

inline double min_value(const RandomVar& x) {
  if (x.values.empty()) throw std::invalid_argument("min_value: empty");
  return *std::min_element(x.values.begin(), x.values.end());
}

inline double max_value(const RandomVar& x) {
  if (x.values.empty()) throw std::invalid_argument("max_value: empty");
  return *std::max_element(x.values.begin(), x.values.end());
}

/// Probability measure on the atoms. Absolute continuity w.r.t. the ambient
/// space is automatic since every atom carries positive base probability.
struct Measure {
  std::vector<double> weights;

  Measure() = default;
  explicit Measure(std::vector<double> w) : weights(std::move(w)) {
    long double total = 0.0L;
    for (double& x : weights) {
      if (!std::isfinite(x)) throw std::invalid_argument("Measure: non-finite weight");
      if (x < 0.0) {
        if (x < -kMassTol) throw std::invalid_argument("Measure: negative weight");
        x = 0.0;  // rounding residue from distortion increments
      }
      total += x;
    }
    if (std::fabs(static_cast<double>(total) - 1.0) > kMassTol)
      throw std::invalid_argument("Measure: weights must sum to 1");
  }

  static Measure point_mass(std::size_t n, std::size_t at) {
    std::vector<double> w(n, 0.0);
    w.at(at) = 1.0;
    return Measure(std::move(w));
  }

  std::size_t size() const { return weights.size(); }
  double operator[](std::size_t i) const { return weights[i]; }
};

inline Measure base_measure(const ProbSpace& space) {
  return Measure(space.probs());
}

/// E_Q[x] = Σ_ω q(ω) x(ω).
inline double expectation(const ProbSpace& space, const RandomVar& x, const Measure& q) {
  if (x.size() != space.size() || q.size() != space.size())
    throw std::invalid_argument("expectation: dimension mismatch");
  long double acc = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i)
    acc += static_cast<long double>(q[i]) * x[i];
  return static_cast<double>(acc);
}

/// Q[x > t], strict inequality.
inline double survival(const ProbSpace& space, const RandomVar& x, double t, const Measure& q) {
  if (x.size() != space.size() || q.size() != space.size())
    throw std::invalid_argument("survival: dimension mismatch");
  long double acc = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > t) acc += q[i];
  return static_cast<double>(acc);
}

/// Atom permutation sorting a reference variable in descending order, with
/// maximal runs of equal reference values recorded as tie groups.
struct ComonotoneOrder {
  std::vector<std::size_t> order;  // atom indices, ref descending
  std::vector<std::pair<std::size_t, std::size_t>> tie_groups;  // [begin,end) into order

  bool has_nontrivial_ties() const {
    return std::any_of(tie_groups.begin(), tie_groups.end(),
                       [](const auto& g) { return g.second - g.first > 1; });
  }
};

/// Descending stable sort of ref (ties broken by original atom index). Values
/// within kValueTol of the group anchor count as tied, so rounding residue
/// from upstream arithmetic cannot split a genuine tie.
inline ComonotoneOrder comonotone_order(const ProbSpace& space, const RandomVar& ref) {
  if (ref.size() != space.size())
    throw std::invalid_argument("comonotone_order: dimension mismatch");
  ComonotoneOrder result;
  result.order.resize(space.size());
  std::iota(result.order.begin(), result.order.end(), std::size_t{0});
  std::stable_sort(result.order.begin(), result.order.end(),
                   [&ref](std::size_t a, std::size_t b) { return ref[a] > ref[b]; });
  std::size_t begin = 0;
  for (std::size_t k = 1; k <= result.order.size(); ++k) {
    if (k == result.order.size() ||
        ref[result.order[begin]] - ref[result.order[k]] > kValueTol) {
      result.tie_groups.emplace_back(begin, k);
      begin = k;
    }
  }
  return result;
}

/// Pairwise criterion: (x(a)−x(b))(y(a)−y(b)) ≥ 0 for all atom pairs.
inline bool is_comonotonic(const RandomVar& x, const RandomVar& y) {
  check_same_size(x, y, "is_comonotonic");
  for (std::size_t a = 0; a < x.size(); ++a)
    for (std::size_t b = a + 1; b < x.size(); ++b)
      if ((x[a] - x[b]) * (y[a] - y[b]) < 0.0) return false;
  return true;
}

}  // namespace surplus
