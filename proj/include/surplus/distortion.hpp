#pragma once

// Convex distortion functions f : [0,1] -> [0,1] with f(0)=0, f(1)=1.
// Each one induces a commonotonic coherent utility whose scenario set is the
// core of the convex game f∘P.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <charconv>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace surplus {

struct DistortionValidation {
  bool ok = true;
  std::vector<std::string> issues;

  void fail(std::string msg) {
    ok = false;
    issues.push_back(std::move(msg));
  }
};

class Distortion {
 public:
  enum class Family { Power, ExpectedShortfall, PiecewiseLinear };

  /// f(x) = x^gamma, gamma >= 1.
  static Distortion power(double gamma) {
    Distortion d;
    d.family_ = Family::Power;
    d.param_ = gamma;
    return d;
  }

  /// f(x) = max(0, (x - (1-alpha)) / alpha); alpha = 1 degenerates to the
  /// identity (plain expectation).
  static Distortion expected_shortfall(double alpha) {
    Distortion d;
    d.family_ = Family::ExpectedShortfall;
    d.param_ = alpha;
    return d;
  }

  static Distortion piecewise_linear(std::vector<std::pair<double, double>> knots) {
    Distortion d;
    d.family_ = Family::PiecewiseLinear;
    d.knots_ = std::move(knots);
    return d;
  }

  static Distortion identity() { return power(1.0); }

  Family family() const { return family_; }
  double param() const { return param_; }
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

  /// f(x). Arguments are clamped into [0,1] to absorb cumulative-sum residue.
  double operator()(double x) const {
    x = std::clamp(x, 0.0, 1.0);
    switch (family_) {
      case Family::Power:
        return std::pow(x, param_);
      case Family::ExpectedShortfall: {
        if (param_ == 1.0) return x;
        return std::max(0.0, (x - (1.0 - param_)) / param_);
      }
      case Family::PiecewiseLinear:
        return eval_pwl(x);
    }
    return x;  // unreachable
  }

  /// Dual distortion f̂(x) = 1 − f(1−x); concave, weights worst-case measures.
  double dual(double x) const { return 1.0 - (*this)(1.0 - x); }

  DistortionValidation validate() const {
    DistortionValidation report;
    switch (family_) {
      case Family::Power:
        if (!(param_ >= 1.0) || !std::isfinite(param_))
          report.fail("power exponent must be >= 1");
        break;
      case Family::ExpectedShortfall:
        if (!(param_ > 0.0) || !(param_ <= 1.0))
          report.fail("expected-shortfall level must lie in (0, 1]");
        break;
      case Family::PiecewiseLinear:
        validate_pwl(report);
        break;
    }
    return report;
  }

  bool is_valid() const { return validate().ok; }

  void require_valid() const {
    auto report = validate();
    if (!report.ok)
      throw std::invalid_argument("invalid distortion: " + report.issues.front());
  }

  /// Interior x-coordinates where the function can kink; used to seed grids.
  std::vector<double> knot_xs() const {
    std::vector<double> xs;
    switch (family_) {
      case Family::Power:
        break;
      case Family::ExpectedShortfall:
        if (param_ < 1.0) xs.push_back(1.0 - param_);
        break;
      case Family::PiecewiseLinear:
        for (const auto& [x, y] : knots_)
          if (x > 0.0 && x < 1.0) xs.push_back(x);
        break;
    }
    return xs;
  }

  /// Grammar used by portfolio files: power:g | es:a | pwl:x,y;x,y;...
  std::string to_string() const {
    switch (family_) {
      case Family::Power:
        return "power:" + format_number(param_);
      case Family::ExpectedShortfall:
        return "es:" + format_number(param_);
      case Family::PiecewiseLinear: {
        std::string s = "pwl:";
        for (std::size_t i = 0; i < knots_.size(); ++i) {
          if (i > 0) s += ';';
          s += format_number(knots_[i].first) + ',' + format_number(knots_[i].second);
        }
        return s;
      }
    }
    return {};
  }

  static Distortion parse(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("distortion '" + text + "': expected family:params");
    const std::string head = text.substr(0, colon);
    const std::string body = text.substr(colon + 1);
    if (head == "power") return power(parse_number(body, text));
    if (head == "es") return expected_shortfall(parse_number(body, text));
    if (head == "pwl") {
      std::vector<std::pair<double, double>> knots;
      std::size_t pos = 0;
      while (pos <= body.size()) {
        auto semi = body.find(';', pos);
        std::string pair = body.substr(pos, semi == std::string::npos ? std::string::npos
                                                                      : semi - pos);
        auto comma = pair.find(',');
        if (comma == std::string::npos)
          throw std::invalid_argument("distortion '" + text + "': knot needs x,y");
        knots.emplace_back(parse_number(pair.substr(0, comma), text),
                           parse_number(pair.substr(comma + 1), text));
        if (semi == std::string::npos) break;
        pos = semi + 1;
      }
      return piecewise_linear(std::move(knots));
    }
    throw std::invalid_argument("distortion '" + text + "': unknown family '" + head + "'");
  }

 private:
  Family family_ = Family::Power;
  double param_ = 1.0;
  std::vector<std::pair<double, double>> knots_;

  double eval_pwl(double x) const {
    // validate() guarantees sorted knots spanning [0,1].
    const auto& ks = knots_;
    if (ks.empty()) return x;
    if (x <= ks.front().first) return ks.front().second;
    for (std::size_t i = 1; i < ks.size(); ++i) {
      if (x <= ks[i].first) {
        const double dx = ks[i].first - ks[i - 1].first;
        const double t = dx > 0.0 ? (x - ks[i - 1].first) / dx : 1.0;
        return ks[i - 1].second + t * (ks[i].second - ks[i - 1].second);
      }
    }
    return ks.back().second;
  }

  void validate_pwl(DistortionValidation& report) const {
    if (knots_.size() < 2) {
      report.fail("piecewise-linear distortion needs at least two knots");
      return;
    }
    if (std::fabs(knots_.front().first) > 1e-12 || std::fabs(knots_.front().second) > 1e-12)
      report.fail("first knot must be (0, 0)");
    if (std::fabs(knots_.back().first - 1.0) > 1e-12 ||
        std::fabs(knots_.back().second - 1.0) > 1e-12)
      report.fail("last knot must be (1, 1)");
    double prev_slope = 0.0;
    bool have_slope = false;
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      const auto& [x, y] = knots_[i];
      if (!std::isfinite(x) || !std::isfinite(y)) {
        report.fail("knots[" + std::to_string(i) + "]: non-finite");
        return;
      }
      if (x < -1e-12 || x > 1.0 + 1e-12 || y < -1e-12 || y > 1.0 + 1e-12)
        report.fail("knots[" + std::to_string(i) + "]: outside the unit square");
      if (i > 0) {
        const double dx = x - knots_[i - 1].first;
        if (dx <= 0.0) {
          report.fail("knots[" + std::to_string(i) + "]: x-coordinates must increase");
          return;
        }
        const double slope = (y - knots_[i - 1].second) / dx;
        if (slope < -1e-9)
          report.fail("knots[" + std::to_string(i) + "]: decreasing segment");
        if (have_slope && slope < prev_slope - 1e-9 * std::max(1.0, std::fabs(prev_slope)))
          report.fail("knots[" + std::to_string(i) + "]: slopes decrease (not convex)");
        prev_slope = slope;
        have_slope = true;
      }
    }
  }

  static std::string format_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      return std::string(buf);
    }
    return std::string(buf, end);
  }

  static double parse_number(const std::string& s, const std::string& ctx) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw std::invalid_argument("distortion '" + ctx + "': bad number '" + s + "'");
    }
  }
};

/// True iff f_lo ≤ f_hi pointwise on a uniform grid plus all knots, which on
/// convex distortions implies the utility ordering u_lo ≤ u_hi.
inline bool utility_dominates(const Distortion& f_lo, const Distortion& f_hi,
                              std::size_t grid = 512) {
  f_lo.require_valid();
  f_hi.require_valid();
  if (grid == 0) throw std::invalid_argument("utility_dominates: grid must be positive");
  std::vector<double> xs;
  xs.reserve(grid + 8);
  for (std::size_t k = 0; k <= grid; ++k)
    xs.push_back(static_cast<double>(k) / static_cast<double>(grid));
  for (double x : f_lo.knot_xs()) xs.push_back(x);
  for (double x : f_hi.knot_xs()) xs.push_back(x);
  for (double x : xs)
    if (f_lo(x) > f_hi(x) + 1e-12) return false;
  return true;
}

}  // namespace surplus
