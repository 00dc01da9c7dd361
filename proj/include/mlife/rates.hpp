#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mlife {

// Scalar function of time (years). Used for intensities, payment rates and
// probabilities alike; units are the caller's business.
using rate_fn = std::function<double(double)>;

inline rate_fn constant_rate(double value) {
  return [value](double) { return value; };
}

// a + 10^(b*t + c), the Gompertz-Makeham form with base-10 exponent.
inline rate_fn makeham_rate(double a, double b, double c) {
  return [a, b, c](double t) { return a + std::pow(10.0, b * t + c); };
}

inline rate_fn linear_rate(double intercept, double slope) {
  return [intercept, slope](double t) { return intercept + slope * t; };
}

// Piecewise-linear interpolation through (times[i], values[i]); constant
// extrapolation outside the table.
class PiecewiseLinear {
 public:
  PiecewiseLinear(std::vector<double> times, std::vector<double> values)
      : times_(std::move(times)), values_(std::move(values)) {
    if (times_.size() != values_.size() || times_.empty())
      throw std::invalid_argument("PiecewiseLinear: need equal, non-empty times/values");
    if (!std::is_sorted(times_.begin(), times_.end()))
      throw std::invalid_argument("PiecewiseLinear: times must be sorted");
  }

  double operator()(double t) const {
    if (t <= times_.front()) return values_.front();
    if (t >= times_.back()) return values_.back();
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times_.begin());
    double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
    return values_[i - 1] * (1.0 - w) + values_[i] * w;
  }

  // Exact integral of the interpolant over [a, b] (a <= b).
  double integral(double a, double b) const {
    if (b < a) return -integral(b, a);
    double acc = 0.0;
    // breakpoints of the interpolant restricted to [a, b]
    double lo = a;
    for (std::size_t i = 0; i + 1 < times_.size() && lo < b; ++i) {
      double segb = std::min(b, times_[i + 1]);
      if (segb <= lo || times_[i + 1] <= a) continue;
      double sega = std::max(lo, times_[i]);
      if (segb > sega) {
        acc += 0.5 * ((*this)(sega) + (*this)(segb)) * (segb - sega);
        lo = segb;
      }
    }
    // flat tails
    if (a < times_.front()) acc += (std::min(b, times_.front()) - a) * values_.front();
    if (b > times_.back()) acc += (b - std::max(a, times_.back())) * values_.back();
    return acc;
  }

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

inline rate_fn table_rate(std::vector<double> times, std::vector<double> values) {
  return PiecewiseLinear(std::move(times), std::move(values));
}

}  // namespace mlife
