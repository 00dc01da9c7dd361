#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <vector>

#include "mlife/errors.hpp"
#include "mlife/rates.hpp"

namespace mlife {

// Trapezoid cumulative hazard on a uniform grid; inside a cell the hazard is
// treated as constant (linear cumulative), so value() and inversion agree
// exactly.
class CumulativeHazard {
 public:
  CumulativeHazard(const rate_fn& rate, double t_begin, double t_end, double step) {
    if (!(step > 0.0) || !(t_end > t_begin))
      throw std::invalid_argument("cumulative hazard needs step > 0 and t_end > t_begin");
    double span = t_end - t_begin;
    n_cells_ = static_cast<std::size_t>(std::ceil(span / step - 1e-12));
    if (n_cells_ == 0) n_cells_ = 1;
    t_begin_ = t_begin;
    step_ = span / static_cast<double>(n_cells_);
    cum_.resize(n_cells_ + 1);
    cum_[0] = 0.0;
    double prev = rate(t_begin);
    for (std::size_t i = 1; i <= n_cells_; ++i) {
      double t = t_begin + span * static_cast<double>(i) / static_cast<double>(n_cells_);
      double cur = rate(t);
      if (!std::isfinite(cur) || !std::isfinite(prev)) {
        std::ostringstream os;
        os << "non-finite hazard rate near t=" << t;
        throw numeric_error(os.str());
      }
      cum_[i] = cum_[i - 1] + 0.5 * (prev + cur) * step_;
      prev = cur;
    }
  }

  double t_begin() const { return t_begin_; }
  double t_end() const { return t_begin_ + step_ * static_cast<double>(n_cells_); }
  double step() const { return step_; }
  std::size_t n_cells() const { return n_cells_; }
  double node(std::size_t i) const { return t_begin_ + step_ * static_cast<double>(i); }
  double cum(std::size_t i) const { return cum_[i]; }

  double value(double t) const {
    if (t <= t_begin_) return 0.0;
    double x = (t - t_begin_) / step_;
    if (x >= static_cast<double>(n_cells_)) return cum_[n_cells_];
    auto i = static_cast<std::size_t>(x);
    double frac = x - static_cast<double>(i);
    return cum_[i] + frac * (cum_[i + 1] - cum_[i]);
  }

 private:
  double t_begin_ = 0.0;
  double step_ = 0.0;
  std::size_t n_cells_ = 0;
  std::vector<double> cum_;
};

// Non-negative combination of cumulative-hazard tables sharing one grid.
// Supports the inverse-transform draw: find the first T with
// H(T) - H(t_from) = target.
class HazardMix {
 public:
  void add(const CumulativeHazard* table, double coeff) {
    if (!tables_.empty()) {
      assert(table->t_begin() == tables_.front()->t_begin());
      assert(table->n_cells() == tables_.front()->n_cells());
    }
    tables_.push_back(table);
    coeffs_.push_back(coeff);
  }

  bool empty() const { return tables_.empty(); }

  double node_value(std::size_t i) const {
    double s = 0.0;
    for (std::size_t k = 0; k < tables_.size(); ++k) s += coeffs_[k] * tables_[k]->cum(i);
    return s;
  }

  double value(double t) const {
    double s = 0.0;
    for (std::size_t k = 0; k < tables_.size(); ++k) s += coeffs_[k] * tables_[k]->value(t);
    return s;
  }

  // hazard rate by cell slope (matches the interpolation used everywhere else)
  double rate(double t) const {
    if (tables_.empty()) return 0.0;
    const CumulativeHazard& g = *tables_.front();
    double x = (t - g.t_begin()) / g.step();
    auto i = static_cast<std::size_t>(std::max(0.0, std::min(x, static_cast<double>(g.n_cells() - 1))));
    return (node_value(i + 1) - node_value(i)) / g.step();
  }

  std::optional<double> invert(double t_from, double target) const {
    if (tables_.empty()) return std::nullopt;
    const CumulativeHazard& g = *tables_.front();
    const double goal = value(t_from) + target;
    const std::size_t n = g.n_cells();
    if (node_value(n) < goal) return std::nullopt;  // hazard exhausted before the horizon
    double x0 = (t_from - g.t_begin()) / g.step();
    std::size_t lo = 0;
    if (x0 > 0.0) lo = std::min(static_cast<std::size_t>(x0), n - 1);
    // smallest node index hi in (lo, n] with node_value(hi) >= goal
    std::size_t a = lo, b = n;
    while (a + 1 < b) {
      std::size_t mid = a + (b - a) / 2;
      if (node_value(mid) >= goal)
        b = mid;
      else
        a = mid;
    }
    double va = node_value(b - 1), vb = node_value(b);
    if (!(vb > va)) return g.node(b);  // flat cell: mass sits at the right edge
    double frac = (goal - va) / (vb - va);
    if (frac < 0.0) frac = 0.0;
    if (frac > 1.0) frac = 1.0;
    double t = g.node(b - 1) + frac * g.step();
    return std::max(t, t_from);
  }

 private:
  std::vector<const CumulativeHazard*> tables_;
  std::vector<double> coeffs_;
};

}  // namespace mlife
