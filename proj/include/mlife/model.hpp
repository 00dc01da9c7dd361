#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mlife/errors.hpp"
#include "mlife/rates.hpp"
#include "mlife/state.hpp"

namespace mlife {

// ---------------------------------------------------------------------------
// Intensity kernel
//
// The measure-valued jump rate q_t(x, .) decomposed as finitely many atoms
// plus at most one density-weighted continuous family of target states. Every
// model in this library fits that shape, and it keeps quadrature exact.
// ---------------------------------------------------------------------------

struct Atom {
  State target;
  double rate = 0.0;  // per year
};

struct ContinuousPart {
  std::function<State(double)> family;    // coordinate -> target state
  std::function<double(double)> density;  // relative weight over the coordinate
  double coord_lo = 0.0;                  // support of the coordinate
  double coord_hi = 0.0;
  double total_mass = 0.0;                // per-year intensity of the whole part
};

struct IntensityKernel {
  std::function<std::vector<Atom>(double, const State&)> atoms;
  std::function<std::optional<ContinuousPart>(double, const State&)> continuous_part;
  std::string description;
  // Evaluation domain; queries outside it are a caller error.
  double horizon_begin = -std::numeric_limits<double>::infinity();
  double horizon_end = std::numeric_limits<double>::infinity();
};

// Total jump rate lambda_t(x) = q_t(x, S \ {x}): atom rates plus the mass of
// the continuous part.
inline double total_rate(const IntensityKernel& kernel, double t, const State& x) {
  if (t < kernel.horizon_begin || t > kernel.horizon_end) {
    std::ostringstream os;
    os << "total_rate: t=" << t << " outside kernel horizon [" << kernel.horizon_begin
       << ", " << kernel.horizon_end << "]";
    throw std::domain_error(os.str());
  }
  double lambda = 0.0;
  if (kernel.atoms) {
    for (const Atom& a : kernel.atoms(t, x)) lambda += a.rate;
  }
  if (kernel.continuous_part) {
    if (auto part = kernel.continuous_part(t, x)) lambda += part->total_mass;
  }
  if (!std::isfinite(lambda)) {
    throw numeric_error("total_rate: non-finite rate at t=" + std::to_string(t) +
                        ", state=" + to_string(x));
  }
  return lambda;
}

// ---------------------------------------------------------------------------
// Payment streams
// ---------------------------------------------------------------------------

// A discrete point of increase of the sojourn payment stream B.
struct SojournLump {
  double time = 0.0;
  std::function<bool(const State&)> applies;  // which states receive it
  double amount = 0.0;
};

struct PaymentSpec {
  // Density of the absolutely continuous part of B_g, money per year.
  std::function<double(double, const State&)> sojourn_rate;
  std::vector<SojournLump> sojourn_lumps;
  // Lump paid at the instant of a jump g -> h; zero on the diagonal.
  std::function<double(double, const State&, const State&)> transition;

  // The sojourn rate is smooth between consecutive breakpoints; with
  // piecewise_constant set it is constant there, which lets present-value
  // integrals use the closed-form discounted-annuity segment.
  std::vector<double> sojourn_breakpoints;
  bool sojourn_piecewise_constant = false;

  double rate_at(double t, const State& g) const {
    return sojourn_rate ? sojourn_rate(t, g) : 0.0;
  }
  double transition_at(double t, const State& g, const State& h) const {
    return transition ? transition(t, g, h) : 0.0;
  }
};

// ---------------------------------------------------------------------------
// Discounting: v(t,s) = exp(-int_t^s r(u) du) with r constant or a
// piecewise-linear curve (integrated exactly).
// ---------------------------------------------------------------------------

class Discount {
 public:
  static Discount constant(double r) {
    Discount d;
    d.constant_ = r;
    return d;
  }
  static Discount curve(std::vector<double> times, std::vector<double> rates) {
    Discount d;
    d.curve_.emplace(std::move(times), std::move(rates));
    return d;
  }

  double rate(double t) const { return curve_ ? (*curve_)(t) : constant_; }

  double integral(double a, double b) const {
    return curve_ ? curve_->integral(a, b) : constant_ * (b - a);
  }

  double factor(double a, double b) const { return std::exp(-integral(a, b)); }

  std::optional<double> constant_rate() const {
    if (curve_) return std::nullopt;
    return constant_;
  }

 private:
  double constant_ = 0.0;
  std::optional<PiecewiseLinear> curve_;
};

// ---------------------------------------------------------------------------
// Diagnostics returned by model validation (never thrown).
// ---------------------------------------------------------------------------

enum class Severity { warning, error };

struct Diagnostic {
  Severity severity = Severity::error;
  std::string message;
};

using Diagnostics = std::vector<Diagnostic>;

inline bool has_errors(const Diagnostics& ds) {
  for (const auto& d : ds)
    if (d.severity == Severity::error) return true;
  return false;
}

}  // namespace mlife
