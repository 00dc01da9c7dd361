#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <vector>

#include "mlife/errors.hpp"
#include "mlife/rates.hpp"

namespace mlife {

// Disability model with duration-dependent rehabilitation. The state space is
// {active, dead} plus one disabled state per onset time; the rehabilitation
// intensity out of (disabled, onset s) at age t is
//   mu_diamond_star_base(t) * (1 - mu_diamond_dagger(onset age)) * 1[t >= s].
struct RehabRates {
  rate_fn mu_star_dagger;       // active -> dead
  rate_fn mu_star_diamond;      // active -> disabled
  rate_fn mu_diamond_star_base; // base rehabilitation rate
  rate_fn mu_diamond_dagger;    // disabled -> dead
  double t0 = 0.0;              // inception age

  double rehab_rate(double t, double onset) const {
    if (t < onset) return 0.0;
    return mu_diamond_star_base(t) * (1.0 - mu_diamond_dagger(onset));
  }
};

inline RehabRates default_rates(double t0) {
  RehabRates r;
  r.mu_star_dagger = makeham_rate(0.0004, 0.060, -5.46);
  r.mu_star_diamond = makeham_rate(0.0005, 0.038, -4.12);
  r.mu_diamond_star_base = linear_rate(0.773763, -0.01045);
  r.mu_diamond_dagger = r.mu_star_dagger;  // no separate disabled-mortality table
  r.t0 = t0;
  return r;
}

// Full reserve surface on the triangular onset/time grid.
struct DisabilityReserveSurface {
  std::vector<double> times;   // t_0 ... t_N
  std::vector<double> active;  // V_*(t_n)
  // row k holds V_{(dia, t_k)}(t_n) for n = k..N, packed row-major
  std::vector<double> disabled_flat;
  std::vector<std::size_t> row_offset;

  std::size_t n_nodes() const { return times.size(); }

  double disabled(std::size_t k, std::size_t n) const {
    assert(k < times.size() && n < times.size() && k <= n);
    return disabled_flat[row_offset[k] + (n - k)];
  }
  double& disabled_ref(std::size_t k, std::size_t n) {
    assert(k <= n);
    return disabled_flat[row_offset[k] + (n - k)];
  }
  double onset_reserve(std::size_t k) const { return disabled(k, k); }
};

struct DisabilitySlice {
  double onset = 0.0;          // onset age (a grid node)
  std::size_t first_node = 0;  // grid index of the onset
  std::vector<double> values;  // V at nodes first_node..N
};

struct DisabilityCurves {
  std::vector<double> times;
  std::vector<double> active;         // V_*(t_n)
  std::vector<double> onset_reserve;  // V_{(dia, t_n)}(t_n)
  std::vector<DisabilitySlice> slices;
};

namespace detail {

inline std::size_t disability_steps(double t_start, double retirement, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("grid step must be positive");
  double span = retirement - t_start;
  if (!(span > 0.0)) throw std::invalid_argument("retirement must exceed t_start");
  auto n = static_cast<std::size_t>(std::llround(span / dt));
  if (n == 0 || std::abs(static_cast<double>(n) * dt - span) > 1e-9 * span)
    throw std::invalid_argument("retirement - t_start must be a whole number of steps");
  return n;
}

// Backward sweep of the coupled recursion, one column at a time.  After the
// column at node n is ready, col[k] = V_{(dia,t_k)}(t_n) for k <= n and
// `active` = V_*(t_n); the recorder is called once per node, right boundary
// first.  Row updates only ever touch onsets with t_k <= t_n (the loop bound
// is the indicator in the rehabilitation rate).
template <class Recorder>
void disability_sweep(const RehabRates& rates, double r, double retirement, double t_start,
                      double dt, double annuity_rate, Recorder&& record) {
  const std::size_t n_steps = disability_steps(t_start, retirement, dt);
  const double span = retirement - t_start;
  std::vector<double> times(n_steps + 1);
  for (std::size_t k = 0; k <= n_steps; ++k)
    times[k] = t_start + span * static_cast<double>(k) / static_cast<double>(n_steps);
  const double h = span / static_cast<double>(n_steps);

  // survival factor of the rehabilitation rate, per onset node
  std::vector<double> fac(n_steps + 1);
  for (std::size_t k = 0; k <= n_steps; ++k) fac[k] = 1.0 - rates.mu_diamond_dagger(times[k]);

  std::vector<double> col(n_steps + 1, 0.0);  // boundary: everything 0 at retirement
  double active = 0.0;
  record(n_steps, times, col, active);

  for (std::size_t n = n_steps; n >= 1; --n) {
    const double t = times[n];
    const double msd = rates.mu_star_dagger(t);
    const double msv = rates.mu_star_diamond(t);
    const double mud = rates.mu_diamond_dagger(t);
    const double bt = rates.mu_diamond_star_base(t);
    const double pay = t < retirement ? annuity_rate : 0.0;
    if (!std::isfinite(msd + msv + mud + bt)) {
      std::ostringstream os;
      os << "non-finite intensity at node n=" << n << " (t=" << t << ")";
      throw numeric_error(os.str());
    }
    assert(t >= times[n - 1]);

    // active first: uses the incoming diagonal col[n] = V_{(dia,t_n)}(t_n)
    const double active_next = active - h * ((msd + msv + r) * active - col[n] * msv);

    const double decay = 1.0 - h * (mud + r);
    const double hpay = h * pay;
    const double hbt = h * bt;
    double checksum = active_next;
    for (std::size_t k = 0; k < n; ++k) {
      const double reh = hbt * fac[k];
      const double v = col[k];
      col[k] = v * decay - reh * (v - active) + hpay;
      checksum += col[k];
    }
    active = active_next;
    if (!std::isfinite(checksum)) {
      for (std::size_t k = 0; k < n; ++k) {
        if (!std::isfinite(col[k])) {
          std::ostringstream os;
          os << "non-finite reserve at onset row k=" << k << ", node n=" << n - 1;
          throw numeric_error(os.str());
        }
      }
      std::ostringstream os;
      os << "non-finite active reserve at node n=" << n - 1;
      throw numeric_error(os.str());
    }
    record(n - 1, times, col, active);
  }
}

}  // namespace detail

// Full surface. Memory is O(N^2); use solve_disability_curves for fine grids.
inline DisabilityReserveSurface solve_disability(const RehabRates& rates, double r,
                                                 double retirement, double t_start, double dt,
                                                 double annuity_rate) {
  if (annuity_rate < 0.0) throw std::invalid_argument("annuity_rate must be non-negative");
  const std::size_t n_steps = detail::disability_steps(t_start, retirement, dt);
  DisabilityReserveSurface s;
  s.active.assign(n_steps + 1, 0.0);
  s.row_offset.assign(n_steps + 1, 0);
  std::size_t total = 0;
  for (std::size_t k = 0; k <= n_steps; ++k) {
    s.row_offset[k] = total;
    total += n_steps + 1 - k;
  }
  s.disabled_flat.assign(total, 0.0);

  detail::disability_sweep(rates, r, retirement, t_start, dt, annuity_rate,
                           [&](std::size_t n, const std::vector<double>& times,
                               const std::vector<double>& col, double active) {
                             if (s.times.empty()) s.times = times;
                             s.active[n] = active;
                             for (std::size_t k = 0; k <= n; ++k) s.disabled_ref(k, n) = col[k];
                           });
  return s;
}

// Streaming variant: O(N) memory, keeps the active curve, the reserve at
// onset, and full rows for the requested onset ages (snapped to grid nodes).
inline DisabilityCurves solve_disability_curves(const RehabRates& rates, double r,
                                                double retirement, double t_start, double dt,
                                                double annuity_rate,
                                                std::span<const double> slice_onsets = {}) {
  if (annuity_rate < 0.0) throw std::invalid_argument("annuity_rate must be non-negative");
  const std::size_t n_steps = detail::disability_steps(t_start, retirement, dt);
  const double h = (retirement - t_start) / static_cast<double>(n_steps);

  DisabilityCurves c;
  c.active.assign(n_steps + 1, 0.0);
  c.onset_reserve.assign(n_steps + 1, 0.0);
  for (double s : slice_onsets) {
    DisabilitySlice slice;
    auto k = static_cast<std::size_t>(std::llround((s - t_start) / h));
    k = std::min(k, n_steps);
    slice.first_node = k;
    slice.values.assign(n_steps + 1 - k, 0.0);
    c.slices.push_back(std::move(slice));
  }

  detail::disability_sweep(rates, r, retirement, t_start, dt, annuity_rate,
                           [&](std::size_t n, const std::vector<double>& times,
                               const std::vector<double>& col, double active) {
                             if (c.times.empty()) {
                               c.times = times;
                               for (DisabilitySlice& sl : c.slices)
                                 sl.onset = times[sl.first_node];
                             }
                             c.active[n] = active;
                             c.onset_reserve[n] = col[n];
                             // col[k] is V_{(dia,t_k)} at the current node
                             for (DisabilitySlice& sl : c.slices)
                               if (n >= sl.first_node)
                                 sl.values[n - sl.first_node] = col[sl.first_node];
                           });
  return c;
}

// Figure-ready curves from a solved surface: (t, V_*(t)), the reserve at
// onset (s, V_{(dia,s)}(s)), and optional whole rows for chosen onsets.
inline DisabilityCurves emit_figures(const DisabilityReserveSurface& surface,
                                     std::span<const double> slice_onsets = {}) {
  DisabilityCurves c;
  c.times = surface.times;
  c.active = surface.active;
  const std::size_t n_nodes = surface.n_nodes();
  c.onset_reserve.resize(n_nodes);
  for (std::size_t k = 0; k < n_nodes; ++k) c.onset_reserve[k] = surface.disabled(k, k);
  const double h = n_nodes > 1 ? surface.times[1] - surface.times[0] : 1.0;
  for (double s : slice_onsets) {
    DisabilitySlice slice;
    auto k = static_cast<std::size_t>(std::llround((s - surface.times.front()) / h));
    k = std::min(k, n_nodes - 1);
    slice.first_node = k;
    slice.onset = surface.times[k];
    slice.values.resize(n_nodes - k);
    for (std::size_t n = k; n < n_nodes; ++n) slice.values[n - k] = surface.disabled(k, n);
    c.slices.push_back(std::move(slice));
  }
  return c;
}

}  // namespace mlife
