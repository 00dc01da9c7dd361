#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mlife/errors.hpp"
#include "mlife/hazard.hpp"
#include "mlife/model.hpp"
#include "mlife/parallel.hpp"
#include "mlife/rng.hpp"
#include "mlife/state.hpp"

namespace mlife {

struct Jump {
  double time = 0.0;
  State to;
};

// Jump-process model as seen by the simulator.  When hazard_mix_for is set,
// jump times are inverted on precomputed shared cumulative-hazard tables;
// otherwise each draw integrates the state's total rate on the fly.
struct JumpModel {
  IntensityKernel kernel;
  PaymentSpec payments;
  Discount discount;
  double horizon_end = 0.0;
  double hazard_step = 1.0 / 1440.0;
  std::vector<std::shared_ptr<const CumulativeHazard>> hazard_tables;
  std::function<HazardMix(const State&)> hazard_mix_for;
};

struct PathSample {
  std::vector<double> jump_times;  // J_1 < J_2 < ...
  std::vector<State> states;       // Y_0, Y_1, ...; states[i] holds on [J_i, J_{i+1})
  double pv = 0.0;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
};

// Deterministic reduction: summation order is fixed by the recursion, not by
// thread scheduling.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

namespace detail {

inline double pairwise_sum_sq_dev(std::span<const double> xs, double mean) {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return s;
  }
  std::size_t half = xs.size() / 2;
  return pairwise_sum_sq_dev(xs.first(half), mean) + pairwise_sum_sq_dev(xs.subspan(half), mean);
}

// Jump-chain draw: atom vs continuous part proportional to mass, coordinate
// by numeric inversion of the density.
inline State sample_target(const IntensityKernel& kernel, double t, const State& x,
                           RngStream& rng) {
  std::vector<Atom> atoms = kernel.atoms ? kernel.atoms(t, x) : std::vector<Atom>{};
  std::optional<ContinuousPart> part;
  if (kernel.continuous_part) part = kernel.continuous_part(t, x);

  double lambda = 0.0;
  for (const Atom& a : atoms) lambda += a.rate;
  if (part) lambda += part->total_mass;
  if (!(lambda > 0.0)) throw numeric_error("sample_target: zero total rate at jump time");

  double u = rng.uniform() * lambda;
  for (const Atom& a : atoms) {
    if (u < a.rate) return a.target;
    u -= a.rate;
  }
  if (part) {
    CumulativeHazard cdf(part->density, part->coord_lo, part->coord_hi,
                         (part->coord_hi - part->coord_lo) / 512.0);
    HazardMix mix;
    mix.add(&cdf, 1.0);
    double total = cdf.value(cdf.t_end());
    if (total > 0.0) {
      if (auto c = mix.invert(part->coord_lo, rng.uniform() * total)) return part->family(*c);
    }
    return part->family(part->coord_hi);
  }
  return atoms.back().target;  // rounding residue goes to the last atom
}

}  // namespace detail

// One jump by inverse transform on a freshly integrated cumulative hazard.
// Returns nothing when the state is absorbing or the hazard to horizon_end is
// exhausted before -log(u).
inline std::optional<Jump> sample_next_jump(const IntensityKernel& kernel, double t,
                                            const State& x, double horizon_end, RngStream& rng,
                                            double hazard_step = 1.0 / 1440.0) {
  if (t >= horizon_end) return std::nullopt;
  rate_fn lam = [&kernel, &x](double s) { return total_rate(kernel, s, x); };
  if (!(total_rate(kernel, t, x) > 0.0) && !(total_rate(kernel, horizon_end, x) > 0.0)) {
    // cheap absorbing-state check; a zero rate at both ends with mass in the
    // middle still gets caught by the table below
    CumulativeHazard probe(lam, t, horizon_end, (horizon_end - t) / 8.0);
    if (!(probe.value(horizon_end) > 0.0)) return std::nullopt;
  }
  CumulativeHazard table(lam, t, horizon_end, hazard_step);
  HazardMix mix;
  mix.add(&table, 1.0);
  std::optional<double> j = mix.invert(t, rng.exponential());
  if (!j || *j > horizon_end) return std::nullopt;
  return Jump{*j, detail::sample_target(kernel, *j, x, rng)};
}

// Fast-path draw on the model's shared hazard tables.
inline std::optional<Jump> sample_next_jump(const JumpModel& model, double t, const State& x,
                                            RngStream& rng) {
  if (!model.hazard_mix_for)
    return sample_next_jump(model.kernel, t, x, model.horizon_end, rng, model.hazard_step);
  if (t >= model.horizon_end) return std::nullopt;
  HazardMix mix = model.hazard_mix_for(x);
  if (mix.empty()) return std::nullopt;
  std::optional<double> j = mix.invert(t, rng.exponential());
  if (!j || *j > model.horizon_end) return std::nullopt;
  return Jump{*j, detail::sample_target(model.kernel, *j, x, rng)};
}

namespace detail {

// Discounted integral of the sojourn payment rate over [a, b] in state g,
// split at payment breakpoints; closed form for piecewise-constant payments
// under a constant short rate, Gauss-Legendre otherwise.
inline double sojourn_segment_pv(const JumpModel& model, double t0, double a, double b,
                                 const State& g) {
  if (!(b > a) || !model.payments.sojourn_rate) return 0.0;
  std::vector<double> cuts;
  cuts.push_back(a);
  for (double s : model.payments.sojourn_breakpoints)
    if (s > a && s < b) cuts.push_back(s);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  static constexpr double gl_x[4] = {0.1834346424956498, 0.5255324099163290,
                                     0.7966664774136267, 0.9602898564975363};
  static constexpr double gl_w[4] = {0.3626837833783620, 0.3137066458778873,
                                     0.2223810344533745, 0.1012285362903763};

  std::optional<double> r = model.discount.constant_rate();
  double pv = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double lo = cuts[i], hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    if (model.payments.sojourn_piecewise_constant && r) {
      double c = model.payments.rate_at(0.5 * (lo + hi), g);
      if (c == 0.0) continue;
      if (*r == 0.0)
        pv += c * (hi - lo);
      else
        pv += c * std::exp(-*r * (lo - t0)) * (1.0 - std::exp(-*r * (hi - lo))) / *r;
    } else {
      double mid = 0.5 * (lo + hi), halfw = 0.5 * (hi - lo);
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) {
        double sp = mid + halfw * gl_x[k], sm = mid - halfw * gl_x[k];
        acc += gl_w[k] * (model.payments.rate_at(sp, g) * model.discount.factor(t0, sp) +
                          model.payments.rate_at(sm, g) * model.discount.factor(t0, sm));
      }
      pv += acc * halfw;
    }
  }
  return pv;
}

}  // namespace detail

// Present value of one realized path at evaluation time t0:
// sojourn integrals + transition payments + discrete sojourn lumps.
inline double path_pv(const JumpModel& model, const PathSample& path, double t0) {
  double pv = 0.0;
  double seg_start = t0;
  const std::size_t n_jumps = path.jump_times.size();
  for (std::size_t i = 0; i < n_jumps; ++i) {
    double j = path.jump_times[i];
    pv += detail::sojourn_segment_pv(model, t0, seg_start, j, path.states[i]);
    double b = model.payments.transition_at(j, path.states[i], path.states[i + 1]);
    if (b != 0.0) pv += model.discount.factor(t0, j) * b;
    seg_start = j;
  }
  pv += detail::sojourn_segment_pv(model, t0, seg_start, model.horizon_end, path.states[n_jumps]);

  for (const SojournLump& lump : model.payments.sojourn_lumps) {
    if (lump.time < t0 || lump.time > model.horizon_end) continue;
    // state is right-continuous: at the lump time, jumps at that instant count
    auto it = std::upper_bound(path.jump_times.begin(), path.jump_times.end(), lump.time);
    const State& g = path.states[static_cast<std::size_t>(it - path.jump_times.begin())];
    if (!lump.applies || lump.applies(g))
      pv += model.discount.factor(t0, lump.time) * lump.amount;
  }
  return pv;
}

inline PathSample simulate_path(const JumpModel& model, const State& x0, double t0,
                                RngStream& rng) {
  PathSample path;
  path.states.push_back(x0);
  double t = t0;
  State x = x0;
  std::size_t guard = 0;
  while (true) {
    std::optional<Jump> j = sample_next_jump(model, t, x, rng);
    if (!j) break;
    path.jump_times.push_back(j->time);
    path.states.push_back(j->to);
    t = j->time;
    x = j->to;
    if (++guard > 100000) throw numeric_error("path exceeded 100000 jumps");
  }
  path.pv = path_pv(model, path, t0);
  return path;
}

struct SimulateOptions {
  bool antithetic = false;
  // Debug hook; when set, paths run serially in index order.
  std::function<void(std::size_t, const PathSample&)> on_path;
};

// Monte Carlo estimate of the reserve V_{x0}(t0).  Bit-identical for a given
// (seed, options) regardless of worker count: per-path RNG streams are keyed
// by path index and the reduction order is fixed.
inline McEstimate simulate_pv(const JumpModel& model, const State& x0, double t0,
                              std::size_t n_paths, std::uint64_t seed,
                              const SimulateOptions& opts = {}) {
  if (n_paths < 1) throw std::invalid_argument("n_paths must be at least 1");
  if (opts.antithetic && n_paths % 2 != 0)
    throw std::invalid_argument("n_paths must be even with antithetic variates");

  std::vector<double> pv(n_paths);
  auto run_one = [&](std::size_t i) {
    std::uint64_t stream = opts.antithetic ? i / 2 : i;
    RngStream rng(seed, stream);
    if (opts.antithetic && (i & 1U)) rng.set_antithetic(true);
    PathSample p = simulate_path(model, x0, t0, rng);
    pv[i] = p.pv;
    if (opts.on_path) opts.on_path(i, p);
  };
  if (opts.on_path) {
    for (std::size_t i = 0; i < n_paths; ++i) run_one(i);
  } else {
    parallel_for(n_paths, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) run_one(i);
    });
  }

  std::vector<double> pair_means;
  std::span<const double> vals(pv);
  if (opts.antithetic) {
    pair_means.resize(n_paths / 2);
    for (std::size_t i = 0; i < pair_means.size(); ++i)
      pair_means[i] = 0.5 * (pv[2 * i] + pv[2 * i + 1]);
    vals = pair_means;
  }
  const auto n = static_cast<double>(vals.size());
  McEstimate est;
  est.mean = pairwise_sum(vals) / n;
  est.std_error =
      vals.size() > 1 ? std::sqrt(detail::pairwise_sum_sq_dev(vals, est.mean) / (n - 1.0) / n)
                      : 0.0;
  est.n_paths = n_paths;
  est.seed = seed;
  return est;
}

}  // namespace mlife
