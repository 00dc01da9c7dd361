#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mlife/errors.hpp"
#include "mlife/model.hpp"
#include "mlife/state.hpp"

namespace mlife {

// Classical finite-state model: q_t(i, {j}) = mu(t, i, j).
struct DiscreteModel {
  int n_states = 0;
  std::function<double(double, int, int)> intensity;  // i != j, per year
  PaymentSpec payments;                               // states are State::indexed(i)
  Discount discount;
  std::vector<std::string> state_names;  // optional; defaults to state<i>

  std::string name_of(int i) const {
    if (i >= 0 && static_cast<std::size_t>(i) < state_names.size()) return state_names[i];
    return "state" + std::to_string(i);
  }
};

struct ReserveTable {
  std::vector<double> times;                // t_0 < ... < t_N
  std::vector<std::string> state_names;     // one per row
  std::vector<std::vector<double>> values;  // values[i][n] = V_i(t_n)

  double at(std::size_t state, double t) const {
    // nearest grid node; grids are uniform
    double dt = times.size() > 1 ? times[1] - times[0] : 1.0;
    auto n = static_cast<std::size_t>(std::llround((t - times.front()) / dt));
    return values[state][std::min(n, times.size() - 1)];
  }
};

struct TransitionMatrixPath {
  std::vector<double> times;
  // matrices[n][i][j] ~ P_{t0, t_n}(i, {j})
  std::vector<std::vector<std::vector<double>>> matrices;
};

namespace detail {

inline std::vector<double> uniform_grid(double t_start, double t_end, double dt,
                                        std::size_t* n_steps) {
  if (!(dt > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (!(t_end > t_start)) throw std::invalid_argument("t_end must exceed t_start");
  double span = t_end - t_start;
  auto n = static_cast<std::size_t>(std::llround(span / dt));
  if (n == 0) n = 1;
  std::vector<double> grid(n + 1);
  for (std::size_t k = 0; k <= n; ++k) grid[k] = t_start + span * static_cast<double>(k) / static_cast<double>(n);
  *n_steps = n;
  return grid;
}

inline void check_finite(double v, double t, int state, const char* what) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << what << " non-finite at t=" << t << ", state " << state;
    throw numeric_error(os.str());
  }
}

}  // namespace detail

// Backward Euler sweep of the finite-state reserve equation
//   dV_g = (lambda_g + r) V_g dt - dB_g - sum_h (b_gh + V_h) mu_gh dt,
// everything evaluated at the right node of each step. Discrete points of
// increase of B are added at the node they snap to.
inline ReserveTable solve_reserves_discrete(const DiscreteModel& model,
                                            std::span<const double> boundary,
                                            double t_start, double t_end, double dt) {
  const int m = model.n_states;
  if (static_cast<int>(boundary.size()) != m)
    throw std::invalid_argument("boundary size must equal n_states");
  std::size_t n_steps = 0;
  std::vector<double> grid = detail::uniform_grid(t_start, t_end, dt, &n_steps);
  const double h = (t_end - t_start) / static_cast<double>(n_steps);

  ReserveTable table;
  table.times = grid;
  table.state_names.reserve(m);
  for (int i = 0; i < m; ++i) table.state_names.push_back(model.name_of(i));
  table.values.assign(m, std::vector<double>(n_steps + 1, 0.0));

  auto apply_lumps = [&](std::vector<double>& v, std::size_t node) {
    for (const SojournLump& lump : model.payments.sojourn_lumps) {
      if (std::abs(lump.time - grid[node]) <= 0.5 * h) {
        for (int i = 0; i < m; ++i)
          if (!lump.applies || lump.applies(State::indexed(i))) v[i] += lump.amount;
      }
    }
  };

  std::vector<double> v(boundary.begin(), boundary.end());
  apply_lumps(v, n_steps);
  for (int i = 0; i < m; ++i) table.values[i][n_steps] = v[i];

  std::vector<double> next(m);
  for (std::size_t n = n_steps; n >= 1; --n) {
    const double t = grid[n];
    const double r = model.discount.rate(t);
    for (int i = 0; i < m; ++i) {
      const State gi = State::indexed(i);
      double lambda = 0.0, inflow = 0.0;
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        double mu = model.intensity(t, i, j);
        lambda += mu;
        if (mu != 0.0)
          inflow += (model.payments.transition_at(t, gi, State::indexed(j)) + v[j]) * mu;
      }
      double pay = model.payments.rate_at(t, gi);
      next[i] = v[i] - h * ((lambda + r) * v[i] - pay - inflow);
      detail::check_finite(next[i], t, i, "reserve");
    }
    v = next;
    apply_lumps(v, n - 1);
    for (int i = 0; i < m; ++i) table.values[i][n - 1] = v[i];
  }
  return table;
}

// Forward Kolmogorov equation, explicit Euler:
//   d/ds P_{t,s}(i, {j}) = -P_{t,s}(i, {j}) lambda_s(j) + sum_{k != j} P_{t,s}(i, {k}) mu_kj(s).
// Rows are checked against the stochasticity tolerances, then clamped so Euler
// drift cannot leak negatives into downstream quadrature.
inline TransitionMatrixPath solve_kolmogorov_forward(const DiscreteModel& model, double t0,
                                                     double t_end, double dt) {
  const int m = model.n_states;
  std::size_t n_steps = 0;
  std::vector<double> grid = detail::uniform_grid(t0, t_end, dt, &n_steps);
  const double h = (t_end - t0) / static_cast<double>(n_steps);

  TransitionMatrixPath path;
  path.times = grid;
  path.matrices.reserve(n_steps + 1);

  std::vector<std::vector<double>> p(m, std::vector<double>(m, 0.0));
  for (int i = 0; i < m; ++i) p[i][i] = 1.0;  // P_{t,t}(g, .) is the unit mass at g
  path.matrices.push_back(p);

  std::vector<double> lambda(m), mu(static_cast<std::size_t>(m) * m);
  std::vector<std::vector<double>> q(m, std::vector<double>(m, 0.0));
  for (std::size_t n = 0; n < n_steps; ++n) {
    const double t = grid[n];
    for (int k = 0; k < m; ++k) {
      lambda[k] = 0.0;
      for (int j = 0; j < m; ++j) {
        if (j == k) continue;
        double mkj = model.intensity(t, k, j);
        detail::check_finite(mkj, t, k, "intensity");
        mu[static_cast<std::size_t>(k) * m + j] = mkj;
        lambda[k] += mkj;
      }
    }
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double flow = -p[i][j] * lambda[j];
        for (int k = 0; k < m; ++k) {
          if (k == j) continue;
          flow += p[i][k] * mu[static_cast<std::size_t>(k) * m + j];
        }
        q[i][j] = p[i][j] + h * flow;
      }
    }
    // stochasticity tolerances, then clamp
    constexpr double kEntryEps = 1e-9;
    constexpr double kRowEps = 1e-6;
    for (int i = 0; i < m; ++i) {
      double row = 0.0;
      for (int j = 0; j < m; ++j) {
        if (q[i][j] < -kEntryEps || q[i][j] > 1.0 + kEntryEps) {
          std::ostringstream os;
          os << "transition probability out of range at t=" << grid[n + 1] << ": P[" << i
             << "][" << j << "]=" << q[i][j];
          throw numeric_error(os.str());
        }
        row += q[i][j];
      }
      if (std::abs(row - 1.0) > kRowEps) {
        std::ostringstream os;
        os << "transition row " << i << " sums to " << row << " at t=" << grid[n + 1];
        throw numeric_error(os.str());
      }
      for (int j = 0; j < m; ++j) q[i][j] = std::min(1.0, std::max(0.0, q[i][j]));
    }
    p = q;
    path.matrices.push_back(p);
  }
  return path;
}

// Reserve by quadrature of expected cash flows,
//   V_g(t) = int_t^T v(t,s) sum_j P_{t,s}(g, {j}) [ Bdot_j(s) + sum_k b_jk(s) mu_jk(s) ] ds
//            + lump terms + v(t,T) sum_j P_{t,T}(g, {j}) boundary_j.
// Cross-check oracle for solve_reserves_discrete; one forward solve per
// evaluation time.
inline ReserveTable reserve_via_probabilities(const DiscreteModel& model,
                                              std::span<const double> boundary,
                                              double t_start, double t_end, double dt,
                                              std::span<const double> eval_times = {}) {
  const int m = model.n_states;
  if (static_cast<int>(boundary.size()) != m)
    throw std::invalid_argument("boundary size must equal n_states");
  std::vector<double> evals(eval_times.begin(), eval_times.end());
  if (evals.empty()) evals.push_back(t_start);

  ReserveTable table;
  table.times = evals;
  for (int i = 0; i < m; ++i) table.state_names.push_back(model.name_of(i));
  table.values.assign(m, std::vector<double>(evals.size(), 0.0));

  for (std::size_t e = 0; e < evals.size(); ++e) {
    const double tau = evals[e];
    if (tau >= t_end) {
      for (int i = 0; i < m; ++i) table.values[i][e] = boundary[i];
      continue;
    }
    TransitionMatrixPath path = solve_kolmogorov_forward(model, tau, t_end, dt);
    const std::size_t n_nodes = path.times.size();
    const double h = path.times[1] - path.times[0];
    std::vector<double> acc(m, 0.0);
    for (std::size_t n = 0; n < n_nodes; ++n) {
      const double s = path.times[n];
      const double w = (n == 0 || n + 1 == n_nodes) ? 0.5 * h : h;
      const double disc = model.discount.factor(tau, s);
      for (int j = 0; j < m; ++j) {
        const State gj = State::indexed(j);
        double cash = model.payments.rate_at(s, gj);
        for (int k = 0; k < m; ++k) {
          if (k == j) continue;
          double mu = model.intensity(s, j, k);
          if (mu != 0.0) cash += model.payments.transition_at(s, gj, State::indexed(k)) * mu;
        }
        detail::check_finite(cash, s, j, "cash flow");
        for (int i = 0; i < m; ++i) acc[i] += w * disc * path.matrices[n][i][j] * cash;
      }
    }
    for (const SojournLump& lump : model.payments.sojourn_lumps) {
      if (lump.time < tau - 0.5 * h || lump.time > t_end + 0.5 * h) continue;
      auto n = static_cast<std::size_t>(std::llround((lump.time - tau) / h));
      n = std::min(n, n_nodes - 1);
      const double disc = model.discount.factor(tau, path.times[n]);
      for (int j = 0; j < m; ++j) {
        if (lump.applies && !lump.applies(State::indexed(j))) continue;
        for (int i = 0; i < m; ++i) acc[i] += disc * path.matrices[n][i][j] * lump.amount;
      }
    }
    const double disc_T = model.discount.factor(tau, t_end);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) acc[i] += disc_T * path.matrices.back()[i][j] * boundary[j];
      table.values[i][e] = acc[i];
    }
  }
  return table;
}

}  // namespace mlife
