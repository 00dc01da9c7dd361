#pragma once

#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "mlife/discrete.hpp"
#include "mlife/errors.hpp"
#include "mlife/model.hpp"
#include "mlife/rates.hpp"

namespace mlife {

// Widow/widower annuity: on death of the insured a spouse may be present
// (probability g(t)); the spouse's age offset is drawn from a weighted sample
// of the age-difference distribution.  The surviving spouse receives a life
// annuity.  Death without spouse is an explicit absorbing atom so the
// insured's total death intensity stays mu_star_dagger.
struct SpouseNode {
  double age_difference = 0.0;  // insured age minus spouse age
  double weight = 0.0;
};

struct SpouseModel {
  rate_fn mu_star_dagger;            // insured mortality, argument = time axis
  rate_fn spouse_probability;        // g(t) in [0,1]
  std::vector<SpouseNode> phi_nodes; // weights sum to 1
  rate_fn spouse_mortality;          // argument = spouse age
  double annuity_rate = 1.0;         // paid to the surviving spouse, per year
  double insured_age_at_t0 = 0.0;    // insured age at t_start
};

namespace detail {

inline std::string spouse_state_name(double d) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "dead_spouse(d=%g)", d);
  return buf;
}

}  // namespace detail

// Two-phase backward solve: each post-death state is a single-life annuity on
// the spouse, then the active state integrates against the weighted node
// reserves.  Rows: active, one per node, dead.
inline ReserveTable solve_spouse_reserves(const SpouseModel& model, const Discount& discount,
                                          double t_start, double t_end, double dt) {
  const std::size_t n_nodes_phi = model.phi_nodes.size();
  if (n_nodes_phi == 0) throw std::invalid_argument("phi_nodes must be non-empty");
  double wsum = 0.0;
  for (const SpouseNode& nd : model.phi_nodes) {
    if (nd.weight < 0.0) throw std::invalid_argument("phi node weights must be non-negative");
    wsum += nd.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("phi node weights must sum to 1");
  for (std::size_t j = 0; j < n_nodes_phi; ++j) {
    double min_spouse_age = model.insured_age_at_t0 - model.phi_nodes[j].age_difference;
    if (min_spouse_age < 0.0) {
      std::ostringstream os;
      os << "phi node " << j << " (age difference " << model.phi_nodes[j].age_difference
         << ") gives negative spouse age " << min_spouse_age << " at t_start";
      throw std::domain_error(os.str());
    }
  }

  std::size_t n_steps = 0;
  std::vector<double> grid = detail::uniform_grid(t_start, t_end, dt, &n_steps);
  const double h = (t_end - t_start) / static_cast<double>(n_steps);

  ReserveTable table;
  table.times = grid;
  table.state_names.push_back("active");
  for (const SpouseNode& nd : model.phi_nodes)
    table.state_names.push_back(detail::spouse_state_name(nd.age_difference));
  table.state_names.push_back("dead");
  table.values.assign(n_nodes_phi + 2, std::vector<double>(n_steps + 1, 0.0));

  // phase 1: spouse annuity value per node, W_j' = (mu_sp + r) W_j - c
  for (std::size_t j = 0; j < n_nodes_phi; ++j) {
    std::vector<double>& w = table.values[1 + j];
    const double d = model.phi_nodes[j].age_difference;
    for (std::size_t n = n_steps; n >= 1; --n) {
      const double t = grid[n];
      const double spouse_age = model.insured_age_at_t0 + (t - t_start) - d;
      const double mu = model.spouse_mortality(spouse_age);
      const double r = discount.rate(t);
      w[n - 1] = w[n] - h * ((mu + r) * w[n] - model.annuity_rate);
      if (!std::isfinite(w[n - 1])) {
        std::ostringstream os;
        os << "non-finite spouse reserve at node " << j << ", t=" << grid[n - 1];
        throw numeric_error(os.str());
      }
    }
  }

  // phase 2: active state against the weighted node reserves
  std::vector<double>& v = table.values[0];
  for (std::size_t n = n_steps; n >= 1; --n) {
    const double t = grid[n];
    const double mu = model.mu_star_dagger(t);
    const double g = model.spouse_probability(t);
    const double r = discount.rate(t);
    double inflow = 0.0;
    for (std::size_t j = 0; j < n_nodes_phi; ++j)
      inflow += model.phi_nodes[j].weight * table.values[1 + j][n];
    v[n - 1] = v[n] - h * ((mu + r) * v[n] - mu * g * inflow);
    if (!std::isfinite(v[n - 1])) {
      std::ostringstream os;
      os << "non-finite active reserve at t=" << grid[n - 1];
      throw numeric_error(os.str());
    }
  }
  // last row: dead without spouse, absorbing with no payments -- stays 0
  return table;
}

}  // namespace mlife
