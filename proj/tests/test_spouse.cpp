#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "mlife/discrete.hpp"
#include "mlife/rates.hpp"
#include "mlife/spouse.hpp"
#include "oracle.hpp"

using namespace mlife;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;

namespace {

SpouseModel single_node_model() {
  SpouseModel m;
  m.mu_star_dagger = constant_rate(0.02);
  m.spouse_probability = constant_rate(1.0);
  m.phi_nodes = {{0.0, 1.0}};
  m.spouse_mortality = constant_rate(0.02);
  m.annuity_rate = 1.0;
  m.insured_age_at_t0 = 60.0;
  return m;
}

}  // namespace

TEST_CASE("zero spouse probability means zero active reserve", "[spouse]") {
  SpouseModel m = single_node_model();
  m.spouse_probability = constant_rate(0.0);
  ReserveTable t = solve_spouse_reserves(m, Discount::constant(0.03), 0.0, 20.0, 1.0 / 12.0);
  REQUIRE(t.values.size() == 3);
  bool active_zero = true, dead_zero = true;
  for (double v : t.values[0]) active_zero = active_zero && v == 0.0;
  for (double v : t.values[2]) dead_zero = dead_zero && v == 0.0;
  CHECK(active_zero);
  CHECK(dead_zero);
  // the spouse annuity itself is still worth something
  CHECK(t.values[1][0] > 0.0);
}

TEST_CASE("constant-rate spouse model matches its closed form", "[spouse]") {
  SpouseModel m = single_node_model();
  ReserveTable t = solve_spouse_reserves(m, Discount::constant(0.03), 0.0, 20.0, 1.0 / 3650.0);
  REQUIRE(t.state_names.size() == 3);
  CHECK(t.state_names[0] == "active");
  CHECK(t.state_names[1] == "dead_spouse(d=0)");
  CHECK(t.state_names[2] == "dead");

  // W(0) = (1 - e^{-beta T}) / beta with beta = mu_sp + r
  CHECK(t.values[1][0] == Catch::Approx(12.6424111765712).margin(1e-4));
  // V(0) = (mu/beta) [ (1 - e^{-beta T})/beta - T e^{-beta T} ] when mu + r = beta
  CHECK(t.values[0][0] == Catch::Approx(2.11392894125692).margin(1e-4));
  // boundary values are exactly zero
  CHECK(t.values[0].back() == 0.0);
  CHECK(t.values[1].back() == 0.0);
}

TEST_CASE("mixture reserves are the weighted sum of single-node runs", "[spouse]") {
  const double t_start = 30.0, t_end = 50.0, dt = 1.0 / 48.0;
  Discount disc = Discount::constant(0.025);

  SpouseModel mixed;
  mixed.mu_star_dagger = makeham_rate(0.0004, 0.060, -5.46);
  mixed.spouse_probability = [](double t) { return 0.8 - 0.005 * (t - 30.0); };
  mixed.phi_nodes = {{-5.0, 0.3}, {0.0, 0.45}, {7.0, 0.25}};
  mixed.spouse_mortality = makeham_rate(0.0005, 0.055, -5.2);
  mixed.insured_age_at_t0 = 30.0;

  ReserveTable full = solve_spouse_reserves(mixed, disc, t_start, t_end, dt);
  CHECK(full.state_names[1] == "dead_spouse(d=-5)");
  CHECK(full.state_names[3] == "dead_spouse(d=7)");

  std::vector<ReserveTable> singles;
  for (const SpouseNode& nd : mixed.phi_nodes) {
    SpouseModel one = mixed;
    one.phi_nodes = {{nd.age_difference, 1.0}};
    singles.push_back(solve_spouse_reserves(one, disc, t_start, t_end, dt));
  }

  // node annuities do not depend on the weights at all
  for (std::size_t j = 0; j < 3; ++j) CHECK(full.values[1 + j] == singles[j].values[1]);

  // the active reserve is linear in the mixture
  double worst = 0.0;
  for (std::size_t n = 0; n < full.times.size(); ++n) {
    double combo = 0.0;
    for (std::size_t j = 0; j < 3; ++j)
      combo += mixed.phi_nodes[j].weight * singles[j].values[0][n];
    worst = std::max(worst, std::abs(full.values[0][n] - combo));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("single-node spouse model reduces to a three-state chain", "[spouse]") {
  const double t_start = 30.0, t_end = 50.0, dt = 1.0 / 48.0;
  const double r = 0.03;
  auto mu = makeham_rate(0.0004, 0.060, -5.46);
  auto mu_sp = makeham_rate(0.0005, 0.055, -5.2);
  auto g = [](double t) { return 0.9 - 0.004 * (t - 30.0); };

  SpouseModel m;
  m.mu_star_dagger = mu;
  m.spouse_probability = g;
  m.phi_nodes = {{0.0, 1.0}};
  m.spouse_mortality = mu_sp;
  m.insured_age_at_t0 = 30.0;  // so the spouse age equals the time axis
  ReserveTable spouse = solve_spouse_reserves(m, Discount::constant(r), t_start, t_end, dt);

  DiscreteModel m3;
  m3.n_states = 3;
  m3.intensity = [mu, mu_sp, g](double t, int i, int j) {
    if (i == 0 && j == 1) return mu(t) * g(t);
    if (i == 0 && j == 2) return mu(t) * (1.0 - g(t));
    if (i == 1 && j == 2) return mu_sp(t);
    return 0.0;
  };
  m3.payments.sojourn_rate = [](double, const State& st) { return st.index == 1 ? 1.0 : 0.0; };
  m3.discount = Discount::constant(r);
  std::vector<double> boundary{0.0, 0.0, 0.0};
  ReserveTable chain = solve_reserves_discrete(m3, boundary, t_start, t_end, dt);

  double worst = 0.0;
  for (std::size_t n = 0; n < spouse.times.size(); ++n) {
    worst = std::max(worst, std::abs(spouse.values[0][n] - chain.values[0][n]));
    worst = std::max(worst, std::abs(spouse.values[1][n] - chain.values[1][n]));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("reserve grows with the spouse probability", "[spouse]") {
  SpouseModel lo = single_node_model();
  lo.spouse_probability = constant_rate(0.4);
  SpouseModel hi = single_node_model();
  hi.spouse_probability = constant_rate(0.8);
  Discount disc = Discount::constant(0.03);
  ReserveTable tlo = solve_spouse_reserves(lo, disc, 0.0, 20.0, 1.0 / 12.0);
  ReserveTable thi = solve_spouse_reserves(hi, disc, 0.0, 20.0, 1.0 / 12.0);
  bool monotone = true;
  for (std::size_t n = 0; n < tlo.times.size(); ++n)
    monotone = monotone && thi.values[0][n] >= tlo.values[0][n] - 1e-15;
  CHECK(monotone);
  CHECK(thi.values[0][0] > tlo.values[0][0]);
}

TEST_CASE("bad spouse inputs are rejected", "[spouse]") {
  Discount disc = Discount::constant(0.03);
  SECTION("age difference beyond the insured age") {
    SpouseModel m = single_node_model();
    m.insured_age_at_t0 = 30.0;
    m.phi_nodes = {{35.0, 1.0}};
    CHECK_THROWS_MATCHES(solve_spouse_reserves(m, disc, 0.0, 10.0, 0.25), std::domain_error,
                         MessageMatches(ContainsSubstring("phi node 0")));
  }
  SECTION("weights") {
    SpouseModel m = single_node_model();
    m.phi_nodes = {};
    CHECK_THROWS_AS(solve_spouse_reserves(m, disc, 0.0, 10.0, 0.25), std::invalid_argument);
    m.phi_nodes = {{0.0, -0.2}, {1.0, 1.2}};
    CHECK_THROWS_AS(solve_spouse_reserves(m, disc, 0.0, 10.0, 0.25), std::invalid_argument);
    m.phi_nodes = {{0.0, 0.5}, {1.0, 0.4}};
    CHECK_THROWS_AS(solve_spouse_reserves(m, disc, 0.0, 10.0, 0.25), std::invalid_argument);
  }
  SECTION("non-finite rates") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    SpouseModel m = single_node_model();
    m.spouse_mortality = constant_rate(nan);
    CHECK_THROWS_MATCHES(solve_spouse_reserves(m, disc, 0.0, 10.0, 0.25), numeric_error,
                         MessageMatches(ContainsSubstring("spouse reserve")));
    m = single_node_model();
    m.mu_star_dagger = constant_rate(nan);
    CHECK_THROWS_MATCHES(solve_spouse_reserves(m, disc, 0.0, 10.0, 0.25), numeric_error,
                         MessageMatches(ContainsSubstring("active reserve")));
  }
}
