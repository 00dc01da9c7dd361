#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "mlife/discrete.hpp"
#include "oracle.hpp"

using namespace mlife;

namespace {

DiscreteModel annuity_model(double r) {
  DiscreteModel m;
  m.n_states = 1;
  m.state_names = {"alive"};
  m.intensity = [](double, int, int) { return 0.0; };
  m.discount = Discount::constant(r);
  m.payments.sojourn_rate = [](double, const State&) { return 1.0; };
  m.payments.sojourn_piecewise_constant = true;
  return m;
}

DiscreteModel term_model(double mu, double r) {
  DiscreteModel m;
  m.n_states = 2;
  m.state_names = {"alive", "dead"};
  m.intensity = [mu](double, int i, int j) { return (i == 0 && j == 1) ? mu : 0.0; };
  m.discount = Discount::constant(r);
  m.payments.transition = [](double, const State& g, const State& h) {
    return (g.index == 0 && h.index == 1) ? 1.0 : 0.0;
  };
  return m;
}

double solve_at_start(const DiscreteModel& m, double t_end, double dt) {
  std::vector<double> boundary(static_cast<std::size_t>(m.n_states), 0.0);
  return solve_reserves_discrete(m, boundary, 0.0, t_end, dt).values[0][0];
}

}  // namespace

TEST_CASE("annuity-certain value from the backward sweep", "[discrete]") {
  double v = solve_at_start(annuity_model(0.05), 10.0, 1.0 / 3650);
  CHECK(v == Catch::Approx(7.86938680574733).margin(1e-4));
}

TEST_CASE("constant-rate term insurance value", "[discrete]") {
  double v = solve_at_start(term_model(0.01, 0.03), 20.0, 1.0 / 3650);
  CHECK(v == Catch::Approx(0.137667758970695).margin(5e-6));
}

TEST_CASE("zero payments give a zero reserve everywhere", "[discrete]") {
  DiscreteModel m = term_model(0.01, 0.03);
  m.payments = PaymentSpec{};
  std::vector<double> boundary{0.0, 0.0};
  ReserveTable t = solve_reserves_discrete(m, boundary, 0.0, 20.0, 1.0 / 12);
  for (const auto& row : t.values)
    for (double v : row) CHECK(v == 0.0);
}

TEST_CASE("pure endowment via a boundary lump", "[discrete]") {
  DiscreteModel m = term_model(0.01, 0.03);
  m.payments = PaymentSpec{};
  SojournLump lump;
  lump.time = 10.0;
  lump.amount = 1.0;
  lump.applies = [](const State& g) { return g.index == 0; };
  m.payments.sojourn_lumps.push_back(lump);
  std::vector<double> boundary{0.0, 0.0};
  ReserveTable t = solve_reserves_discrete(m, boundary, 0.0, 10.0, 1.0 / 1000);
  CHECK(t.values[0][t.times.size() - 1] == 1.0);  // lump lands on the boundary node
  CHECK(t.values[0][0] == Catch::Approx(oracle::pure_endowment(0.01, 0.03, 10.0)).margin(1e-4));
  CHECK(t.values[1][0] == 0.0);
}

TEST_CASE("mid-horizon lump discounts through the recursion", "[discrete]") {
  DiscreteModel m = annuity_model(0.04);
  m.payments = PaymentSpec{};
  SojournLump lump;
  lump.time = 3.0;
  lump.amount = 2.0;
  m.payments.sojourn_lumps.push_back(lump);
  ReserveTable t = solve_reserves_discrete(m, std::vector<double>{0.0}, 0.0, 10.0, 1.0 / 2000);
  CHECK(t.values[0][0] == Catch::Approx(2.0 * std::exp(-0.04 * 3.0)).margin(1e-4));
}

TEST_CASE("reserve table lookups snap to grid nodes", "[discrete]") {
  ReserveTable t = solve_reserves_discrete(annuity_model(0.05), std::vector<double>{0.0}, 0.0,
                                           10.0, 0.25);
  CHECK(t.at(0, 0.0) == t.values[0][0]);
  CHECK(t.at(0, 10.0) == 0.0);
  CHECK(t.at(0, 5.0) == t.values[0][20]);
}

TEST_CASE("order-1 convergence on the closed-form instances", "[discrete]") {
  auto err_annuity = [](double dt) {
    return std::abs(solve_at_start(annuity_model(0.05), 10.0, dt) - 7.86938680574733);
  };
  auto err_term = [](double dt) {
    return std::abs(solve_at_start(term_model(0.01, 0.03), 20.0, dt) - 0.137667758970695);
  };
  for (auto err : {+err_annuity, +err_term}) {
    double e1 = err(1.0 / 16), e2 = err(1.0 / 32), e4 = err(1.0 / 64);
    CHECK(e1 / e2 > 1.7);
    CHECK(e1 / e2 < 2.3);
    CHECK(e2 / e4 > 1.7);
    CHECK(e2 / e4 < 2.3);
  }
}

TEST_CASE("forward equation reproduces the scalar exponential", "[discrete]") {
  DiscreteModel m = term_model(0.01, 0.03);
  TransitionMatrixPath p = solve_kolmogorov_forward(m, 0.0, 10.0, 1.0 / 1000);
  CHECK(p.matrices.front()[0][0] == 1.0);
  CHECK(p.matrices.front()[0][1] == 0.0);
  CHECK(p.matrices.back()[0][1] ==
        Catch::Approx(oracle::dead_probability(0.01, 10.0)).margin(1e-4));
  // absorbing state never leaves; rows stay stochastic; entries stay in [0,1]
  bool absorbing_ok = true, range_ok = true;
  double worst_row = 0.0;
  for (const auto& mat : p.matrices) {
    absorbing_ok = absorbing_ok && mat[1][1] == 1.0 && mat[1][0] == 0.0;
    for (const auto& row : mat) {
      double s = 0.0;
      for (double v : row) {
        range_ok = range_ok && v >= 0.0 && v <= 1.0;
        s += v;
      }
      worst_row = std::max(worst_row, std::abs(s - 1.0));
    }
  }
  CHECK(absorbing_ok);
  CHECK(range_ok);
  CHECK(worst_row < 1e-6);
}

TEST_CASE("probability-weighted cash flows match the backward sweep", "[discrete]") {
  SECTION("term insurance") {
    DiscreteModel m = term_model(0.01, 0.03);
    std::vector<double> boundary{0.0, 0.0};
    double dt = 1.0 / 200;
    double direct = solve_reserves_discrete(m, boundary, 0.0, 20.0, dt).values[0][0];
    double viaP = reserve_via_probabilities(m, boundary, 0.0, 20.0, dt).values[0][0];
    double tol = 2.0 * dt * 20.0 * 0.01;
    CHECK(std::abs(direct - viaP) < tol + 1e-6);
  }
  SECTION("annuity") {
    DiscreteModel m = annuity_model(0.05);
    double viaP =
        reserve_via_probabilities(m, std::vector<double>{0.0}, 0.0, 10.0, 1.0 / 400).values[0][0];
    CHECK(viaP == Catch::Approx(7.86938680574733).margin(2e-3));
  }
  SECTION("zero payments") {
    DiscreteModel m = term_model(0.01, 0.03);
    m.payments = PaymentSpec{};
    std::vector<double> boundary{0.0, 0.0};
    double viaP = reserve_via_probabilities(m, boundary, 0.0, 20.0, 1.0 / 100).values[0][0];
    CHECK(viaP == 0.0);
  }
}

TEST_CASE("two solution methods agree on randomized chains", "[discrete]") {
  std::mt19937_64 rng(20260815);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 8; ++rep) {
    const int m = 3;
    const double horizon = 5.0, dt = 1.0 / 200;
    std::vector<double> mu(static_cast<std::size_t>(m) * m, 0.0);
    double max_rate = 0.0;
    for (int i = 0; i < m; ++i) {
      double lam = 0.0;
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        mu[static_cast<std::size_t>(i) * m + j] = 0.5 * u(rng);
        lam += mu[static_cast<std::size_t>(i) * m + j];
      }
      max_rate = std::max(max_rate, lam);
    }
    std::vector<double> pay{u(rng), u(rng), u(rng)};
    std::vector<double> bpay{u(rng), u(rng), u(rng)};

    DiscreteModel model;
    model.n_states = m;
    model.intensity = [mu, m](double, int i, int j) {
      return mu[static_cast<std::size_t>(i) * m + j];
    };
    model.discount = Discount::constant(0.02 + 0.03 * u(rng));
    model.payments.sojourn_rate = [pay](double, const State& g) {
      return pay[static_cast<std::size_t>(g.index)];
    };
    model.payments.sojourn_piecewise_constant = true;
    model.payments.transition = [bpay](double, const State& g, const State& h) {
      return g.index != h.index ? bpay[static_cast<std::size_t>(g.index)] : 0.0;
    };
    std::vector<double> boundary{u(rng), u(rng), u(rng)};

    ReserveTable direct = solve_reserves_discrete(model, boundary, 0.0, horizon, dt);
    ReserveTable viaP = reserve_via_probabilities(model, boundary, 0.0, horizon, dt);
    double tol = 2.0 * dt * horizon * std::max(max_rate, 1.0) + 1e-9;
    for (int i = 0; i < m; ++i) {
      INFO("rep " << rep << " state " << i);
      CHECK(std::abs(direct.values[static_cast<std::size_t>(i)][0] -
                     viaP.values[static_cast<std::size_t>(i)][0]) < tol);
    }
  }
}

TEST_CASE("absorbing state with no payments has zero reserve", "[discrete]") {
  DiscreteModel m = term_model(0.02, 0.04);
  std::vector<double> boundary{0.0, 0.0};
  ReserveTable t = solve_reserves_discrete(m, boundary, 0.0, 15.0, 1.0 / 50);
  for (double v : t.values[1]) CHECK(v == 0.0);
}

TEST_CASE("non-finite intensities are reported with location", "[discrete]") {
  DiscreteModel m = term_model(0.01, 0.03);
  m.intensity = [](double t, int, int) {
    return t < 5.0 ? std::numeric_limits<double>::infinity() : 0.01;
  };
  std::vector<double> boundary{0.0, 0.0};
  CHECK_THROWS_AS(solve_reserves_discrete(m, boundary, 0.0, 20.0, 1.0 / 10), numeric_error);
  CHECK_THROWS_AS(solve_kolmogorov_forward(m, 0.0, 20.0, 1.0 / 10), numeric_error);
}

TEST_CASE("grid construction rejects bad arguments", "[discrete]") {
  DiscreteModel m = annuity_model(0.05);
  std::vector<double> boundary{0.0};
  CHECK_THROWS_AS(solve_reserves_discrete(m, boundary, 0.0, 10.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(solve_reserves_discrete(m, boundary, 10.0, 10.0, 0.1), std::invalid_argument);
  std::vector<double> wrong{0.0, 0.0};
  CHECK_THROWS_AS(solve_reserves_discrete(m, wrong, 0.0, 10.0, 0.1), std::invalid_argument);
}
