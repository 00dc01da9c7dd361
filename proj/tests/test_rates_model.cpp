#include <catch_amalgamated.hpp>

#include <cmath>

#include "mlife/config.hpp"
#include "mlife/model.hpp"
#include "mlife/rates.hpp"
#include "mlife/state.hpp"
#include "oracle.hpp"

using namespace mlife;

TEST_CASE("makeham and linear rate forms evaluate correctly", "[rates]") {
  auto mort = makeham_rate(0.0004, 0.060, -5.46);
  auto morb = makeham_rate(0.0005, 0.038, -4.12);
  // independent evaluations of a + 10^(b t + c)
  CHECK(mort(40.0) == Catch::Approx(0.00127096358995608).epsilon(1e-13));
  CHECK(morb(40.0) == Catch::Approx(0.0030118864315096).epsilon(1e-13));

  auto base = linear_rate(0.773763, -0.01045);
  CHECK(base(30.0) == Catch::Approx(0.460263).margin(1e-12));
  // the base rehabilitation rate crosses zero just past age 74
  double root = 0.773763 / 0.01045;
  CHECK(std::abs(base(root)) < 1e-12);
  CHECK(base(root + 1.0) < 0.0);
  CHECK(base(root - 1.0) > 0.0);
}

TEST_CASE("piecewise linear tables interpolate and integrate exactly", "[rates]") {
  PiecewiseLinear pl({0.0, 1.0, 3.0}, {2.0, 4.0, 0.0});
  CHECK(pl(0.5) == Catch::Approx(3.0));
  CHECK(pl(2.0) == Catch::Approx(2.0));
  CHECK(pl(-5.0) == 2.0);  // constant extrapolation
  CHECK(pl(9.0) == 0.0);

  double numeric = oracle::simpson([&](double t) { return pl(t); }, -1.0, 4.0, 2000);
  CHECK(pl.integral(-1.0, 4.0) == Catch::Approx(numeric).epsilon(1e-10));
  CHECK(pl.integral(0.25, 2.75) ==
        Catch::Approx(oracle::simpson([&](double t) { return pl(t); }, 0.25, 2.75, 2000))
            .epsilon(1e-10));
  CHECK(pl.integral(1.0, 0.0) == Catch::Approx(-pl.integral(0.0, 1.0)));

  CHECK_THROWS_AS(PiecewiseLinear({1.0, 0.0}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseLinear({}, {}), std::invalid_argument);

  auto tr = table_rate({0.0, 10.0}, {0.01, 0.02});
  CHECK(tr(5.0) == Catch::Approx(0.015));
}

TEST_CASE("discount factors compose and integrate the short rate", "[model]") {
  Discount d = Discount::constant(0.04);
  CHECK(d.factor(0.0, 0.0) == 1.0);
  CHECK(d.factor(2.0, 7.0) == Catch::Approx(std::exp(-0.2)).epsilon(1e-14));
  CHECK(d.constant_rate().has_value());

  // v(t,u) v(u,s) = v(t,s)
  CHECK(std::abs(d.factor(1.0, 4.0) * d.factor(4.0, 9.0) - d.factor(1.0, 9.0)) < 1e-12);

  Discount c = Discount::curve({0.0, 5.0, 10.0}, {0.02, 0.05, 0.03});
  CHECK_FALSE(c.constant_rate().has_value());
  double numeric = oracle::simpson([&](double t) { return c.rate(t); }, 1.0, 9.0, 4000);
  CHECK(c.integral(1.0, 9.0) == Catch::Approx(numeric).epsilon(1e-9));
  CHECK(std::abs(c.factor(0.0, 3.0) * c.factor(3.0, 8.0) - c.factor(0.0, 8.0)) < 1e-12);
}

TEST_CASE("states carry labels, coordinates and validity", "[model]") {
  State a = State::active();
  State d30 = State::disabled(30.0);
  State ds = State::dead_with_spouse(-5.0);
  State i2 = State::indexed(2);

  CHECK(a == State::active());
  CHECK(d30 != State::disabled(31.0));
  CHECK(d30.has_coord());
  CHECK_FALSE(a.has_coord());
  CHECK(i2 == State::indexed(2));
  CHECK(i2 != State::indexed(3));

  CHECK(d30.valid(35.0));
  CHECK_FALSE(d30.valid(29.0));  // onset in the future of the evaluation time
  CHECK(ds.valid(0.0));
  CHECK(a.valid(-100.0));

  CHECK(to_string(a) == "active");
  CHECK(to_string(d30) == "disabled(onset=30)");
  CHECK(to_string(State::dead()) == "dead");
  CHECK(to_string(ds) == "dead_spouse(d=-5)");
  CHECK(to_string(i2) == "state2");
}

TEST_CASE("total rate adds atoms and continuous mass", "[model]") {
  IntensityKernel kernel;
  kernel.horizon_begin = 0.0;
  kernel.horizon_end = 50.0;
  kernel.atoms = [](double t, const State& x) {
    std::vector<Atom> out;
    if (x.label == StateLabel::Active) {
      out.push_back({State::dead(), 0.01 + 0.001 * t});
      out.push_back({State::disabled(t), 0.02});
    }
    return out;
  };
  kernel.continuous_part = [](double, const State& x) -> std::optional<ContinuousPart> {
    if (x.label != StateLabel::Active) return std::nullopt;
    ContinuousPart part;
    part.family = [](double c) { return State::dead_with_spouse(c); };
    part.density = [](double) { return 1.0; };
    part.coord_lo = 0.0;
    part.coord_hi = 2.0;
    part.total_mass = 0.005;
    return part;
  };

  CHECK(total_rate(kernel, 10.0, State::active()) == Catch::Approx(0.045).epsilon(1e-14));
  CHECK(total_rate(kernel, 10.0, State::dead()) == 0.0);

  // additivity: dropping one atom removes exactly its rate
  IntensityKernel no_dis = kernel;
  no_dis.atoms = [](double t, const State& x) {
    std::vector<Atom> out;
    if (x.label == StateLabel::Active) out.push_back({State::dead(), 0.01 + 0.001 * t});
    return out;
  };
  CHECK(total_rate(kernel, 10.0, State::active()) -
            total_rate(no_dis, 10.0, State::active()) ==
        Catch::Approx(0.02).epsilon(1e-14));

  CHECK_THROWS_AS(total_rate(kernel, 60.0, State::active()), std::domain_error);
  CHECK_THROWS_AS(total_rate(kernel, -1.0, State::active()), std::domain_error);

  IntensityKernel bad = kernel;
  bad.atoms = [](double, const State&) {
    return std::vector<Atom>{{State::dead(), std::numeric_limits<double>::quiet_NaN()}};
  };
  CHECK_THROWS_AS(total_rate(bad, 10.0, State::active()), numeric_error);
}

TEST_CASE("disability kernel rates match the Gompertz-Makeham values", "[model]") {
  nlohmann::json doc = {{"schema", 1},        {"model", "disability_rehab"}, {"t0", 30.0},
                        {"retirement", 67.0}, {"grid_step", 1.0 / 12},       {"short_rate", 0.03}};
  ModelConfig cfg = parse_config(doc);
  JumpModel jm = build_jump_model(cfg);
  CHECK(total_rate(jm.kernel, 40.0, State::active()) ==
        Catch::Approx(0.00428285002146566).epsilon(1e-12));
  CHECK(total_rate(jm.kernel, 40.0, State::dead()) == 0.0);
  // disabled exit rate = rehabilitation (onset 40) + mortality
  double expect = 0.460263 - 0.01045 * 10.0;  // base rate at 40
  expect *= 1.0 - 0.00127096358995608;        // survival factor at onset age 40
  expect += 0.00127096358995608;
  double onset40 = total_rate(jm.kernel, 40.0, State::disabled(40.0));
  CHECK(onset40 == Catch::Approx(expect).epsilon(1e-10));
}

TEST_CASE("payment spec defaults are zero payments", "[model]") {
  PaymentSpec pay;
  CHECK(pay.rate_at(3.0, State::active()) == 0.0);
  CHECK(pay.transition_at(3.0, State::active(), State::dead()) == 0.0);
}

TEST_CASE("library error types are runtime errors", "[model]") {
  CHECK_THROWS_AS(throw numeric_error("x"), std::runtime_error);
  CHECK_THROWS_AS(throw config_error("x"), std::runtime_error);
}
