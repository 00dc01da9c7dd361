#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "mlife/cli.hpp"
#include "mlife/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Multi-state life insurance reserves: solvers and Monte Carlo"};
  app.set_version_flag("--version", std::string(mlife::version_string));
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  mlife::cli::ReserveOverrides ov;
  double t0 = 0, dt = 0, r = 0, retirement = 0, annuity = 0;

  auto* reserve = app.add_subcommand("reserve", "solve reserves and write CSV curves");
  reserve->add_option("config", config_path, "model config (JSON)")->required();
  reserve->add_option("-o,--out", out_dir, "output directory");
  auto* opt_t0 = reserve->add_option("--t0", t0, "override the evaluation start / inception age");
  auto* opt_dt = reserve->add_option("--dt", dt, "override the grid step (years)");
  auto* opt_r = reserve->add_option("--r", r, "override the constant short rate");
  auto* opt_ret = reserve->add_option("--retirement", retirement, "override the retirement age");
  auto* opt_ann = reserve->add_option("--annuity-rate", annuity, "override the annuity rate");

  std::size_t n_paths = 10000;
  std::uint64_t seed = 42;
  bool dump_paths = false, antithetic = false;
  double mc_rate_scale = 1.0;

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of the reserve");
  simulate->add_option("config", config_path, "model config (JSON)")->required();
  simulate->add_option("-o,--out", out_dir, "output directory");
  simulate->add_option("--paths", n_paths, "number of simulated paths");
  simulate->add_option("--seed", seed, "RNG seed");
  simulate->add_flag("--dump-paths", dump_paths, "write per-path CSV (serial run)");
  simulate->add_flag("--antithetic", antithetic, "antithetic variates (paths must be even)");
  simulate->add_option("--mc-rate-scale", mc_rate_scale,
                       "scale all simulated intensities (testing hook)");

  auto* compare = app.add_subcommand("compare", "solver vs Monte Carlo z-score gate");
  compare->add_option("config", config_path, "model config (JSON)")->required();
  compare->add_option("--paths", n_paths, "number of simulated paths")->default_val(100000);
  compare->add_option("--seed", seed, "RNG seed");
  compare->add_flag("--antithetic", antithetic, "antithetic variates");
  compare->add_option("--mc-rate-scale", mc_rate_scale,
                      "scale all simulated intensities (testing hook)");

  auto* validate = app.add_subcommand("validate", "check a config and print diagnostics");
  validate->add_option("config", config_path, "model config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (reserve->parsed()) {
    if (*opt_t0) ov.t0 = t0;
    if (*opt_dt) ov.dt = dt;
    if (*opt_r) ov.r = r;
    if (*opt_ret) ov.retirement = retirement;
    if (*opt_ann) ov.annuity_rate = annuity;
    return mlife::cli::cmd_reserve(config_path, out_dir, ov);
  }
  if (simulate->parsed())
    return mlife::cli::cmd_simulate(config_path, out_dir, n_paths, seed, dump_paths, antithetic,
                                    mc_rate_scale);
  if (compare->parsed())
    return mlife::cli::cmd_compare(config_path, n_paths, seed, mc_rate_scale, antithetic);
  if (validate->parsed()) return mlife::cli::cmd_validate(config_path);
  return 2;
}
