#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlife/config.hpp"
#include "mlife/csv.hpp"
#include "mlife/version.hpp"

namespace mlife::cli {

// exit codes: 0 ok, 1 comparison gate failed, 2 invalid config/usage,
// 3 numeric failure

struct ReserveOverrides {
  std::optional<double> t0, dt, r, retirement, annuity_rate;
};

namespace detail {

inline std::string iso_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline void apply_overrides(ModelConfig& cfg, const ReserveOverrides& ov) {
  const bool hazard_step_explicit = cfg.doc.contains("hazard_step");
  if (ov.t0) {
    cfg.t_start = *ov.t0;
    cfg.rehab.t0 = *ov.t0;
  }
  if (ov.retirement) {
    if (cfg.kind == ModelKind::disability_rehab) {
      cfg.retirement = *ov.retirement;
      cfg.horizon_end = *ov.retirement;
    } else {
      std::cerr << "warning: --retirement only applies to disability models, ignored\n";
    }
  }
  if (ov.dt) {
    cfg.grid_step = *ov.dt;
    if (!hazard_step_explicit) cfg.hazard_step = *ov.dt / 4.0;
  }
  if (ov.r) cfg.discount = Discount::constant(*ov.r);
  if (ov.annuity_rate) {
    cfg.annuity_rate = *ov.annuity_rate;
    cfg.spouse.annuity_rate = *ov.annuity_rate;
  }
}

inline void print_diagnostics(const Diagnostics& ds) {
  for (const Diagnostic& d : ds)
    std::cerr << (d.severity == Severity::error ? "error: " : "warning: ") << d.message << '\n';
}

inline std::optional<ModelConfig> load_and_validate(const std::string& path,
                                                    const ReserveOverrides& ov) {
  ModelConfig cfg;
  try {
    cfg = load_config(path);
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return std::nullopt;
  }
  apply_overrides(cfg, ov);
  Diagnostics ds = validate_model(cfg);
  print_diagnostics(ds);
  if (has_errors(ds)) return std::nullopt;
  return cfg;
}

// evaluation time of a reserve/estimate for a given starting state
inline double eval_time(const ModelConfig& cfg, const State& s) {
  if (s.label == StateLabel::Disabled)
    return std::min(std::max(s.coord, cfg.t_start), cfg.horizon_end);
  return cfg.t_start;
}

}  // namespace detail

inline int cmd_validate(const std::string& config_path) {
  nlohmann::json report;
  report["config"] = config_path;
  ModelConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    report["ok"] = false;
    report["diagnostics"] = nlohmann::json::array({{{"severity", "error"}, {"message", e.what()}}});
    std::cout << report.dump(2) << '\n';
    return 2;
  }
  Diagnostics ds = validate_model(cfg);
  detail::print_diagnostics(ds);
  nlohmann::json arr = nlohmann::json::array();
  for (const Diagnostic& d : ds)
    arr.push_back({{"severity", d.severity == Severity::error ? "error" : "warning"},
                   {"message", d.message}});
  report["ok"] = !has_errors(ds);
  report["diagnostics"] = arr;
  std::cout << report.dump(2) << '\n';
  return has_errors(ds) ? 2 : 0;
}

inline int cmd_reserve(const std::string& config_path, const std::string& out_dir,
                       const ReserveOverrides& ov = {}) {
  std::optional<ModelConfig> cfgo = detail::load_and_validate(config_path, ov);
  if (!cfgo) return 2;
  const ModelConfig& cfg = *cfgo;
  const std::string started = detail::iso_now();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);

  std::vector<std::string> outputs;
  try {
    switch (cfg.kind) {
      case ModelKind::discrete: {
        DiscreteModel model = build_discrete(cfg);
        ReserveTable table = solve_reserves_discrete(model, cfg.boundary, cfg.t_start,
                                                     cfg.horizon_end, cfg.grid_step);
        write_reserve_table_csv(table, out_dir + "/reserves.csv");
        outputs.push_back("reserves.csv");
        break;
      }
      case ModelKind::disability_rehab: {
        double r = *cfg.discount.constant_rate();
        DisabilityCurves curves =
            solve_disability_curves(cfg.rehab, r, cfg.retirement, cfg.t_start, cfg.grid_step,
                                    cfg.annuity_rate, cfg.slice_onsets);
        outputs = write_disability_curves(curves, out_dir);
        break;
      }
      case ModelKind::random_spouse: {
        ReserveTable table = solve_spouse_reserves(cfg.spouse, cfg.discount, cfg.t_start,
                                                   cfg.horizon_end, cfg.grid_step);
        write_reserve_table_csv(table, out_dir + "/reserves.csv");
        outputs.push_back("reserves.csv");
        break;
      }
    }
  } catch (const numeric_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }

  nlohmann::json manifest;
  manifest["command"] = "reserve";
  manifest["config"] = config_path;
  manifest["config_hash"] = detail::hash_hex(cfg.hash);
  manifest["version"] = version_string;
  manifest["started_at"] = started;
  manifest["finished_at"] = detail::iso_now();
  manifest["outputs"] = outputs;
  {
    std::ofstream out(out_dir + "/manifest.json");
    if (!out) {
      std::cerr << "error: cannot write " << out_dir << "/manifest.json\n";
      return 3;
    }
    out << manifest.dump(2) << '\n';
  }
  std::cout << manifest.dump(2) << '\n';
  return 0;
}

inline int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                        std::size_t n_paths, std::uint64_t seed, bool dump_paths = false,
                        bool antithetic = false, double mc_rate_scale = 1.0) {
  std::optional<ModelConfig> cfgo = detail::load_and_validate(config_path, {});
  if (!cfgo) return 2;
  const ModelConfig& cfg = *cfgo;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);

  try {
    JumpModel jm = build_jump_model(cfg, mc_rate_scale);
    const State x0 = cfg.start_state;
    const double t_eval = detail::eval_time(cfg, x0);
    SimulateOptions opts;
    opts.antithetic = antithetic;
    std::vector<PathSample> dumped;
    if (dump_paths)
      opts.on_path = [&dumped](std::size_t, const PathSample& p) { dumped.push_back(p); };
    McEstimate est = simulate_pv(jm, x0, t_eval, n_paths, seed, opts);

    nlohmann::json j;
    j["mean"] = est.mean;
    j["std_error"] = est.std_error;
    j["n_paths"] = est.n_paths;
    j["seed"] = est.seed;
    j["state"] = to_string(x0);
    j["t"] = t_eval;
    // no timestamps here: rerunning the same seed must be byte-identical
    {
      std::ofstream out(out_dir + "/mc_estimate.json");
      if (!out) {
        std::cerr << "error: cannot write " << out_dir << "/mc_estimate.json\n";
        return 3;
      }
      out << j.dump(2) << '\n';
    }
    if (dump_paths) write_paths_csv(dumped, out_dir + "/paths.csv");
    std::cout << j.dump(2) << '\n';
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

inline int cmd_compare(const std::string& config_path, std::size_t n_paths, std::uint64_t seed,
                       double mc_rate_scale = 1.0, bool antithetic = false) {
  std::optional<ModelConfig> cfgo = detail::load_and_validate(config_path, {});
  if (!cfgo) return 2;
  const ModelConfig& cfg = *cfgo;

  try {
    // solver values for every requested state
    struct Entry {
      State state;
      double t = 0.0;
      double solver = 0.0;
    };
    std::vector<Entry> entries;
    switch (cfg.kind) {
      case ModelKind::discrete: {
        DiscreteModel model = build_discrete(cfg);
        ReserveTable table = solve_reserves_discrete(model, cfg.boundary, cfg.t_start,
                                                     cfg.horizon_end, cfg.grid_step);
        for (const State& s : cfg.compare_states) {
          if (s.label != StateLabel::Index)
            throw config_error("compare states for a discrete model must be state indices");
          entries.push_back({s, cfg.t_start, table.values[static_cast<std::size_t>(s.index)][0]});
        }
        break;
      }
      case ModelKind::disability_rehab: {
        double r = *cfg.discount.constant_rate();
        DisabilityCurves curves = solve_disability_curves(
            cfg.rehab, r, cfg.retirement, cfg.t_start, cfg.grid_step, cfg.annuity_rate);
        const double h = curves.times[1] - curves.times[0];
        for (const State& s : cfg.compare_states) {
          if (s.label == StateLabel::Active) {
            entries.push_back({s, cfg.t_start, curves.active.front()});
          } else if (s.label == StateLabel::Disabled) {
            auto k = static_cast<std::size_t>(std::llround((s.coord - cfg.t_start) / h));
            k = std::min(k, curves.times.size() - 1);
            State snapped = State::disabled(curves.times[k]);
            entries.push_back({snapped, curves.times[k], curves.onset_reserve[k]});
          } else if (s.label == StateLabel::Dead) {
            entries.push_back({s, cfg.t_start, 0.0});
          } else {
            throw config_error("unsupported compare state for the disability model");
          }
        }
        break;
      }
      case ModelKind::random_spouse: {
        ReserveTable table = solve_spouse_reserves(cfg.spouse, cfg.discount, cfg.t_start,
                                                   cfg.horizon_end, cfg.grid_step);
        for (const State& s : cfg.compare_states) {
          double v = 0.0;
          if (s.label == StateLabel::Active) {
            v = table.values[0][0];
          } else if (s.label == StateLabel::DeadWithSpouse) {
            std::string want = mlife::detail::spouse_state_name(s.coord);
            bool found = false;
            for (std::size_t i = 0; i < table.state_names.size(); ++i) {
              if (table.state_names[i] == want) {
                v = table.values[i][0];
                found = true;
                break;
              }
            }
            if (!found)
              throw config_error("compare state " + want + " is not a phi node of the model");
          } else if (s.label != StateLabel::Dead) {
            throw config_error("unsupported compare state for the spouse model");
          }
          entries.push_back({s, cfg.t_start, v});
        }
        break;
      }
    }

    JumpModel jm = build_jump_model(cfg, mc_rate_scale);
    SimulateOptions opts;
    opts.antithetic = antithetic;

    nlohmann::json results = nlohmann::json::array();
    bool pass = true;
    double max_abs_z = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const Entry& e = entries[i];
      McEstimate est =
          simulate_pv(jm, e.state, e.t, n_paths, seed + 1000003ULL * i, opts);
      double diff = e.solver - est.mean;
      double z;
      if (est.std_error > 0.0)
        z = diff / est.std_error;
      else
        z = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      bool ok = std::isfinite(z) && std::abs(z) < 4.0;
      pass = pass && ok;
      max_abs_z = std::max(max_abs_z, std::abs(z));
      results.push_back({{"state", to_string(e.state)},
                         {"t", e.t},
                         {"solver_value", e.solver},
                         {"mc_mean", est.mean},
                         {"mc_std_error", est.std_error},
                         {"z", z},
                         {"pass", ok}});
    }
    nlohmann::json report;
    report["command"] = "compare";
    report["n_paths"] = n_paths;
    report["seed"] = seed;
    report["results"] = results;
    report["max_abs_z"] = max_abs_z;
    report["pass"] = pass;
    std::cout << report.dump(2) << '\n';
    return pass ? 0 : 1;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace mlife::cli
