#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mlife/disability.hpp"
#include "mlife/discrete.hpp"
#include "mlife/errors.hpp"
#include "mlife/model.hpp"
#include "mlife/rates.hpp"
#include "mlife/simulate.hpp"
#include "mlife/spouse.hpp"
#include "mlife/state.hpp"

namespace mlife {

enum class ModelKind { discrete, disability_rehab, random_spouse };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::discrete: return "discrete";
    case ModelKind::disability_rehab: return "disability_rehab";
    case ModelKind::random_spouse: return "random_spouse";
  }
  return "?";
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct NamedRate {
  std::string name;
  rate_fn fn;
};

struct ModelConfig {
  ModelKind kind = ModelKind::discrete;
  double t_start = 0.0;
  double horizon_end = 0.0;
  double grid_step = 0.0;
  double hazard_step = 0.0;  // simulator sub-grid; defaults to grid_step/4
  Discount discount = Discount::constant(0.0);
  std::uint64_t hash = 0;
  std::string source_path;
  nlohmann::json doc;

  // --- discrete ---
  struct DiscreteTransition {
    int from = 0, to = 0;
    rate_fn rate;
    std::string name;
  };
  struct DiscreteSojourn {
    int state = 0;
    rate_fn rate;
    bool constant = false;
    double from_t = -std::numeric_limits<double>::infinity();
    double until_t = std::numeric_limits<double>::infinity();
  };
  struct DiscreteLump {
    double time = 0.0;
    int state = -1;  // -1: every state
    double amount = 0.0;
  };
  struct DiscreteTransitionPay {
    int from = 0, to = 0;
    rate_fn amount;
  };
  std::vector<std::string> state_names;
  std::vector<DiscreteTransition> transitions;
  std::vector<DiscreteSojourn> sojourns;
  std::vector<DiscreteLump> lumps;
  std::vector<DiscreteTransitionPay> transition_pays;
  std::vector<double> boundary;

  // --- disability_rehab ---
  RehabRates rehab;
  double retirement = 0.0;
  double annuity_rate = 1.0;
  std::vector<double> slice_onsets;

  // --- random_spouse ---
  SpouseModel spouse;

  State start_state = State::active();
  std::vector<State> compare_states;

  std::vector<NamedRate> named_rates;  // sampled by validate_model
};

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& j, const char* key,
                                           const char* where) {
  auto it = j.find(key);
  if (it == j.end()) {
    std::ostringstream os;
    os << where << ": missing required field \"" << key << "\"";
    throw config_error(os.str());
  }
  return *it;
}

inline double require_number(const nlohmann::json& j, const char* key, const char* where) {
  const nlohmann::json& v = require_field(j, key, where);
  if (!v.is_number()) {
    std::ostringstream os;
    os << where << ": field \"" << key << "\" must be a number";
    throw config_error(os.str());
  }
  return v.get<double>();
}

inline double number_or(const nlohmann::json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw config_error(std::string("field \"") + key + "\" must be a number");
  return it->get<double>();
}

// Rate spec: bare number, {"const": x}, {"makeham": {"a","b","c"}} (a + 10^(b t + c)),
// {"linear": {"intercept","slope"}}, or {"table": {"times": [...], "values": [...]}}.
inline rate_fn parse_rate(const nlohmann::json& j, const std::string& what,
                          bool* is_constant = nullptr) {
  if (is_constant) *is_constant = false;
  if (j.is_number()) {
    if (is_constant) *is_constant = true;
    return constant_rate(j.get<double>());
  }
  if (!j.is_object()) throw config_error(what + ": rate spec must be a number or an object");
  if (auto it = j.find("const"); it != j.end()) {
    if (!it->is_number()) throw config_error(what + ": \"const\" must be a number");
    if (is_constant) *is_constant = true;
    return constant_rate(it->get<double>());
  }
  if (auto it = j.find("makeham"); it != j.end()) {
    double a = require_number(*it, "a", what.c_str());
    double b = require_number(*it, "b", what.c_str());
    double c = require_number(*it, "c", what.c_str());
    return makeham_rate(a, b, c);
  }
  if (auto it = j.find("linear"); it != j.end()) {
    double i0 = require_number(*it, "intercept", what.c_str());
    double sl = require_number(*it, "slope", what.c_str());
    return linear_rate(i0, sl);
  }
  if (auto it = j.find("table"); it != j.end()) {
    const nlohmann::json& times = require_field(*it, "times", what.c_str());
    const nlohmann::json& values = require_field(*it, "values", what.c_str());
    if (!times.is_array() || !values.is_array() || times.size() != values.size() ||
        times.size() < 1)
      throw config_error(what + ": table needs equal-length times/values arrays");
    std::vector<double> ts, vs;
    for (const auto& v : times) ts.push_back(v.get<double>());
    for (const auto& v : values) vs.push_back(v.get<double>());
    return table_rate(std::move(ts), std::move(vs));
  }
  throw config_error(what + ": unknown rate spec (want const/makeham/linear/table)");
}

inline Discount parse_discount(const nlohmann::json& j) {
  const nlohmann::json& v = require_field(j, "short_rate", "config");
  if (v.is_number()) return Discount::constant(v.get<double>());
  if (v.is_object() && v.contains("times") && v.contains("rates")) {
    std::vector<double> ts, rs;
    for (const auto& x : v["times"]) ts.push_back(x.get<double>());
    for (const auto& x : v["rates"]) rs.push_back(x.get<double>());
    if (ts.size() != rs.size() || ts.empty())
      throw config_error("short_rate: times/rates must be equal-length and non-empty");
    return Discount::curve(std::move(ts), std::move(rs));
  }
  throw config_error("short_rate must be a number or {times, rates}");
}

inline State parse_state_ref(const nlohmann::json& j, const ModelConfig& cfg,
                             const char* where) {
  if (j.is_number_integer()) {
    int i = j.get<int>();
    if (cfg.kind != ModelKind::discrete)
      throw config_error(std::string(where) + ": integer state refs are for discrete models");
    return State::indexed(i);
  }
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "active") return State::active();
    if (s == "dead") return State::dead();
    for (std::size_t i = 0; i < cfg.state_names.size(); ++i)
      if (cfg.state_names[i] == s) return State::indexed(static_cast<int>(i));
    throw config_error(std::string(where) + ": unknown state \"" + s + "\"");
  }
  if (j.is_object()) {
    if (auto it = j.find("disabled_onset"); it != j.end())
      return State::disabled(it->get<double>());
    if (auto it = j.find("spouse_diff"); it != j.end())
      return State::dead_with_spouse(it->get<double>());
  }
  throw config_error(std::string(where) +
                     ": state ref must be an index, a name, {disabled_onset}, or {spouse_diff}");
}

}  // namespace detail

inline ModelConfig parse_config(const nlohmann::json& doc, std::string source_path = "") {
  using detail::number_or;
  using detail::parse_rate;
  using detail::require_field;
  using detail::require_number;

  if (!doc.is_object()) throw config_error("config root must be a JSON object");
  const nlohmann::json& schema = require_field(doc, "schema", "config");
  if (!schema.is_number_integer() || schema.get<int>() != 1)
    throw config_error("unsupported config schema (want schema: 1)");

  ModelConfig cfg;
  cfg.doc = doc;
  cfg.source_path = std::move(source_path);
  cfg.hash = fnv1a64(doc.dump());

  std::string kind = require_field(doc, "model", "config").get<std::string>();
  if (kind == "discrete")
    cfg.kind = ModelKind::discrete;
  else if (kind == "disability_rehab")
    cfg.kind = ModelKind::disability_rehab;
  else if (kind == "random_spouse")
    cfg.kind = ModelKind::random_spouse;
  else
    throw config_error("unknown model kind \"" + kind + "\"");

  cfg.discount = detail::parse_discount(doc);
  cfg.grid_step = require_number(doc, "grid_step", "config");

  switch (cfg.kind) {
    case ModelKind::discrete: {
      cfg.t_start = number_or(doc, "t_start", 0.0);
      cfg.horizon_end = require_number(doc, "horizon_end", "config");
      const nlohmann::json& states = require_field(doc, "states", "config");
      if (!states.is_array() || states.empty())
        throw config_error("\"states\" must be a non-empty array of names");
      for (const auto& s : states) cfg.state_names.push_back(s.get<std::string>());
      const int m = static_cast<int>(cfg.state_names.size());

      auto check_index = [&](int i, const char* what) {
        if (i < 0 || i >= m) {
          std::ostringstream os;
          os << what << ": state index " << i << " out of range [0, " << m << ")";
          throw config_error(os.str());
        }
      };
      for (const auto& tj : doc.value("intensities", nlohmann::json::array())) {
        ModelConfig::DiscreteTransition tr;
        tr.from = static_cast<int>(require_number(tj, "from", "intensities"));
        tr.to = static_cast<int>(require_number(tj, "to", "intensities"));
        check_index(tr.from, "intensities");
        check_index(tr.to, "intensities");
        tr.name = "intensity[" + cfg.state_names[tr.from] + "->" + cfg.state_names[tr.to] + "]";
        tr.rate = parse_rate(require_field(tj, "rate", "intensities"), tr.name);
        cfg.named_rates.push_back({tr.name, tr.rate});
        cfg.transitions.push_back(std::move(tr));
      }
      for (const auto& sj : doc.value("sojourn_rates", nlohmann::json::array())) {
        ModelConfig::DiscreteSojourn so;
        so.state = static_cast<int>(require_number(sj, "state", "sojourn_rates"));
        check_index(so.state, "sojourn_rates");
        so.rate = parse_rate(require_field(sj, "rate", "sojourn_rates"),
                             "sojourn_rates[" + cfg.state_names[so.state] + "]", &so.constant);
        so.from_t = number_or(sj, "from", so.from_t);
        so.until_t = number_or(sj, "until", so.until_t);
        cfg.sojourns.push_back(std::move(so));
      }
      for (const auto& lj : doc.value("sojourn_lumps", nlohmann::json::array())) {
        ModelConfig::DiscreteLump lump;
        lump.time = require_number(lj, "time", "sojourn_lumps");
        lump.amount = require_number(lj, "amount", "sojourn_lumps");
        if (lj.contains("state")) {
          lump.state = static_cast<int>(lj["state"].get<double>());
          check_index(lump.state, "sojourn_lumps");
        }
        cfg.lumps.push_back(lump);
      }
      for (const auto& pj : doc.value("transition_payments", nlohmann::json::array())) {
        ModelConfig::DiscreteTransitionPay tp;
        tp.from = static_cast<int>(require_number(pj, "from", "transition_payments"));
        tp.to = static_cast<int>(require_number(pj, "to", "transition_payments"));
        check_index(tp.from, "transition_payments");
        check_index(tp.to, "transition_payments");
        tp.amount = parse_rate(require_field(pj, "amount", "transition_payments"),
                               "transition_payments[" + cfg.state_names[tp.from] + "->" +
                                   cfg.state_names[tp.to] + "]");
        cfg.transition_pays.push_back(std::move(tp));
      }
      if (doc.contains("boundary")) {
        for (const auto& b : doc["boundary"]) cfg.boundary.push_back(b.get<double>());
      } else {
        cfg.boundary.assign(cfg.state_names.size(), 0.0);
      }
      cfg.start_state = State::indexed(0);
      break;
    }
    case ModelKind::disability_rehab: {
      cfg.t_start = require_number(doc, "t0", "config");
      cfg.retirement = require_number(doc, "retirement", "config");
      cfg.horizon_end = cfg.retirement;
      cfg.annuity_rate = number_or(doc, "annuity_rate", 1.0);
      cfg.rehab = default_rates(cfg.t_start);
      if (auto it = doc.find("rates"); it != doc.end()) {
        const nlohmann::json& rj = *it;
        if (rj.contains("mu_star_dagger"))
          cfg.rehab.mu_star_dagger = parse_rate(rj["mu_star_dagger"], "rates.mu_star_dagger");
        if (rj.contains("mu_star_diamond"))
          cfg.rehab.mu_star_diamond = parse_rate(rj["mu_star_diamond"], "rates.mu_star_diamond");
        if (rj.contains("mu_diamond_star_base"))
          cfg.rehab.mu_diamond_star_base =
              parse_rate(rj["mu_diamond_star_base"], "rates.mu_diamond_star_base");
        if (rj.contains("mu_diamond_dagger"))
          cfg.rehab.mu_diamond_dagger =
              parse_rate(rj["mu_diamond_dagger"], "rates.mu_diamond_dagger");
        else if (rj.contains("mu_star_dagger"))
          cfg.rehab.mu_diamond_dagger = cfg.rehab.mu_star_dagger;
      }
      for (const auto& s : doc.value("slice_onsets", nlohmann::json::array()))
        cfg.slice_onsets.push_back(s.get<double>());
      cfg.named_rates.push_back({"mu_star_dagger", cfg.rehab.mu_star_dagger});
      cfg.named_rates.push_back({"mu_star_diamond", cfg.rehab.mu_star_diamond});
      cfg.named_rates.push_back({"mu_diamond_dagger", cfg.rehab.mu_diamond_dagger});
      {
        RehabRates rr = cfg.rehab;
        cfg.named_rates.push_back(
            {"mu_diamond_star(t, onset=t)", [rr](double t) { return rr.rehab_rate(t, t); }});
        cfg.named_rates.push_back({"mu_diamond_star(t, onset=t_start)",
                                   [rr, t0 = cfg.t_start](double t) { return rr.rehab_rate(t, t0); }});
      }
      cfg.start_state = State::active();
      break;
    }
    case ModelKind::random_spouse: {
      cfg.t_start = number_or(doc, "t_start", 0.0);
      cfg.horizon_end = require_number(doc, "horizon_end", "config");
      SpouseModel& sp = cfg.spouse;
      sp.mu_star_dagger = parse_rate(require_field(doc, "mu_star_dagger", "config"),
                                     "mu_star_dagger");
      sp.spouse_mortality = parse_rate(require_field(doc, "spouse_mortality", "config"),
                                       "spouse_mortality");
      sp.spouse_probability = parse_rate(require_field(doc, "spouse_probability", "config"),
                                         "spouse_probability");
      sp.annuity_rate = number_or(doc, "annuity_rate", 1.0);
      sp.insured_age_at_t0 = number_or(doc, "insured_age_at_t0", cfg.t_start);
      const nlohmann::json& nodes = require_field(doc, "phi_nodes", "config");
      if (!nodes.is_array() || nodes.empty())
        throw config_error("phi_nodes must be a non-empty array");
      for (const auto& nj : nodes) {
        SpouseNode node;
        node.age_difference = require_number(nj, "age_difference", "phi_nodes");
        node.weight = require_number(nj, "weight", "phi_nodes");
        sp.phi_nodes.push_back(node);
      }
      cfg.named_rates.push_back({"mu_star_dagger", sp.mu_star_dagger});
      {
        auto mort = sp.spouse_mortality;
        double age0 = sp.insured_age_at_t0, ts = cfg.t_start;
        for (std::size_t j = 0; j < sp.phi_nodes.size(); ++j) {
          double d = sp.phi_nodes[j].age_difference;
          cfg.named_rates.push_back(
              {"spouse_mortality[node " + std::to_string(j) + "]",
               [mort, age0, ts, d](double t) { return mort(age0 + (t - ts) - d); }});
        }
      }
      cfg.start_state = State::active();
      break;
    }
  }

  cfg.hazard_step = number_or(doc, "hazard_step", cfg.grid_step / 4.0);
  if (auto it = doc.find("start_state"); it != doc.end())
    cfg.start_state = detail::parse_state_ref(*it, cfg, "start_state");
  if (auto it = doc.find("compare_states"); it != doc.end()) {
    for (const auto& sj : *it)
      cfg.compare_states.push_back(detail::parse_state_ref(sj, cfg, "compare_states"));
  } else {
    cfg.compare_states.push_back(cfg.start_state);
  }
  return cfg;
}

inline ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config parse error in ") + path + ": " + e.what());
  }
  return parse_config(doc, path);
}

// Semantic checks; structural problems throw from load_config instead.
inline Diagnostics validate_model(const ModelConfig& cfg) {
  Diagnostics out;
  auto error = [&](std::string msg) { out.push_back({Severity::error, std::move(msg)}); };
  auto warning = [&](std::string msg) { out.push_back({Severity::warning, std::move(msg)}); };

  if (!(cfg.grid_step > 0.0)) {
    error("grid_step must be positive");
  } else {
    double span = cfg.horizon_end - cfg.t_start;
    if (!(span > 0.0)) {
      error("horizon_end must exceed the evaluation start");
    } else {
      double steps = span / cfg.grid_step;
      if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
        std::ostringstream os;
        os << "horizon [" << cfg.t_start << ", " << cfg.horizon_end
           << "] is not a whole number of grid steps of " << cfg.grid_step;
        error(os.str());
      }
    }
  }
  if (!(cfg.hazard_step > 0.0)) error("hazard_step must be positive");

  // sample every named rate on the horizon
  if (cfg.horizon_end > cfg.t_start) {
    const int n_samples = 2000;
    for (const NamedRate& nr : cfg.named_rates) {
      bool neg_reported = false, nan_reported = false;
      for (int i = 0; i <= n_samples; ++i) {
        double t = cfg.t_start + (cfg.horizon_end - cfg.t_start) * i / n_samples;
        double v = nr.fn(t);
        if (!std::isfinite(v) && !nan_reported) {
          std::ostringstream os;
          os << "rate " << nr.name << " is non-finite at t=" << t;
          error(os.str());
          nan_reported = true;
        } else if (v < 0.0 && !neg_reported) {
          std::ostringstream os;
          os << "rate " << nr.name << " is negative at t=" << t << " (value " << v << ")";
          warning(os.str());
          neg_reported = true;
        }
        if (neg_reported && nan_reported) break;
      }
    }
  }

  switch (cfg.kind) {
    case ModelKind::discrete: {
      const int m = static_cast<int>(cfg.state_names.size());
      if (static_cast<int>(cfg.boundary.size()) != m) {
        std::ostringstream os;
        os << "boundary has " << cfg.boundary.size() << " entries, model has " << m
           << " states";
        error(os.str());
      }
      for (double b : cfg.boundary)
        if (!std::isfinite(b)) error("boundary values must be finite");
      for (const auto& tr : cfg.transitions)
        if (tr.from == tr.to) error(tr.name + ": a transition may not target its own state");
      break;
    }
    case ModelKind::disability_rehab: {
      if (!cfg.discount.constant_rate())
        error("disability_rehab models need a constant short rate");
      if (cfg.annuity_rate < 0.0) error("annuity_rate must be non-negative");
      if (!std::isfinite(cfg.annuity_rate)) error("annuity_rate must be finite");
      for (double s : cfg.slice_onsets)
        if (s < cfg.t_start - 1e-9 || s > cfg.horizon_end + 1e-9) {
          std::ostringstream os;
          os << "slice onset " << s << " outside [" << cfg.t_start << ", " << cfg.horizon_end
             << "]";
          error(os.str());
        }
      break;
    }
    case ModelKind::random_spouse: {
      if (cfg.spouse.annuity_rate < 0.0) error("annuity_rate must be non-negative");
      double wsum = 0.0;
      for (std::size_t j = 0; j < cfg.spouse.phi_nodes.size(); ++j) {
        const SpouseNode& nd = cfg.spouse.phi_nodes[j];
        if (nd.weight < 0.0) {
          std::ostringstream os;
          os << "phi node " << j << " has negative weight " << nd.weight;
          error(os.str());
        }
        wsum += nd.weight;
        if (cfg.spouse.insured_age_at_t0 - nd.age_difference < 0.0) {
          std::ostringstream os;
          os << "phi node " << j << " implies a negative spouse age at the evaluation start";
          error(os.str());
        }
      }
      if (std::abs(wsum - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "phi node weights sum to " << wsum << ", expected 1";
        error(os.str());
      }
      if (cfg.horizon_end > cfg.t_start) {
        bool reported = false;
        for (int i = 0; i <= 2000 && !reported; ++i) {
          double t = cfg.t_start + (cfg.horizon_end - cfg.t_start) * i / 2000;
          double g = cfg.spouse.spouse_probability(t);
          if (!(g >= 0.0 && g <= 1.0)) {
            std::ostringstream os;
            os << "spouse_probability is " << g << " at t=" << t << ", outside [0, 1]";
            error(os.str());
            reported = true;
          }
        }
      }
      break;
    }
  }

  for (const State& s : cfg.compare_states) {
    if (s.label == StateLabel::Disabled &&
        (s.coord < cfg.t_start - 1e-9 || s.coord > cfg.horizon_end + 1e-9)) {
      std::ostringstream os;
      os << "compare state " << to_string(s) << " has onset outside the horizon";
      error(os.str());
    }
    if (s.label == StateLabel::Index &&
        (s.index < 0 || s.index >= static_cast<int>(cfg.state_names.size())))
      error("compare state index out of range");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

inline PaymentSpec build_discrete_payments(const ModelConfig& cfg) {
  PaymentSpec pay;
  bool all_const = true;
  std::vector<double> breaks;
  auto sojourns = cfg.sojourns;
  for (const auto& so : sojourns) {
    all_const = all_const && so.constant;
    if (so.from_t > cfg.t_start && so.from_t < cfg.horizon_end) breaks.push_back(so.from_t);
    if (so.until_t > cfg.t_start && so.until_t < cfg.horizon_end) breaks.push_back(so.until_t);
  }
  if (!sojourns.empty()) {
    pay.sojourn_rate = [sojourns](double t, const State& g) {
      double total = 0.0;
      for (const auto& so : sojourns)
        if (g.index == so.state && t >= so.from_t && t < so.until_t) total += so.rate(t);
      return total;
    };
  }
  pay.sojourn_breakpoints = std::move(breaks);
  pay.sojourn_piecewise_constant = all_const;
  for (const auto& lump : cfg.lumps) {
    SojournLump sl;
    sl.time = lump.time;
    sl.amount = lump.amount;
    if (lump.state >= 0) {
      int want = lump.state;
      sl.applies = [want](const State& g) { return g.index == want; };
    }
    pay.sojourn_lumps.push_back(std::move(sl));
  }
  if (!cfg.transition_pays.empty()) {
    auto pays = cfg.transition_pays;
    pay.transition = [pays](double t, const State& g, const State& h) {
      double total = 0.0;
      for (const auto& tp : pays)
        if (g.index == tp.from && h.index == tp.to) total += tp.amount(t);
      return total;
    };
  }
  return pay;
}

inline DiscreteModel build_discrete(const ModelConfig& cfg) {
  if (cfg.kind != ModelKind::discrete)
    throw config_error("build_discrete: config is not a discrete model");
  DiscreteModel m;
  m.n_states = static_cast<int>(cfg.state_names.size());
  m.state_names = cfg.state_names;
  m.discount = cfg.discount;
  auto transitions = cfg.transitions;
  m.intensity = [transitions](double t, int i, int j) {
    double total = 0.0;
    for (const auto& tr : transitions)
      if (tr.from == i && tr.to == j) total += tr.rate(t);
    return total;
  };
  m.payments = build_discrete_payments(cfg);
  return m;
}

inline PaymentSpec build_annuity_payments(double annuity_rate, StateLabel paying_label,
                                          double until) {
  PaymentSpec pay;
  pay.sojourn_rate = [annuity_rate, paying_label, until](double t, const State& g) {
    return (g.label == paying_label && t < until) ? annuity_rate : 0.0;
  };
  pay.sojourn_breakpoints.push_back(until);  // segment integrals must split here
  pay.sojourn_piecewise_constant = true;
  return pay;
}

// Jump-process view of any config; rate_scale corrupts every intensity by a
// common factor (comparison-gate test hook).
inline JumpModel build_jump_model(const ModelConfig& cfg, double rate_scale = 1.0) {
  JumpModel jm;
  jm.discount = cfg.discount;
  jm.horizon_end = cfg.horizon_end;
  jm.hazard_step = cfg.hazard_step > 0.0 ? cfg.hazard_step : cfg.grid_step / 4.0;
  jm.kernel.horizon_begin = cfg.t_start;
  jm.kernel.horizon_end = cfg.horizon_end;
  jm.kernel.description = to_string(cfg.kind);

  const double scale = rate_scale;
  switch (cfg.kind) {
    case ModelKind::discrete: {
      auto transitions = cfg.transitions;
      const int m = static_cast<int>(cfg.state_names.size());
      jm.kernel.atoms = [transitions, scale](double t, const State& x) {
        std::vector<Atom> out;
        for (const auto& tr : transitions)
          if (tr.from == x.index) out.push_back({State::indexed(tr.to), scale * tr.rate(t)});
        return out;
      };
      jm.payments = build_discrete_payments(cfg);
      for (int i = 0; i < m; ++i) {
        rate_fn lam = [transitions, scale, i](double t) {
          double total = 0.0;
          for (const auto& tr : transitions)
            if (tr.from == i) total += tr.rate(t);
          return scale * total;
        };
        jm.hazard_tables.push_back(std::make_shared<const CumulativeHazard>(
            lam, cfg.t_start, cfg.horizon_end, jm.hazard_step));
      }
      auto tables = jm.hazard_tables;
      jm.hazard_mix_for = [tables](const State& x) {
        HazardMix mix;
        if (x.index >= 0 && static_cast<std::size_t>(x.index) < tables.size())
          mix.add(tables[static_cast<std::size_t>(x.index)].get(), 1.0);
        return mix;
      };
      break;
    }
    case ModelKind::disability_rehab: {
      RehabRates rr = cfg.rehab;
      jm.kernel.atoms = [rr, scale](double t, const State& x) {
        std::vector<Atom> out;
        if (x.label == StateLabel::Active) {
          out.push_back({State::disabled(t), scale * rr.mu_star_diamond(t)});
          out.push_back({State::dead(), scale * rr.mu_star_dagger(t)});
        } else if (x.label == StateLabel::Disabled) {
          out.push_back({State::active(), scale * rr.rehab_rate(t, x.coord)});
          out.push_back({State::dead(), scale * rr.mu_diamond_dagger(t)});
        }
        return out;
      };
      jm.payments =
          build_annuity_payments(cfg.annuity_rate, StateLabel::Disabled, cfg.retirement);
      // shared tables: active exit rates, rehabilitation base, disabled mortality
      jm.hazard_tables.push_back(std::make_shared<const CumulativeHazard>(
          rr.mu_star_dagger, cfg.t_start, cfg.horizon_end, jm.hazard_step));
      jm.hazard_tables.push_back(std::make_shared<const CumulativeHazard>(
          rr.mu_star_diamond, cfg.t_start, cfg.horizon_end, jm.hazard_step));
      jm.hazard_tables.push_back(std::make_shared<const CumulativeHazard>(
          rr.mu_diamond_star_base, cfg.t_start, cfg.horizon_end, jm.hazard_step));
      jm.hazard_tables.push_back(std::make_shared<const CumulativeHazard>(
          rr.mu_diamond_dagger, cfg.t_start, cfg.horizon_end, jm.hazard_step));
      auto tables = jm.hazard_tables;
      jm.hazard_mix_for = [tables, rr, scale](const State& x) {
        HazardMix mix;
        if (x.label == StateLabel::Active) {
          mix.add(tables[0].get(), scale);
          mix.add(tables[1].get(), scale);
        } else if (x.label == StateLabel::Disabled) {
          mix.add(tables[2].get(), scale * (1.0 - rr.mu_diamond_dagger(x.coord)));
          mix.add(tables[3].get(), scale);
        }
        return mix;
      };
      break;
    }
    case ModelKind::random_spouse: {
      SpouseModel sp = cfg.spouse;
      double ts = cfg.t_start;
      jm.kernel.atoms = [sp, scale, ts](double t, const State& x) {
        std::vector<Atom> out;
        if (x.label == StateLabel::Active) {
          double mu = sp.mu_star_dagger(t);
          double g = sp.spouse_probability(t);
          for (const SpouseNode& nd : sp.phi_nodes)
            out.push_back(
                {State::dead_with_spouse(nd.age_difference), scale * mu * g * nd.weight});
          out.push_back({State::dead(), scale * mu * (1.0 - g)});
        } else if (x.label == StateLabel::DeadWithSpouse) {
          double age = sp.insured_age_at_t0 + (t - ts) - x.coord;
          out.push_back({State::dead(), scale * sp.spouse_mortality(age)});
        }
        return out;
      };
      jm.payments = build_annuity_payments(sp.annuity_rate, StateLabel::DeadWithSpouse,
                                           cfg.horizon_end);
      jm.hazard_tables.push_back(std::make_shared<const CumulativeHazard>(
          sp.mu_star_dagger, cfg.t_start, cfg.horizon_end, jm.hazard_step));
      std::vector<double> diffs;
      for (const SpouseNode& nd : sp.phi_nodes) {
        diffs.push_back(nd.age_difference);
        rate_fn lam = [sp, ts, d = nd.age_difference](double t) {
          return sp.spouse_mortality(sp.insured_age_at_t0 + (t - ts) - d);
        };
        jm.hazard_tables.push_back(std::make_shared<const CumulativeHazard>(
            lam, cfg.t_start, cfg.horizon_end, jm.hazard_step));
      }
      auto tables = jm.hazard_tables;
      jm.hazard_mix_for = [tables, diffs, scale](const State& x) {
        HazardMix mix;
        if (x.label == StateLabel::Active) {
          mix.add(tables[0].get(), scale);
        } else if (x.label == StateLabel::DeadWithSpouse) {
          for (std::size_t j = 0; j < diffs.size(); ++j) {
            if (diffs[j] == x.coord) {
              mix.add(tables[1 + j].get(), scale);
              return mix;
            }
          }
          throw numeric_error("simulator reached a spouse state with an unknown age difference");
        }
        return mix;
      };
      break;
    }
  }
  return jm;
}

}  // namespace mlife
