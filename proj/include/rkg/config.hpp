#pragma once

#include "json.hpp"
#include <string>
#include <vector>

#include "rkg/analytic_profile.hpp"
#include "rkg/decay_fit.hpp"
#include "rkg/dynamics.hpp"

namespace rkg {

inline constexpr int config_schema_version = 1;

/// Validation failure; `path` is the offending JSON pointer.
struct ConfigError : std::invalid_argument {
  std::string path;
  ConfigError(std::string p, const std::string& what)
      : std::invalid_argument(p + ": " + what), path(std::move(p)) {}
};

enum class Experiment { cauchy, scatter, resonance, poincare, asymptotics };

inline const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::cauchy: return "cauchy";
    case Experiment::scatter: return "scatter";
    case Experiment::resonance: return "resonance";
    case Experiment::poincare: return "poincare";
    case Experiment::asymptotics: return "asymptotics";
  }
  return "?";
}

inline Experiment parse_experiment(const std::string& s) {
  if (s == "cauchy") return Experiment::cauchy;
  if (s == "scatter") return Experiment::scatter;
  if (s == "resonance") return Experiment::resonance;
  if (s == "poincare" || s == "poincare-check") return Experiment::poincare;
  if (s == "asymptotics") return Experiment::asymptotics;
  throw ConfigError("/experiment", "unknown experiment '" + s + "'");
}

/// Documented defaults. Every key a config may contain appears here; keys
/// absent from this document are rejected.
inline const nlohmann::json& config_defaults() {
  static const nlohmann::json d = nlohmann::json::parse(R"({
    "schema_version": 1,
    "experiment": "scatter",
    "system": "A",
    "mass": 1.0,
    "grid": {"n": 128, "L": 64.0},
    "data": {"f1": [], "f2": []},
    "time": {
      "t_max": 50.0,
      "dt": 0.05,
      "doublings": 1,
      "t_start": 5.0,
      "t_end": 200.0,
      "samples": 24,
      "fit_window": [20.0, 200.0]
    },
    "output": {"dir": "out"},
    "poincare": {
      "intertwine": false,
      "shifts": [{"time": 0.5, "space": [0.0, 0.0]}, {"time": 0.0, "space": [0.5, -0.3]}]
    },
    "asymptotics": {
      "mode": "cone",
      "M": 1.0,
      "eps": 1,
      "n_terms": 2,
      "R": 0.99,
      "n_s": 801,
      "interpolation_order": 6,
      "triple": {"M": 2.0, "eps": 1, "M1": 1.0, "eps1": 1, "M2": 1.0, "eps2": 1}
    },
    "thresholds": {
      "reality_drift_per_time": 1e-10,
      "alpha_max_A": -0.8,
      "alpha_max_B": -0.3,
      "log_r2_min": 0.99,
      "ladder_ratio_min": 1.5,
      "integrand_slope_A": -1.8,
      "integrand_slope_B": -1.5,
      "growth_max": 0.3,
      "jacobi_max": 1e-12,
      "linear_bracket_max": 1e-8,
      "nonlinear_bracket_max": 1e-6,
      "intertwine_max": 1e-4,
      "rest_slope_margin": 0.2,
      "round_trip_max": 1e-6,
      "delta_slope_n0": -1.8,
      "delta_slope_n1": -2.7,
      "f0_identity_max": 1e-10
    }
  })");
  return d;
}

namespace detail {

/// Recursively fills defaults into `user`, rejecting keys the defaults lack.
/// Arrays are taken from the user as a whole.
inline void merge_strict(nlohmann::json& user, const nlohmann::json& defaults, const std::string& path) {
  if (!user.is_object()) throw ConfigError(path.empty() ? "/" : path, "expected an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    if (!defaults.contains(it.key())) throw ConfigError(path + "/" + it.key(), "unknown key");
  }
  for (auto it = defaults.begin(); it != defaults.end(); ++it) {
    const std::string p = path + "/" + it.key();
    if (!user.contains(it.key())) {
      user[it.key()] = it.value();
      continue;
    }
    nlohmann::json& u = user[it.key()];
    const nlohmann::json& d = it.value();
    if (d.is_object()) {
      merge_strict(u, d, p);
    } else if (d.is_number() && !u.is_number()) {
      throw ConfigError(p, "expected a number");
    } else if (d.is_string() && !u.is_string()) {
      throw ConfigError(p, "expected a string");
    } else if (d.is_boolean() && !u.is_boolean()) {
      throw ConfigError(p, "expected a boolean");
    } else if (d.is_array() && !u.is_array()) {
      throw ConfigError(p, "expected an array");
    }
  }
}

inline double number_at(const nlohmann::json& j, const std::string& ptr) {
  return j.at(nlohmann::json::json_pointer(ptr)).get<double>();
}

inline int int_at(const nlohmann::json& j, const std::string& ptr) {
  const double v = number_at(j, ptr);
  if (v != std::floor(v)) throw ConfigError(ptr, "expected an integer");
  return int(v);
}

inline std::array<double, 2> pair_at(const nlohmann::json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(path, "expected [number, number]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

inline CatalogTerm parse_term(const nlohmann::json& t, const std::string& path) {
  static const nlohmann::json term_defaults = nlohmann::json::parse(
      R"({"amplitude": [1.0, 0.0], "center": [0.0, 0.0], "width": 1.0, "hermite": [0, 0], "shift": [0.0, 0.0]})");
  nlohmann::json u = t;
  merge_strict(u, term_defaults, path);
  CatalogTerm c;
  const auto a = pair_at(u["amplitude"], path + "/amplitude");
  c.amplitude = {a[0], a[1]};
  c.center = pair_at(u["center"], path + "/center");
  c.width = u["width"].get<double>();
  if (!(c.width > 0.0)) throw ConfigError(path + "/width", "must be positive");
  const auto h = pair_at(u["hermite"], path + "/hermite");
  c.hermite = {int(h[0]), int(h[1])};
  if (h[0] != c.hermite[0] || h[1] != c.hermite[1] || c.hermite[0] < 0 || c.hermite[1] < 0 ||
      c.hermite[0] + c.hermite[1] > 2) {
    throw ConfigError(path + "/hermite", "multi-index must be nonnegative integers with |a| <= 2");
  }
  c.shift = pair_at(u["shift"], path + "/shift");
  return c;
}

}  // namespace detail

struct TimeConfig {
  double t_max = 50.0;
  double dt = 0.05;
  int doublings = 1;
  double t_start = 5.0;
  double t_end = 200.0;
  int samples = 24;
  double fit_lo = 20.0;
  double fit_hi = 200.0;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::scatter;
  System kind = System::A;
  double mass = 1.0;
  Grid grid{128, 64.0};
  AnalyticProfile f1;
  AnalyticProfile f2;
  TimeConfig time;
  std::string out_dir = "out";
  /// Fully merged document (echoed into the summary).
  nlohmann::json raw;

  [[nodiscard]] double threshold(const std::string& key) const { return raw.at("thresholds").at(key).get<double>(); }
  [[nodiscard]] const nlohmann::json& section(const std::string& key) const { return raw.at(key); }
};

/// Sets the value at a dotted key path; `value` is parsed as JSON when possible.
inline void apply_override(nlohmann::json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("/", "override '" + assignment + "' is not key=value");
  std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  std::string ptr;
  for (char& c : key) {
    if (c == '.') c = '/';
  }
  ptr = "/" + key;
  doc[nlohmann::json::json_pointer(ptr)] = value;
}

/// Strict parse: unknown keys, type mismatches and invariant violations throw
/// ConfigError carrying the key path.
inline ExperimentConfig parse_config(const nlohmann::json& input) {
  nlohmann::json doc = input;
  detail::merge_strict(doc, config_defaults(), "");
  ExperimentConfig c;
  if (detail::int_at(doc, "/schema_version") != config_schema_version) {
    throw ConfigError("/schema_version", "unsupported schema version");
  }
  c.experiment = parse_experiment(doc["experiment"].get<std::string>());
  try {
    c.kind = parse_system(doc["system"].get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError("/system", e.what());
  }
  c.mass = doc["mass"].get<double>();
  if (!(c.mass > 0.0)) throw ConfigError("/mass", "must be positive");
  const int n = detail::int_at(doc, "/grid/n");
  const double L = detail::number_at(doc, "/grid/L");
  if (n < 16 || n % 2 != 0) throw ConfigError("/grid/n", "must be even and at least 16");
  if (!(L > 0.0)) throw ConfigError("/grid/L", "must be positive");
  c.grid = Grid{n, L};

  for (const char* name : {"f1", "f2"}) {
    const std::string p = std::string("/data/") + name;
    std::vector<CatalogTerm> terms;
    const auto& arr = doc["data"][name];
    for (std::size_t i = 0; i < arr.size(); ++i) terms.push_back(detail::parse_term(arr[i], p + "/" + std::to_string(i)));
    AnalyticProfile prof(std::move(terms));
    // Band limit: the profile must be negligible at the Nyquist frequency.
    const double k_eff = prof.effective_band_limit(1e-10);
    if (k_eff >= pi * n / L) {
      throw ConfigError(p, "band limit " + std::to_string(k_eff) + " exceeds the resolved band of the grid");
    }
    (std::string(name) == "f1" ? c.f1 : c.f2) = std::move(prof);
  }

  TimeConfig& t = c.time;
  t.t_max = detail::number_at(doc, "/time/t_max");
  t.dt = detail::number_at(doc, "/time/dt");
  t.doublings = detail::int_at(doc, "/time/doublings");
  t.t_start = detail::number_at(doc, "/time/t_start");
  t.t_end = detail::number_at(doc, "/time/t_end");
  t.samples = detail::int_at(doc, "/time/samples");
  const auto window = detail::pair_at(doc["time"]["fit_window"], "/time/fit_window");
  t.fit_lo = window[0];
  t.fit_hi = window[1];
  if (!(t.dt > 0.0)) throw ConfigError("/time/dt", "must be positive");
  if (!(t.t_max > 0.0)) throw ConfigError("/time/t_max", "must be positive");
  if (t.doublings < 1) throw ConfigError("/time/doublings", "must be at least 1");
  if (!(t.t_start > 0.0 && t.t_end > t.t_start)) throw ConfigError("/time/t_end", "need 0 < t_start < t_end");
  if (t.samples < 2) throw ConfigError("/time/samples", "need at least 2 samples");
  if (!(t.fit_lo > 0.0 && t.fit_hi > t.fit_lo)) throw ConfigError("/time/fit_window", "need 0 < lo < hi");
  // The sampled horizon is t_max for the Cauchy problem and t_end otherwise.
  const double horizon = c.experiment == Experiment::cauchy ? t.t_max : t.t_end;
  if (t.fit_hi > horizon * (1.0 + 1e-12)) {
    throw ConfigError("/time/fit_window", "window end " + std::to_string(t.fit_hi) + " exceeds the sampled horizon " +
                                              std::to_string(horizon));
  }

  if (c.kind == System::B && (c.experiment == Experiment::scatter || c.experiment == Experiment::resonance ||
                              c.experiment == Experiment::poincare)) {
    const double gamma = c.f2.peak_abs() / (4.0 * c.mass);
    if (!(2.0 * gamma < 1.0)) {
      throw ConfigError("/data/f2", "outside the small-data region for system B: growth surrogate gamma = " +
                                        std::to_string(gamma) + " = sup|f2^(2k)| / 4m, need 2 gamma < 1");
    }
  }

  c.out_dir = doc["output"]["dir"].get<std::string>();
  c.raw = std::move(doc);
  return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("/", "malformed JSON");
  return parse_config(j);
}

}  // namespace rkg
