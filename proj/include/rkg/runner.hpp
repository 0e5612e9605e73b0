#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rkg/asymptotics.hpp"
#include "rkg/config.hpp"
#include "rkg/poincare.hpp"
#include "rkg/scattering.hpp"

namespace rkg {

inline constexpr int summary_schema_version = 1;

/// One threshold verdict: pass iff `value relation threshold`.
struct Verdict {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation = "<=";
  bool pass = false;
};

struct RunSummary {
  Experiment experiment = Experiment::scatter;
  nlohmann::json config;
  nlohmann::json results = nlohmann::json::object();
  std::vector<Verdict> verdicts;
  double wall_seconds = 0.0;
  std::vector<std::string> artifacts;

  [[nodiscard]] bool pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
  }

  void check(std::string name, double value, const std::string& relation, double threshold) {
    bool ok = false;
    if (relation == "<=") ok = value <= threshold;
    else if (relation == ">=") ok = value >= threshold;
    else if (relation == ">") ok = value > threshold;
    else if (relation == "<") ok = value < threshold;
    else throw std::logic_error("RunSummary::check: unknown relation " + relation);
    verdicts.push_back({std::move(name), value, threshold, relation, ok && std::isfinite(value)});
  }

  [[nodiscard]] nlohmann::json to_json() const {
    nlohmann::json v = nlohmann::json::array();
    for (const Verdict& x : verdicts) {
      v.push_back({{"name", x.name}, {"value", x.value}, {"relation", x.relation}, {"threshold", x.threshold},
                   {"pass", x.pass}});
    }
    return {{"schema", "resonant-kg/summary"},
            {"schema_version", summary_schema_version},
            {"experiment", to_string(experiment)},
            {"config", config},
            {"results", results},
            {"verdicts", v},
            {"pass", pass()},
            {"artifacts", artifacts},
            {"wall_seconds", wall_seconds}};
  }
};

namespace detail {

/// Fixed-format CSV writer; %.17g keeps reruns bit-identical.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : os_(path) {
    if (!os_) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << '\n';
  }
  void row(const std::vector<double>& values) {
    char buf[32];
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", values[i]);
      os_ << (i ? "," : "") << buf;
    }
    os_ << '\n';
  }
  void text_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << '\n';
  }

 private:
  std::ofstream os_;
};

inline nlohmann::json fit_json(const DecayFit& f) {
  return {{"model", f.model == DecayModel::power ? "power" : "log"},
          {"slope", f.slope},
          {"intercept", f.intercept},
          {"r_squared", f.r_squared},
          {"t_lo", f.t_lo},
          {"t_hi", f.t_hi},
          {"samples", f.samples}};
}

inline std::vector<double> sample_times(const ExperimentConfig& c) {
  return geometric_times(c.time.t_start, c.time.t_end, c.time.samples, c.time.dt);
}

/// Fits need at least 5 samples in the window; small sample counts are a config matter.
inline DecayFit window_fit(const ExperimentConfig& c, const DecaySeries& s, DecayModel model) {
  return fit_decay(s, model, c.time.fit_lo, c.time.fit_hi, 5);
}

inline ScatteringData scattering_data(const ExperimentConfig& c) {
  return ScatteringData(c.grid, c.mass, c.f1, c.f2);
}

inline std::string path_in(const ExperimentConfig& c, const std::string& file, RunSummary& s) {
  const std::filesystem::path p = std::filesystem::path(c.out_dir) / file;
  s.artifacts.push_back(p.string());
  return p.string();
}

// ---------------------------------------------------------------------------

inline void run_cauchy(const ExperimentConfig& c, RunSummary& s) {
  const PhaseState a0 = scattering_data(c).state();
  const long steps = std::lround(c.time.t_max / c.time.dt);
  SolveOptions opt;
  opt.store_states = false;
  opt.sample_every = int(std::max(1L, steps / std::max(1, c.time.samples)));
  CsvWriter csv(path_in(c, "cauchy.csv", s), {"t", "e_norm", "q_2", "constraint_drift"});
  const double base = reality_defect(a0);
  double drift = 0.0, e_min = e_norm(a0), e_max = e_min;
  opt.observer = [&](double t, const PhaseState& a) {
    const double d = std::max(0.0, reality_defect(a) - base);
    const double e = e_norm(a);
    drift = std::max(drift, d);
    e_min = std::min(e_min, e);
    e_max = std::max(e_max, e);
    csv.row({t, e, e_N_norm(a, 2), d});
  };
  solve(c.kind, a0, 0.0, c.time.t_max, c.time.dt, opt);
  s.results = {{"e_norm_min", e_min}, {"e_norm_max", e_max}, {"max_constraint_drift", drift}};
  s.check("reality_drift_per_time", drift / c.time.t_max, "<=", c.threshold("reality_drift_per_time"));
}

inline void run_scatter(const ExperimentConfig& c, RunSummary& s) {
  const ScatteringData f = scattering_data(c);
  WaveOperatorOptions wopt;
  wopt.doublings = c.time.doublings;
  const WaveOperatorResult w = wave_operator(c.kind, f, c.time.t_max, c.time.dt, wopt);
  const ResidualRun run = residual_series(c.kind, f, w.a0, sample_times(c), c.time.dt);
  CsvWriter csv(path_in(c, "scatter.csv", s), {"t", "res_modified", "res_free", "e_norm", "constraint_drift"});
  double drift = 0.0;
  for (std::size_t i = 0; i < run.modified.times.size(); ++i) {
    csv.row({run.modified.times[i], run.modified.values[i], run.naive.values[i], run.e_norm[i],
             run.constraint_drift[i]});
    drift = std::max(drift, run.constraint_drift[i]);
  }
  const DecayFit alpha = window_fit(c, run.modified, DecayModel::power);
  const DecayFit naive = window_fit(c, run.naive, DecayModel::log);
  nlohmann::json table = nlohmann::json::array();
  double worst_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.convergence_table.size(); ++i) {
    table.push_back({{"T", w.convergence_table[i].T}, {"difference", w.convergence_table[i].difference}});
    if (i > 0) worst_ratio = std::min(worst_ratio, w.convergence_table[i - 1].difference / w.convergence_table[i].difference);
  }
  s.results = {{"alpha_fit", fit_json(alpha)},
               {"log_coefficient", naive.slope},
               {"log_fit", fit_json(naive)},
               {"convergence_table", table},
               {"monotone", w.monotone},
               {"t_max_used", w.t_max_used},
               {"growth_surrogate", f.growth_surrogate()},
               {"max_constraint_drift", drift}};
  const bool a = c.kind == System::A;
  s.check("alpha_fit", alpha.slope, "<=", c.threshold(a ? "alpha_max_A" : "alpha_max_B"));
  if (a) {
    s.check("log_coefficient", naive.slope, ">", 0.0);
    s.check("log_r_squared", naive.r_squared, ">=", c.threshold("log_r2_min"));
    if (w.convergence_table.size() >= 2) s.check("ladder_ratio", worst_ratio, ">=", c.threshold("ladder_ratio_min"));
  } else {
    s.check("growth_surrogate", f.growth_surrogate(), "<=", c.threshold("growth_max"));
  }
  s.check("reality_drift_per_time", drift / c.time.t_end, "<=", c.threshold("reality_drift_per_time"));
}

inline void run_resonance(const ExperimentConfig& c, RunSummary& s) {
  const ScatteringData f = scattering_data(c);
  std::array<DecaySeries, 3> q;
  CsvWriter csv(path_in(c, "resonance.csv", s), {"t", "qbar0", "qbar1", "qbar2"});
  for (double t : sample_times(c)) {
    const NormReport r = integrand_residual(c.kind, f, t, 2);
    for (int n = 0; n < 3; ++n) {
      q[n].times.push_back(t);
      q[n].values.push_back(r.q_bar.at(n));
    }
    csv.row({t, r.q_bar.at(0), r.q_bar.at(1), r.q_bar.at(2)});
  }
  nlohmann::json fits = nlohmann::json::object();
  for (int n = 0; n < 3; ++n) fits["qbar" + std::to_string(n)] = fit_json(window_fit(c, q[n], DecayModel::power));
  const double slope = fits["qbar0"]["slope"].get<double>();
  s.results = {{"fits", fits}, {"growth_surrogate", f.growth_surrogate()}};
  const bool a = c.kind == System::A;
  s.check("integrand_slope", slope, "<=", c.threshold(a ? "integrand_slope_A" : "integrand_slope_B"));
  if (!a) s.check("growth_surrogate", f.growth_surrogate(), "<=", c.threshold("growth_max"));
}

inline void run_poincare(const ExperimentConfig& c, RunSummary& s) {
  const ScatteringData data = scattering_data(c);
  const PhaseState f = data.state();
  const StructureTable table = structure_constants();
  nlohmann::json linear = nlohmann::json::array(), nonlinear = nlohmann::json::array();
  CsvWriter csv(path_in(c, "poincare.csv", s), {"X", "Y", "residual"});
  CsvWriter csv_lin(path_in(c, "poincare_linear.csv", s), {"X", "Y", "residual"});
  double worst_lin = 0.0, worst_nl = 0.0;
  for (Generator X : all_generators) {
    nlohmann::json row_l = nlohmann::json::array(), row_n = nlohmann::json::array();
    for (Generator Y : all_generators) {
      const BracketResidual l = bracket_check(c.kind, X, Y, f, table, true);
      const BracketResidual n = bracket_check(c.kind, X, Y, f, table, false);
      row_l.push_back(l.absolute);
      row_n.push_back(n.relative);
      if (int(X) < int(Y)) {
        worst_lin = std::max(worst_lin, l.absolute);
        worst_nl = std::max(worst_nl, n.relative);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", n.relative);
        csv.text_row({to_string(X), to_string(Y), buf});
        std::snprintf(buf, sizeof buf, "%.17g", l.absolute);
        csv_lin.text_row({to_string(X), to_string(Y), buf});
      }
    }
    linear.push_back(row_l);
    nonlinear.push_back(row_n);
  }
  nlohmann::json names = nlohmann::json::array();
  for (Generator g : all_generators) names.push_back(to_string(g));
  s.results = {{"generators", names},
               {"jacobi_residual", table.jacobi_residual()},
               {"decomposition_residual", table.decomposition_residual},
               {"linear_residuals", linear},
               {"nonlinear_relative_residuals", nonlinear},
               {"locality_defect", locality_defect(f)}};
  s.check("jacobi", table.jacobi_residual(), "<=", c.threshold("jacobi_max"));
  s.check("linear_bracket", worst_lin, "<=", c.threshold("linear_bracket_max"));
  s.check("nonlinear_bracket", worst_nl, "<=", c.threshold("nonlinear_bracket_max"));

  const nlohmann::json& pc = c.section("poincare");
  if (pc["intertwine"].get<bool>()) {
    IntertwineOptions io;
    io.t_max = c.time.t_max;
    io.dt = c.time.dt;
    io.doublings = c.time.doublings;
    nlohmann::json rows = nlohmann::json::array();
    int i = 0;
    for (const auto& sh : pc["shifts"]) {
      const std::string p = "/poincare/shifts/" + std::to_string(i++);
      if (!sh.is_object() || !sh.contains("time") || !sh.contains("space")) {
        throw ConfigError(p, "expected {\"time\": number, \"space\": [number, number]}");
      }
      Translation g{sh["time"].get<double>(), detail::pair_at(sh["space"], p + "/space")};
      const IntertwineResult r = intertwine_check(c.kind, data, g, io);
      rows.push_back({{"time", g.time}, {"space", g.space}, {"residual", r.residual}, {"relative", r.relative},
                      {"truncation", r.truncation}});
      s.check("intertwine[" + std::to_string(i - 1) + "]", r.residual, "<=", c.threshold("intertwine_max"));
    }
    s.results["intertwining"] = rows;
  }
}

inline void run_asymptotics(const ExperimentConfig& c, RunSummary& s) {
  const nlohmann::json& ac = c.section("asymptotics");
  const std::string mode = ac["mode"].get<std::string>();
  const double M = ac["M"].get<double>();
  const int eps = ac["eps"].get<int>();
  const double R = ac["R"].get<double>();
  const int n_s = ac["n_s"].get<int>();
  const int order = ac["interpolation_order"].get<int>();
  if (eps != 1 && eps != -1) throw ConfigError("/asymptotics/eps", "must be +1 or -1");
  if (order != 4 && order != 6) throw ConfigError("/asymptotics/interpolation_order", "must be 4 or 6");
  const auto ts = sample_times(c);
  s.results["mode"] = mode;

  if (mode == "cone") {
    const int n_terms = ac["n_terms"].get<int>();
    if (n_terms < 0 || n_terms > 3) throw ConfigError("/asymptotics/n_terms", "must be 0..3");
    std::vector<RestTermSeries> series;
    std::vector<std::string> header{"t"};
    for (int n = 0; n <= n_terms; ++n) {
      series.push_back(rest_term_norms(c.f1, M, eps, n, ts, c.grid, R, n_s, order));
      header.push_back("l2_phi" + std::to_string(n));
      header.push_back("sup_phi" + std::to_string(n));
    }
    CsvWriter csv(path_in(c, "asymptotics_cone.csv", s), header);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      std::vector<double> row{ts[i]};
      for (const auto& r : series) {
        row.push_back(r.l2.values[i]);
        row.push_back(r.weighted_sup.values[i]);
      }
      csv.row(row);
    }
    nlohmann::json fits = nlohmann::json::array();
    const double margin = c.threshold("rest_slope_margin");
    for (int n = 0; n <= n_terms; ++n) {
      const DecayFit l2 = window_fit(c, series[n].l2, DecayModel::power);
      const DecayFit sup = window_fit(c, series[n].weighted_sup, DecayModel::power);
      fits.push_back({{"n", n}, {"l2", fit_json(l2)}, {"weighted_sup", fit_json(sup)}});
      if (n >= 1) {
        s.check("rest_l2_slope[" + std::to_string(n) + "]", l2.slope, "<=", -(n - margin));
        s.check("rest_sup_slope[" + std::to_string(n) + "]", sup.slope, "<=", -(n - margin));
      }
    }
    s.results["fits"] = fits;
  } else if (mode == "inverse") {
    const int n_terms = std::min(1, ac["n_terms"].get<int>());
    const ConeSlice g = g0_from_profile(c.f1, M, eps, R, n_s);
    InverseOptions io;
    io.order = order;
    const auto spectra = inverse_construction(g, c.grid, n_terms, io);
    const SpectralField ref = c.f1.sample(c.grid);
    double err = 0.0;
    for (std::size_t i = 0; i < ref.data().size(); ++i) err = std::max(err, std::abs(spectra[0][i] - ref[i]));
    const double scale = std::max(ref.max_abs(), std::numeric_limits<double>::min());
    std::vector<DecaySeries> u;
    for (int n = 0; n <= n_terms; ++n) {
      u.push_back(inverse_residual(g, std::vector<SpectralField>(spectra.begin(), spectra.begin() + n + 1), ts, order));
    }
    std::vector<std::string> header{"t"};
    for (int n = 0; n <= n_terms; ++n) header.push_back("l2_u" + std::to_string(n));
    CsvWriter csv(path_in(c, "asymptotics_inverse.csv", s), header);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      std::vector<double> row{ts[i]};
      for (const auto& r : u) row.push_back(r.values[i]);
      csv.row(row);
    }
    nlohmann::json fits = nlohmann::json::array();
    for (int n = 0; n <= n_terms; ++n) {
      const DecayFit fit = window_fit(c, u[n], DecayModel::power);
      fits.push_back({{"n", n}, {"l2", fit_json(fit)}});
      s.check("inverse_l2_slope[" + std::to_string(n) + "]", fit.slope, "<=", -(n + 1 - c.threshold("rest_slope_margin")));
    }
    s.results["fits"] = fits;
    s.results["round_trip_error"] = err / scale;
    s.results["rim_ring"] = g.ring_max();
    s.check("round_trip", err / scale, "<=", c.threshold("round_trip_max"));
  } else if (mode == "resonance") {
    const nlohmann::json& tj = ac["triple"];
    ResonanceTriple rt{tj["M"].get<double>(),  tj["eps"].get<int>(), tj["M1"].get<double>(),
                       tj["eps1"].get<int>(), tj["M2"].get<double>(), tj["eps2"].get<int>()};
    try {
      rt.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("/asymptotics/triple", e.what());
    }
    ResonanceOptions ro;
    ro.R = R;
    ro.n_s = n_s;
    ro.inverse.order = order;
    nlohmann::json fits = nlohmann::json::array();
    for (int n = 0; n <= 1; ++n) {
      const auto q = delta_norms(rt, c.f1, c.f2, n, ts, c.grid, 2, ro);
      CsvWriter csv(path_in(c, "resonance_delta" + std::to_string(n) + ".csv", s), {"t", "qbar0", "qbar1", "qbar2"});
      for (std::size_t i = 0; i < ts.size(); ++i) csv.row({ts[i], q[0].values[i], q[1].values[i], q[2].values[i]});
      const DecayFit fit = window_fit(c, q[0], DecayModel::power);
      fits.push_back({{"n", n}, {"qbar0", fit_json(fit)}});
      s.check("delta_slope[" + std::to_string(n) + "]", fit.slope, "<=",
              c.threshold(n == 0 ? "delta_slope_n0" : "delta_slope_n1"));
    }
    s.results["fits"] = fits;
    // Leading coefficient against the logarithmic coefficient of the system-A profile.
    const double m = rt.M1;
    if (rt.M == 2.0 * m && rt.M2 == m && rt.eps == 1 && rt.eps1 == 1 && rt.eps2 == 1) {
      const AnalyticProfile& p = c.f1;
      const SpectralFunction dressed = [&](double kx, double ky) {
        return p(kx, ky) / cplx{0.0, 2.0 * omega(m, kx, ky)};
      };
      const SpectralField f0 = resonant_f0(rt, dressed, dressed, c.grid);
      const SpectralField ref = SpectralField::from_symbol(c.grid, [&](double kx, double ky) {
        const cplx v = p(0.5 * kx, 0.5 * ky);
        return cplx{0.0, -1.0 / (8.0 * m)} * v * v;
      });
      double worst = 0.0;
      for (std::size_t i = 0; i < ref.data().size(); ++i) {
        if (std::abs(ref[i]) > 1e-8) worst = std::max(worst, std::abs(f0[i] - ref[i]) / std::abs(ref[i]));
      }
      s.results["f0_identity_error"] = worst;
      s.check("f0_identity", worst, "<=", c.threshold("f0_identity_max"));
    }
  } else {
    throw ConfigError("/asymptotics/mode", "must be one of cone, inverse, resonance");
  }
}

}  // namespace detail

/// Dispatches to the configured experiment and writes the CSV artifacts plus
/// summary.json into c.out_dir.
inline RunSummary run(const ExperimentConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(c.out_dir);
  RunSummary s;
  s.experiment = c.experiment;
  s.config = c.raw;
  switch (c.experiment) {
    case Experiment::cauchy: detail::run_cauchy(c, s); break;
    case Experiment::scatter: detail::run_scatter(c, s); break;
    case Experiment::resonance: detail::run_resonance(c, s); break;
    case Experiment::poincare: detail::run_poincare(c, s); break;
    case Experiment::asymptotics: detail::run_asymptotics(c, s); break;
  }
  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string summary = detail::path_in(c, "summary.json", s);
  std::ofstream os(summary);
  if (!os) throw std::runtime_error("cannot write " + summary);
  os << s.to_json().dump(2) << '\n';
  return s;
}

}  // namespace rkg
