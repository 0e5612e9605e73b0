#pragma once

#include <string>

#include "rkg/decay_fit.hpp"
#include "rkg/profiles.hpp"

namespace rkg {

struct WaveOperatorOptions {
  /// Omega is computed at t_max * 2^i + offset for i = 0..doublings.
  int doublings = 1;
  double offset = 0.0;
  /// Progress callback (T, t) invoked every few hundred steps; may be empty.
  std::function<void(double, double)> progress;
};

struct ConvergenceEntry {
  double T = 0.0;
  double difference = 0.0;  ///< ||Omega^T - Omega^{2T}||_E
};

struct WaveOperatorResult {
  PhaseState a0;  ///< Omega^{T_last}(f)
  double t_max_used = 0.0;
  std::vector<ConvergenceEntry> convergence_table;
  /// convergence_table strictly decreasing.
  bool monotone = true;
  /// Omega^T for every T in the doubling ladder.
  std::vector<std::pair<double, PhaseState>> ladder;
  /// 2 Omega^{T_last} - Omega^{T_last/2}: removes the 1/T truncation term.
  PhaseState extrapolated;
};

/// a(T) := a^(+)(f)(T) integrated backward to t = 0.
inline PhaseState wave_operator_at(System kind, const Profile& profile, double T, double dt,
                                   const std::function<void(double, double)>& progress = {}) {
  SolveOptions opt;
  opt.store_states = false;
  opt.sample_every = 200;
  PhaseState last = profile.approx_solution(T);
  opt.observer = [&](double t, const PhaseState& a) {
    last = a;
    if (progress) progress(T, t);
  };
  solve(kind, profile.approx_solution(T), T, 0.0, dt, opt);
  return last;
}

/// Modified wave operator by backward integration from a^(+)(t_max), with
/// t_max-doubling as convergence certificate.
inline WaveOperatorResult wave_operator(System kind, const ScatteringData& f, double t_max, double dt,
                                        const WaveOperatorOptions& opt = {}) {
  if (!f.admissible(kind)) {
    throw std::invalid_argument("wave_operator: data not admissible for system B (growth surrogate " +
                                std::to_string(f.growth_surrogate()) + ", need 2*gamma < 1)");
  }
  if (t_max < 50.0) throw std::invalid_argument("wave_operator: t_max must be >= 50");
  if (t_max + opt.offset < 50.0) throw std::invalid_argument("wave_operator: t_max + offset must be >= 50");
  if (opt.doublings < 1) throw std::invalid_argument("wave_operator: at least one doubling is required");
  const Profile profile(kind, f);
  WaveOperatorResult r;
  double T = t_max;
  for (int i = 0; i <= opt.doublings; ++i, T *= 2.0) {
    r.ladder.emplace_back(T + opt.offset, wave_operator_at(kind, profile, T + opt.offset, dt, opt.progress));
  }
  for (std::size_t i = 0; i + 1 < r.ladder.size(); ++i) {
    r.convergence_table.push_back({r.ladder[i].first, e_norm(r.ladder[i + 1].second - r.ladder[i].second)});
  }
  for (std::size_t i = 0; i + 1 < r.convergence_table.size(); ++i) {
    if (!(r.convergence_table[i + 1].difference < r.convergence_table[i].difference)) r.monotone = false;
  }
  r.a0 = r.ladder.back().second;
  r.t_max_used = r.ladder.back().first;
  r.extrapolated = r.a0;
  r.extrapolated *= 2.0;
  r.extrapolated -= r.ladder[r.ladder.size() - 2].second;
  return r;
}

/// Forward evolution from a0 sampled on t_grid.
struct ResidualRun {
  DecaySeries modified;  ///< ||a(t) - a^(+)(t)||_E
  DecaySeries naive;     ///< ||V(-t) a(t) - f||_E
  std::vector<double> e_norm;
  std::vector<double> constraint_drift;
  PhaseState final_state;
};

inline ResidualRun residual_series(System kind, const ScatteringData& f, const PhaseState& a0,
                                   const std::vector<double>& t_grid, double dt) {
  if (t_grid.empty()) throw std::invalid_argument("residual_series: empty time grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] < 0.0 || (i > 0 && !(t_grid[i] > t_grid[i - 1]))) {
      throw std::invalid_argument("residual_series: times must be nonnegative and increasing");
    }
  }
  const Profile profile(kind, f);
  const PhaseState& f_state = profile.data();
  ResidualRun run;
  run.modified.norm_tag = "e_norm(a - a_plus)";
  run.naive.norm_tag = "e_norm(V(-t)a - f)";
  const double drift0 = reality_defect(a0);
  auto sample = [&](double t, const PhaseState& a) {
    run.modified.times.push_back(t);
    run.modified.values.push_back(e_norm(a - profile.approx_solution(t)));
    run.naive.times.push_back(t);
    run.naive.values.push_back(e_norm(free_propagate(a, -t) - f_state));
    run.e_norm.push_back(e_norm(a));
    run.constraint_drift.push_back(std::max(0.0, reality_defect(a) - drift0));
  };
  PhaseState a = a0;
  double t = 0.0;
  Integrator integ(kind, a0.grid(), a0.m(), dt);
  for (double target : t_grid) {
    const double span = target - t;
    const long steps = std::lround(span / dt);
    if (std::abs(span - double(steps) * dt) > 1e-9 * std::max(1.0, std::abs(span))) {
      throw std::invalid_argument("residual_series: sample times must be multiples of dt");
    }
    for (long i = 0; i < steps; ++i) a = integ.step(a, t + double(i) * dt);
    t = target;
    sample(t, a);
  }
  run.final_state = a;
  return run;
}

/// Resonant channel of V(-t) T^2_{P0}(a) at time t.
///
/// A: e^{-i eps omega_2m t} ((2i omega_m)^-1 a_{1,eps})^2 in component (2, eps).
/// B: -e^{-i eps omega_m t} (2i omega_m)^-1 a_{1,-eps} (2i omega_2m)^-1 a_{2,eps} in (1, eps).
inline PhaseState resonant_source(System kind, const PhaseState& a, double t) {
  const double m = a.m();
  PhaseState out(a.grid(), m);
  auto dressed = [&](int j, int eps) {
    SpectralField c = apply_multiplier(a.at(j, eps), mult::Omega{j * m, -1.0});
    c *= cplx{0.0, -0.5};
    return c;
  };
  for (int eps : {+1, -1}) {
    if (kind == System::A) {
      const SpectralField c = dressed(1, eps);
      out.at(2, eps) = free_propagate(product(c, c), 2 * m, -eps, t);
    } else {
      SpectralField p = product(dressed(1, -eps), dressed(2, eps));
      p *= -1.0;
      out.at(1, eps) = free_propagate(p, m, -eps, t);
    }
  }
  return out;
}

/// Resonant part of V(-t) T^2_{P0}(a^(+)(t)) - d/dt b^(+)(t).
inline PhaseState integrand_state(const Profile& profile, double t) {
  return resonant_source(profile.kind(), profile.approx_solution(t), t) - profile.b_dt(t);
}

/// Norms of the corrected integrand: q-bar_n and q_n for n <= max_order.
inline NormReport integrand_residual(System kind, const ScatteringData& f, double t, int max_order = 0) {
  if (t < 1.0) throw std::invalid_argument("integrand_residual: t must be >= 1");
  if (max_order < 0 || max_order > 2) throw std::invalid_argument("integrand_residual: order must be 0..2");
  const PhaseState r = integrand_state(Profile(kind, f), t);
  NormReport rep;
  rep.t = t;
  rep.e_norm = e_norm(r);
  for (int n = 0; n <= max_order; ++n) {
    rep.q_bar[n] = q_bar_state(r, n);
    rep.q[n] = e_N_norm(r, n);
  }
  return rep;
}

/// sup_{t >= tau} (1+t)^c || (I - Delta) h(t) ||_{E(1)} over the samples.
inline double m_tau_norm(const std::vector<std::pair<double, PhaseState>>& samples, double c, double tau) {
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("m_tau_norm: need 0 < c < 1");
  double sup = 0.0;
  for (const auto& [t, h] : samples) {
    if (t < tau) continue;
    double s = 0.0;
    for (int eps : {+1, -1}) {
      const SpectralField lh = apply_multiplier(h.at(1, eps), mult::OneMinusLaplacian{1.0});
      const SpectralField w = apply_multiplier(lh, mult::Omega{h.m(), -0.5});
      const double v = w.l2_norm();
      s += v * v;
    }
    sup = std::max(sup, std::pow(1.0 + t, c) * std::sqrt(s));
  }
  return sup;
}

/// Denominator eps omega_m(p+q) - eps1 omega_m(p) - eps2 omega_2m(q).
inline double kernel_phase(double m, int eps, int eps1, int eps2, double px, double py, double qx, double qy) {
  return eps * omega(m, px + qx, py + qy) - eps1 * omega(m, px, py) - eps2 * omega(2 * m, qx, qy);
}

struct KernelResult {
  SpectralField value;
  /// Smallest |denominator^-1| over retained combinations and band modes.
  double min_phase = 0.0;
};

/// Non-resonant kernel K_eps(g, f2) by direct summation over the dealias band:
///   K^(k) = (i/2pi) sum_p dk^2 sum_{eps1 + 2 eps2 != eps} eps1 eps2 d
///           (g^_{eps1}(p) / 2i omega_m(p)) (f2^_{eps2}(k-p) / 2i omega_2m(k-p)),
/// with d = 1/phase. The sign product eps1 eps2 comes from phi = sum eps (2i omega)^-1 a_eps.
/// O(n^4); intended for n <= 32.
inline KernelResult nonresonant_kernel(const SignPair& g, const SignPair& f2, int eps, double m,
                                       double min_phase_bound = 0.5) {
  const Grid& gr = g[0].grid();
  if (gr.n > 64) throw std::invalid_argument("nonresonant_kernel: direct summation limited to n <= 64");
  const int h = gr.n / 2;
  KernelResult r{SpectralField(gr), std::numeric_limits<double>::infinity()};
  auto band = [&](int wx, int wy) { return in_dealias_band(gr, gr.storage_index(wx), gr.storage_index(wy)); };
  const double dk = gr.dk();
  for (int kx = -h; kx < h; ++kx)
    for (int ky = -h; ky < h; ++ky) {
      if (!band(kx, ky)) continue;
      cplx acc{};
      for (int px = -h; px < h; ++px)
        for (int py = -h; py < h; ++py) {
          const int qx = kx - px, qy = ky - py;
          if (!band(px, py) || !band(qx, qy)) continue;
          const double kpx = px * dk, kpy = py * dk, kqx = qx * dk, kqy = qy * dk;
          for (int e1 : {+1, -1})
            for (int e2 : {+1, -1}) {
              if (e1 + 2 * e2 == eps) continue;
              const cplx gv = g[sign_slot(e1)].at_mode(px, py);
              const cplx fv = f2[sign_slot(e2)].at_mode(qx, qy);
              const double phase = kernel_phase(m, eps, e1, e2, kpx, kpy, kqx, kqy);
              r.min_phase = std::min(r.min_phase, std::abs(phase));
              if (gv == 0.0 || fv == 0.0) continue;
              acc += double(e1 * e2) / phase * (gv / cplx{0.0, 2.0 * omega(m, kpx, kpy)}) *
                     (fv / cplx{0.0, 2.0 * omega(2 * m, kqx, kqy)});
            }
        }
      r.value(gr.storage_index(kx), gr.storage_index(ky)) = cplx{0.0, 1.0 / (2.0 * pi)} * dk * dk * acc;
    }
  if (r.min_phase < min_phase_bound * m) {
    throw std::logic_error("nonresonant_kernel: denominator bound violated (min |phase| = " +
                           std::to_string(r.min_phase) + ")");
  }
  return r;
}

/// Non-resonant part of the system-B source in the profile frame, component (1, eps):
/// e^{-i eps omega t} [phi_1 phi_2 - resonant channel]^ at a = V(t) b.
inline SpectralField nonresonant_source(const PhaseState& a, int eps, double t) {
  const double m = a.m();
  const SpectralField full = product(reconstruct_phi(a, 1)[0], reconstruct_phi(a, 2)[0]);
  const SpectralField res = resonant_source(System::B, a, t).at(1, eps);
  return free_propagate(full, m, -eps, t) - res;
}

}  // namespace rkg
