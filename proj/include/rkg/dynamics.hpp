#pragma once

#include <cstdio>
#include <functional>
#include <ostream>
#include <stdexcept>

#include "rkg/norms.hpp"
#include "rkg/product.hpp"

namespace rkg {

/// A: source phi_1^2 drives field 2, field 1 is free.
/// B: source phi_1 phi_2 drives field 1, field 2 is free.
enum class System { A, B };

inline const char* to_string(System s) { return s == System::A ? "A" : "B"; }
inline System parse_system(const std::string& s) {
  if (s == "A" || s == "a") return System::A;
  if (s == "B" || s == "b") return System::B;
  throw std::invalid_argument("unknown system kind '" + s + "' (expected A or B)");
}

/// Real source term F_j of the second-order system, as spectral coefficients.
inline SpectralField source_term(System kind, const PhaseState& a) {
  const SpectralField phi1 = reconstruct_phi(a, 1)[0];
  if (kind == System::A) return product(phi1, phi1);
  return product(phi1, reconstruct_phi(a, 2)[0]);
}

/// T^2_{P0}(a): the source placed in both sign components of the driven field.
inline PhaseState nonlinear_term(System kind, const PhaseState& a) {
  PhaseState out(a.grid(), a.m());
  const SpectralField F = source_term(kind, a);
  const int j = kind == System::A ? 2 : 1;
  out.at(j, +1) = F;
  out.at(j, -1) = F;
  return out;
}

/// i eps omega_{jm} a_{j,eps}
inline PhaseState linear_term(const PhaseState& a) {
  PhaseState out = a;
  for (int s = 0; s < 4; ++s) {
    out[s] = apply_multiplier(a[s], mult::Omega{a.mass_of(slot_field(s)), 1.0});
    out[s] *= cplx{0.0, double(slot_sign(s))};
  }
  return out;
}

inline PhaseState rhs(System kind, const PhaseState& a) { return linear_term(a) + nonlinear_term(kind, a); }

/// Thrown when one step grows the E norm by more than the guard factor.
struct StepRejected : std::runtime_error {
  double time;
  StepRejected(double t, const std::string& what) : std::runtime_error(what), time(t) {}
};

/// Integrating-factor RK4: the linear flow is applied exactly and the
/// profile b = V(-t) a is advanced by classical RK4. Negative dt integrates
/// backward.
///
/// The source F is identical in both sign components of the driven field,
/// so each stage carries one spectrum. Stage values of phi are assembled
/// directly on half spectra; full states are formed only for the result.
class Integrator {
 public:
  Integrator(System kind, const Grid& grid, double m, double dt, double coupling = 1.0)
      : kind_(kind), grid_(grid), dt_(dt), coupling_(coupling), engine_(grid) {
    if (dt == 0.0 || !std::isfinite(dt)) throw std::invalid_argument("Integrator: dt must be nonzero and finite");
    for (int j = 1; j <= 2; ++j) {
      const std::vector<double> w = omega_table(grid, j * m);
      for (int eps : {+1, -1}) {
        auto& full = full_[slot(j, eps)];
        auto& half = half_[slot(j, eps)];
        full.resize(w.size());
        half.resize(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
          full[i] = std::polar(1.0, eps * w[i] * dt);
          half[i] = std::polar(1.0, eps * w[i] * 0.5 * dt);
        }
      }
      inv_2iw_[j - 1].resize(w.size());
      inv_w_[j - 1].resize(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) {
        inv_2iw_[j - 1][i] = cplx{0.0, -0.5 / w[i]};
        inv_w_[j - 1][i] = 1.0 / w[i];
      }
    }
  }

  [[nodiscard]] double dt() const { return dt_; }
  [[nodiscard]] System kind() const { return kind_; }

  /// a(t) -> a(t + dt).
  [[nodiscard]] PhaseState step(const PhaseState& a, double t) {
    const double h = dt_;
    const int d = driven();
    const int dp = slot(d, +1), dm = slot(d, -1);
    auto is_driven = [&](int s) { return s == dp || s == dm; };

    SpectralField F1(grid_), F2(grid_), F3(grid_), F4(grid_);
    source(F1, [&](int s, std::size_t i) { return a[s][i]; });
    source(F2, [&](int s, std::size_t i) {
      return is_driven(s) ? half_[s][i] * (a[s][i] + 0.5 * h * F1[i]) : half_[s][i] * a[s][i];
    });
    source(F3, [&](int s, std::size_t i) {
      return is_driven(s) ? half_[s][i] * a[s][i] + 0.5 * h * F2[i] : half_[s][i] * a[s][i];
    });
    source(F4, [&](int s, std::size_t i) {
      return is_driven(s) ? full_[s][i] * a[s][i] + h * half_[s][i] * F3[i] : full_[s][i] * a[s][i];
    });

    PhaseState next = a;
    for (int s = 0; s < 4; ++s) {
      std::vector<cplx>& c = next[s].data();
      const std::vector<cplx>& ef = full_[s];
      if (!is_driven(s)) {
        for (std::size_t i = 0; i < c.size(); ++i) c[i] *= ef[i];
        continue;
      }
      const std::vector<cplx>& eh = half_[s];
      for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] = ef[i] * c[i] + (h / 6.0) * (ef[i] * F1[i] + 2.0 * eh[i] * (F2[i] + F3[i]) + F4[i]);
      }
    }

    const double before = weighted_norm(a);
    const double after = weighted_norm(next);
    if (!next.is_finite() || (before > 0.0 && after > 1.1 * before) || (before == 0.0 && after > 0.0)) {
      char msg[160];
      std::snprintf(msg, sizeof msg, "step rejected at t=%.6g: e_norm %.6g -> %.6g", t, before, after);
      throw StepRejected(t, msg);
    }
    return next;
  }

 private:
  [[nodiscard]] int driven() const { return kind_ == System::A ? 2 : 1; }

  /// e_norm with cached weights.
  [[nodiscard]] double weighted_norm(const PhaseState& a) const {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
      const std::vector<double>& w = inv_w_[slot_field(k) - 1];
      const std::vector<cplx>& c = a[k].data();
      for (std::size_t i = 0; i < c.size(); ++i) s += std::norm(c[i]) * w[i];
    }
    return std::sqrt(s) * grid_.dk();
  }

  /// Loads phi_j of the stage state into engine input `which`.
  template <class Stage>
  void load_phi(int which, int j, Stage&& stage) {
    cplx* dst = engine_.input(which);
    const int sp = slot(j, +1), sm = slot(j, -1);
    const std::vector<cplx>& inv = inv_2iw_[j - 1];
    const int hw = engine_.half_width();
    for (int ix = 0; ix < grid_.n; ++ix)
      for (int iy = 0; iy < hw; ++iy) {
        const std::size_t hidx = engine_.hidx(ix, iy);
        if (!engine_.in_band(hidx)) {
          dst[hidx] = cplx{};
          continue;
        }
        const std::size_t i = grid_.flat(ix, iy);
        dst[hidx] = inv[i] * (stage(sp, i) - stage(sm, i));
      }
  }

  template <class Stage>
  void source(SpectralField& out, Stage&& stage) {
    if (coupling_ == 0.0) return;
    load_phi(0, 1, stage);
    if (kind_ == System::A) {
      engine_.multiply(out, true);
    } else {
      load_phi(1, 2, stage);
      engine_.multiply(out, false);
    }
    if (coupling_ != 1.0) out *= cplx{coupling_, 0.0};
  }

  using Table = std::array<std::vector<cplx>, 4>;

  System kind_;
  Grid grid_;
  double dt_;
  double coupling_;
  RealProductEngine engine_;
  Table full_, half_;
  std::array<std::vector<cplx>, 2> inv_2iw_;
  std::array<std::vector<double>, 2> inv_w_;
};

struct TrajectoryMeta {
  int order = 4;
  double dt = 0.0;
  Grid grid{};
  System kind = System::A;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseState> states;
  TrajectoryMeta meta;
};

struct SolveOptions {
  /// Record every this many steps (the final state is always recorded).
  int sample_every = 1;
  bool store_states = true;
  double coupling = 1.0;
  /// Called on every recorded sample.
  std::function<void(double, const PhaseState&)> observer;
};

/// Integrates from t0 to t1 (either direction) with |dt| steps.
inline Trajectory solve(System kind, const PhaseState& a0, double t0, double t1, double dt,
                        const SolveOptions& opt = {}) {
  if (!(dt > 0.0)) throw std::invalid_argument("solve: dt must be positive");
  const double span = t1 - t0;
  const double steps_real = std::abs(span) / dt;
  const long steps = std::lround(steps_real);
  if (std::abs(steps_real - double(steps)) > 1e-9 * std::max(1.0, steps_real)) {
    throw std::invalid_argument("solve: |t1 - t0| must be an integer multiple of dt");
  }
  const double h = span >= 0.0 ? dt : -dt;
  Trajectory tr;
  tr.meta = {4, dt, a0.grid(), kind};
  auto record = [&](double t, const PhaseState& a) {
    tr.times.push_back(t);
    if (opt.store_states) tr.states.push_back(a);
    if (opt.observer) opt.observer(t, a);
  };
  record(t0, a0);
  if (steps == 0) return tr;
  Integrator integ(kind, a0.grid(), a0.m(), h, opt.coupling);
  PhaseState a = a0;
  for (long i = 0; i < steps; ++i) {
    const double t = t0 + double(i) * h;
    a = integ.step(a, t);
    const bool last = i + 1 == steps;
    if (last || (i + 1) % std::max(1, opt.sample_every) == 0) record(last ? t1 : t0 + double(i + 1) * h, a);
  }
  return tr;
}

/// Final state of solve without recording intermediate states.
inline PhaseState evolve(System kind, const PhaseState& a0, double t0, double t1, double dt, double coupling = 1.0) {
  SolveOptions opt;
  opt.store_states = false;
  opt.sample_every = std::numeric_limits<int>::max();
  opt.coupling = coupling;
  PhaseState last = a0;
  opt.observer = [&](double, const PhaseState& a) { last = a; };
  solve(kind, a0, t0, t1, dt, opt);
  return last;
}

/// CSV rows (t, e_norm, q_2, constraint_drift); drift is measured against the first sample.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,e_norm,q_2,constraint_drift\n";
  const double base = tr.states.empty() ? 0.0 : reality_defect(tr.states.front());
  char buf[160];
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const PhaseState& a = tr.states[i];
    std::snprintf(buf, sizeof buf, "%.10g,%.17g,%.17g,%.17g\n", tr.times[i], e_norm(a), e_N_norm(a, 2),
                  std::max(0.0, reality_defect(a) - base));
    os << buf;
  }
}

}  // namespace rkg
