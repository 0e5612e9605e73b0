#pragma once

#include <optional>

#include "rkg/analytic_profile.hpp"
#include "rkg/dynamics.hpp"

namespace rkg {

/// (eps = +, eps = -) components of one field.
using SignPair = std::array<SpectralField, 2>;
constexpr int sign_slot(int eps) { return eps > 0 ? 0 : 1; }

/// Sign of the logarithmic coupling in the system-B profile. The resonant
/// stationary-phase coefficient of phi_1 phi_2 fixes it to -1.
inline constexpr double profile_b_sign = -1.0;

/// Scattering datum f = (f_{1+}, f_{1-}, f_{2+}, f_{2-}).
///
/// Analytic data evaluate f^ at k/2 and 2k in closed form; grid data fall
/// back to half/double frequency sampling. The optional space shift s and
/// time offset tau turn f into V(tau) f(. - s).
class ScatteringData {
 public:
  /// Analytic datum from the plus components; minus components are mirrored.
  ScatteringData(const Grid& grid, double m, AnalyticProfile f1_plus, AnalyticProfile f2_plus)
      : grid_(grid), m_(m), analytic_({std::move(f1_plus), std::move(f2_plus)}) {
    if (!(m > 0.0)) throw std::invalid_argument("ScatteringData: mass must be positive");
  }
  /// Grid-only datum.
  explicit ScatteringData(const PhaseState& f) : grid_(f.grid()), m_(f.m()), grid_data_(f) {}

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] double m() const { return m_; }
  [[nodiscard]] bool is_analytic() const { return analytic_.has_value(); }
  [[nodiscard]] const std::array<AnalyticProfile, 2>& analytic() const { return *analytic_; }
  [[nodiscard]] std::array<double, 2> space_shift() const { return shift_; }
  [[nodiscard]] double time_offset() const { return tau_; }

  /// U^1_g f for g = (space shift s, time translation tau).
  [[nodiscard]] ScatteringData translated(std::array<double, 2> s, double tau) const {
    ScatteringData out = *this;
    out.shift_ = {shift_[0] + s[0], shift_[1] + s[1]};
    out.tau_ = tau_ + tau;
    return out;
  }

  /// f^_{j,eps}(kx, ky), including shift and time offset; analytic data only.
  [[nodiscard]] cplx eval(int j, int eps, double kx, double ky) const {
    const AnalyticProfile& p = (*analytic_)[j - 1];
    cplx v = eps > 0 ? p(kx, ky) : std::conj(p(-kx, -ky));
    v *= std::polar(1.0, -(kx * shift_[0] + ky * shift_[1]) + eps * omega(j * m_, kx, ky) * tau_);
    return v;
  }

  /// Grid samples of f^_{j,eps}(scale * k).
  [[nodiscard]] SpectralField sampled(int j, int eps, double scale = 1.0, SamplingDiagnostic* diag = nullptr) const {
    if (analytic_) {
      return SpectralField::from_symbol(grid_,
                                        [&](double kx, double ky) { return eval(j, eps, scale * kx, scale * ky); });
    }
    SpectralField base = apply_translation(grid_data_->at(j, eps), j, eps);
    if (scale == 1.0) return base;
    if (scale == 0.5) return half_frequency_sample(base);
    if (scale == 2.0) return double_frequency_sample(base, diag);
    throw std::invalid_argument("ScatteringData: grid data support scales 1/2, 1, 2 only");
  }

  [[nodiscard]] PhaseState state() const {
    PhaseState f(grid_, m_);
    for (int j = 1; j <= 2; ++j)
      for (int eps : {+1, -1}) f.at(j, eps) = sampled(j, eps);
    return f;
  }

  /// gamma = (1/4m) sup_k |f^_2(2k)|, the growth exponent of the system-B profile.
  [[nodiscard]] double growth_surrogate() const {
    const double peak = analytic_ ? (*analytic_)[1].peak_abs() : grid_data_->at(2, +1).max_abs();
    return peak / (4.0 * m_);
  }

  /// Membership test for the small-data region of system B (safety factor 2).
  [[nodiscard]] bool admissible(System kind) const {
    return kind == System::A || 2.0 * growth_surrogate() < 1.0;
  }

 private:
  [[nodiscard]] SpectralField apply_translation(SpectralField f, int j, int eps) const {
    if (shift_[0] == 0.0 && shift_[1] == 0.0 && tau_ == 0.0) return f;
    const double M = j * m_;
    for (int ix = 0; ix < grid_.n; ++ix) {
      const double kx = grid_.wavenumber(ix);
      for (int iy = 0; iy < grid_.n; ++iy) {
        const double ky = grid_.wavenumber(iy);
        f(ix, iy) *= std::polar(1.0, -(kx * shift_[0] + ky * shift_[1]) + eps * omega(M, kx, ky) * tau_);
      }
    }
    return f;
  }

  Grid grid_;
  double m_;
  std::optional<std::array<AnalyticProfile, 2>> analytic_;
  std::optional<PhaseState> grid_data_;
  std::array<double, 2> shift_{0.0, 0.0};
  double tau_ = 0.0;
};

/// L with h^ already sampled at 2k: ((L g)_eps)^(k) = i eps h^_eps(2k) g^_{-eps}(-k).
inline SignPair apply_l(const SignPair& h_at_2k, const SignPair& g) {
  const Grid& gr = g[0].grid();
  SignPair out{SpectralField(gr), SpectralField(gr)};
  for (int eps : {+1, -1}) {
    const SpectralField& h = h_at_2k[sign_slot(eps)];
    const SpectralField& src = g[sign_slot(-eps)];
    SpectralField& dst = out[sign_slot(eps)];
    for (int ix = 0; ix < gr.n; ++ix)
      for (int iy = 0; iy < gr.n; ++iy)
        dst(ix, iy) = cplx{0.0, double(eps)} * h(ix, iy) * src(gr.negated(ix), gr.negated(iy));
  }
  return out;
}

/// L(h) g from grid data; h is resampled at 2k (band-limit loss reported in diag).
inline SignPair l_operator(const SignPair& h, const SignPair& g, SamplingDiagnostic* diag = nullptr) {
  SamplingDiagnostic dp, dm;
  const SignPair h2{double_frequency_sample(h[0], &dp), double_frequency_sample(h[1], &dm)};
  if (diag) {
    diag->lossless = dp.lossless && dm.lossless;
    diag->dropped_max = std::max(dp.dropped_max, dm.dropped_max);
  }
  return apply_l(h2, g);
}

/// Closed-form profile b(t) of one system and scattering datum, and its
/// time derivative. b(0) = f.
class Profile {
 public:
  Profile(System kind, const ScatteringData& f) : kind_(kind), grid_(f.grid()), m_(f.m()), f_(f.state()) {
    for (int eps : {+1, -1}) {
      if (kind == System::A) {
        SpectralField h = f.sampled(1, eps, 0.5);
        for (auto& c : h.data()) c *= c;
        half_sq_[sign_slot(eps)] = std::move(h);
      } else {
        f2_double_[sign_slot(eps)] = f.sampled(2, eps, 2.0, &diag_);
      }
    }
    w1_ = omega_table(grid_, m_);
    w2_ = omega_table(grid_, 2 * m_);
  }

  [[nodiscard]] System kind() const { return kind_; }
  [[nodiscard]] const PhaseState& data() const { return f_; }
  [[nodiscard]] const SamplingDiagnostic& sampling() const { return diag_; }

  [[nodiscard]] PhaseState b(double t) const {
    if (t < 0.0) throw std::invalid_argument("profile: t must be nonnegative");
    PhaseState out = f_;
    if (kind_ == System::A) {
      // b_{2,eps} = f_{2,eps} - i eps ln(1 + t(2m)^2/omega_2m) (1/8m) f_{1,eps}(k/2)^2
      for (int eps : {+1, -1}) {
        SpectralField& dst = out.at(2, eps);
        const SpectralField& sq = half_sq_[sign_slot(eps)];
        for (std::size_t i = 0; i < grid_.size(); ++i) {
          const double ell = std::log1p(t * 4.0 * m_ * m_ / w2_[i]);
          dst[i] -= cplx{0.0, eps * ell / (8.0 * m_)} * sq[i];
        }
      }
      return out;
    }
    // b_{1,eps} = cosh(S) f_{1,eps} + (sinh S / S) T
    for (int eps : {+1, -1}) {
      SpectralField& dst = out.at(1, eps);
      const SpectralField& h = f2_double_[sign_slot(eps)];
      const SpectralField& partner = f_.at(1, -eps);
      for (int ix = 0; ix < grid_.n; ++ix)
        for (int iy = 0; iy < grid_.n; ++iy) {
          const std::size_t i = grid_.flat(ix, iy);
          const double ell = std::log1p(t * m_ * m_ / w1_[i]);
          const double S = std::abs(h[i]) * ell / (4.0 * m_);
          const cplx T = profile_b_sign * cplx{0.0, eps / (4.0 * m_)} * h[i] * ell *
                         partner(grid_.negated(ix), grid_.negated(iy));
          dst[i] = std::cosh(S) * dst[i] + sinhc(S) * T;
        }
    }
    return out;
  }

  /// db/dt evaluated in closed form.
  [[nodiscard]] PhaseState b_dt(double t) const {
    PhaseState out(grid_, m_);
    if (kind_ == System::A) {
      for (int eps : {+1, -1}) {
        SpectralField& dst = out.at(2, eps);
        const SpectralField& sq = half_sq_[sign_slot(eps)];
        for (std::size_t i = 0; i < grid_.size(); ++i) {
          const double rate = 4.0 * m_ * m_ / (w2_[i] + t * 4.0 * m_ * m_);
          dst[i] = cplx{0.0, -eps * rate / (8.0 * m_)} * sq[i];
        }
      }
      return out;
    }
    // d/dt b_1 = sign (1/4m) ell'(t) L(f_2) b_1, ell' = m^2/(omega_m + t m^2)
    const PhaseState bt = b(t);
    const SignPair lb = apply_l(f2_double_, {bt.at(1, +1), bt.at(1, -1)});
    for (int eps : {+1, -1}) {
      SpectralField& dst = out.at(1, eps);
      const SpectralField& src = lb[sign_slot(eps)];
      for (std::size_t i = 0; i < grid_.size(); ++i) {
        const double rate = m_ * m_ / (w1_[i] + t * m_ * m_);
        dst[i] = profile_b_sign * rate / (4.0 * m_) * src[i];
      }
    }
    return out;
  }

  /// a^(+)(t) = V(t) b(t)
  [[nodiscard]] PhaseState approx_solution(double t) const { return free_propagate(b(t), t); }

  /// f^_{2,eps}(2k) on the grid (system B only).
  [[nodiscard]] const SignPair& f2_at_double() const { return f2_double_; }

 private:
  static double sinhc(double s) { return s < 1e-4 ? 1.0 + s * s / 6.0 : std::sinh(s) / s; }

  System kind_;
  Grid grid_;
  double m_;
  PhaseState f_;
  SignPair half_sq_;
  SignPair f2_double_;
  SamplingDiagnostic diag_;
  std::vector<double> w1_, w2_;
};

inline PhaseState profile_A(const ScatteringData& f, double t) { return Profile(System::A, f).b(t); }
inline PhaseState profile_B(const ScatteringData& f, double t) { return Profile(System::B, f).b(t); }
inline PhaseState profile_dt(System kind, const ScatteringData& f, double t) { return Profile(kind, f).b_dt(t); }
inline PhaseState approx_solution(System kind, const ScatteringData& f, double t) {
  return Profile(kind, f).approx_solution(t);
}

}  // namespace rkg
