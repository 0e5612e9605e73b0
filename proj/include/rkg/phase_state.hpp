#pragma once

#include <array>

#include "rkg/multiplier.hpp"

namespace rkg {

/// Component slot of (j, eps): 1+ -> 0, 1- -> 1, 2+ -> 2, 2- -> 3.
constexpr int slot(int j, int eps) { return 2 * (j - 1) + (eps > 0 ? 0 : 1); }
constexpr int slot_field(int s) { return s / 2 + 1; }
constexpr int slot_sign(int s) { return s % 2 == 0 ? 1 : -1; }

/// g(k) -> conj(g(-k)); maps a+ onto the a- it must equal for real fields.
inline SpectralField mirror(const SpectralField& f) {
  const Grid& g = f.grid();
  SpectralField out(g);
  for (int ix = 0; ix < g.n; ++ix)
    for (int iy = 0; iy < g.n; ++iy) out(ix, iy) = std::conj(f(g.negated(ix), g.negated(iy)));
  return out;
}

/// a = (a_{1+}, a_{1-}, a_{2+}, a_{2-}); field j carries mass j*m.
class PhaseState {
 public:
  PhaseState() = default;
  PhaseState(Grid grid, double m) : mass_(m) {
    if (!(m > 0.0)) throw std::invalid_argument("PhaseState: mass must be positive");
    for (auto& c : comp_) c = SpectralField(grid);
  }
  PhaseState(double m, std::array<SpectralField, 4> comps) : mass_(m), comp_(std::move(comps)) {
    if (!(m > 0.0)) throw std::invalid_argument("PhaseState: mass must be positive");
    for (int s = 1; s < 4; ++s) require_same_grid(comp_[0].grid(), comp_[s].grid(), "PhaseState");
  }
  /// Builds the state whose minus components mirror the given plus components.
  static PhaseState from_plus(double m, const SpectralField& a1p, const SpectralField& a2p) {
    return PhaseState(m, {a1p, mirror(a1p), a2p, mirror(a2p)});
  }

  [[nodiscard]] const Grid& grid() const { return comp_[0].grid(); }
  [[nodiscard]] double m() const { return mass_; }
  [[nodiscard]] double mass_of(int j) const { return j * mass_; }

  SpectralField& operator[](int s) { return comp_[s]; }
  const SpectralField& operator[](int s) const { return comp_[s]; }
  SpectralField& at(int j, int eps) { return comp_[slot(j, eps)]; }
  [[nodiscard]] const SpectralField& at(int j, int eps) const { return comp_[slot(j, eps)]; }

  PhaseState& operator+=(const PhaseState& o) {
    for (int s = 0; s < 4; ++s) comp_[s] += o.comp_[s];
    return *this;
  }
  PhaseState& operator-=(const PhaseState& o) {
    for (int s = 0; s < 4; ++s) comp_[s] -= o.comp_[s];
    return *this;
  }
  PhaseState& operator*=(cplx c) {
    for (auto& f : comp_) f *= c;
    return *this;
  }
  PhaseState& axpy(cplx c, const PhaseState& o) {
    for (int s = 0; s < 4; ++s) comp_[s].axpy(c, o.comp_[s]);
    return *this;
  }
  friend PhaseState operator+(PhaseState a, const PhaseState& b) { return a += b; }
  friend PhaseState operator-(PhaseState a, const PhaseState& b) { return a -= b; }
  friend PhaseState operator*(cplx c, PhaseState a) { return a *= c; }
  friend PhaseState operator*(double c, PhaseState a) { return a *= cplx{c, 0.0}; }

  [[nodiscard]] bool is_finite() const {
    return std::all_of(comp_.begin(), comp_.end(), [](const SpectralField& f) { return f.is_finite(); });
  }

 private:
  double mass_ = 1.0;
  std::array<SpectralField, 4> comp_;
};

/// Largest |a_{j-}(k) - conj(a_{j+}(-k))| over modes and fields.
inline double reality_defect(const PhaseState& a) {
  const Grid& g = a.grid();
  double d = 0.0;
  for (int j = 1; j <= 2; ++j) {
    const SpectralField& p = a.at(j, +1);
    const SpectralField& q = a.at(j, -1);
    for (int ix = 0; ix < g.n; ++ix)
      for (int iy = 0; iy < g.n; ++iy)
        d = std::max(d, std::abs(q(ix, iy) - std::conj(p(g.negated(ix), g.negated(iy)))));
  }
  return d;
}

/// V(t): component (j, eps) gets e^{i eps omega_{jm}(k) t}.
inline PhaseState free_propagate(const PhaseState& a, double t) {
  PhaseState out = a;
  if (t == 0.0) return out;
  for (int s = 0; s < 4; ++s) out[s] = free_propagate(a[s], a.mass_of(slot_field(s)), slot_sign(s), t);
  return out;
}

/// Real physical fields phi_j and their time derivatives.
struct FieldPair {
  std::array<PhysicalField, 2> phi;
  std::array<PhysicalField, 2> phi_dot;
};

namespace detail {
inline void require_real(const PhysicalField& u, const char* what, double tol) {
  const double scale = std::max(u.sup_norm(), 1.0);
  if (u.max_imag() > tol * scale) {
    throw std::invalid_argument(std::string("to_phase_space: ") + what + " is not real");
  }
}
}  // namespace detail

/// a_{j,eps} = phi_dot_j + eps i omega_{jm} phi_j. Nyquist content is dropped.
inline PhaseState to_phase_space(const FieldPair& p, double m) {
  const Grid& g = p.phi[0].grid();
  PhaseState a(g, m);
  for (int j = 1; j <= 2; ++j) {
    detail::require_real(p.phi[j - 1], "phi", 1e-12);
    detail::require_real(p.phi_dot[j - 1], "phi_dot", 1e-12);
    require_same_grid(g, p.phi[j - 1].grid(), "to_phase_space");
    require_same_grid(g, p.phi_dot[j - 1].grid(), "to_phase_space");
    SpectralField phi = transform(p.phi[j - 1]);
    SpectralField phi_dot = transform(p.phi_dot[j - 1]);
    phi.zero_nyquist();
    phi_dot.zero_nyquist();
    const SpectralField w_phi = apply_multiplier(phi, mult::Omega{j * m, 1.0});
    for (int eps : {+1, -1}) {
      SpectralField c = phi_dot;
      c.axpy(cplx{0.0, double(eps)}, w_phi);
      a.at(j, eps) = std::move(c);
    }
  }
  return a;
}

/// phi_j = (2i omega)^-1 (a+ - a-), phi_dot_j = (a+ + a-)/2, both returned as
/// spectral coefficients.
inline std::array<SpectralField, 2> reconstruct_phi(const PhaseState& a, int j) {
  SpectralField diff = a.at(j, +1) - a.at(j, -1);
  SpectralField phi = apply_multiplier(diff, mult::Omega{a.mass_of(j), -1.0});
  phi *= cplx{0.0, -0.5};
  SpectralField phi_dot = a.at(j, +1) + a.at(j, -1);
  phi_dot *= 0.5;
  return {std::move(phi), std::move(phi_dot)};
}

inline FieldPair from_phase_space(const PhaseState& a, double tolerance = 1e-10) {
  const double defect = reality_defect(a);
  if (defect > tolerance) {
    throw std::invalid_argument("from_phase_space: reality constraint violated (defect " + std::to_string(defect) +
                                ")");
  }
  FieldPair out;
  for (int j = 1; j <= 2; ++j) {
    auto [phi, phi_dot] = reconstruct_phi(a, j);
    PhysicalField u = inverse_transform(phi);
    PhysicalField v = inverse_transform(phi_dot);
    for (auto& x : u.data()) x = {x.real(), 0.0};
    for (auto& x : v.data()) x = {x.real(), 0.0};
    out.phi[j - 1] = std::move(u);
    out.phi_dot[j - 1] = std::move(v);
  }
  return out;
}

}  // namespace rkg
