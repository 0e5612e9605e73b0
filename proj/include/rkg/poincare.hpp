#pragma once

#include <array>
#include <string>
#include <vector>

#include "rkg/scattering.hpp"

namespace rkg {

/// Ordered basis of the Poincare algebra in 2+1 dimensions.
enum class Generator { P0 = 0, P1, P2, R, N1, N2 };

inline constexpr std::array<Generator, 6> all_generators{Generator::P0, Generator::P1, Generator::P2,
                                                        Generator::R,  Generator::N1, Generator::N2};

inline const char* to_string(Generator g) {
  static constexpr const char* names[] = {"P0", "P1", "P2", "R", "N1", "N2"};
  return names[int(g)];
}

inline Generator parse_generator(const std::string& s) {
  for (Generator g : all_generators)
    if (s == to_string(g)) return g;
  throw std::invalid_argument("unknown generator '" + s + "'");
}

/// Enveloping-algebra word, applied right to left: {X, Y} means T_{XY} = DT_X . T_Y.
using Word = std::vector<Generator>;

// ---------------------------------------------------------------------------
// Structure constants from the vector-field realization.

/// Affine vector field on (t, x1, x2): component a has coefficient
/// c[a][0] + sum_b c[a][b+1] y_b.
struct AffineField {
  std::array<std::array<double, 4>, 3> c{};
};

/// xi_X. The rotation is oriented as x1 d/dx2 - x2 d/dx1, the orientation of
/// the linear representation on phase space; `flip_rotation` selects the
/// opposite orientation.
inline AffineField xi(Generator g, bool flip_rotation = false) {
  AffineField v;
  switch (g) {
    case Generator::P0: v.c[0][0] = 1.0; break;
    case Generator::P1: v.c[1][0] = 1.0; break;
    case Generator::P2: v.c[2][0] = 1.0; break;
    case Generator::R:
      v.c[2][2] = flip_rotation ? -1.0 : 1.0;  // x1 d/dx2
      v.c[1][3] = flip_rotation ? 1.0 : -1.0;  // -x2 d/dx1
      break;
    case Generator::N1:
      v.c[0][2] = 1.0;  // x1 d/dt
      v.c[1][1] = 1.0;  // t d/dx1
      break;
    case Generator::N2:
      v.c[0][3] = 1.0;
      v.c[2][1] = 1.0;
      break;
  }
  return v;
}

/// [A, B]_a = A(B_a) - B(A_a); closed on affine fields.
inline AffineField commutator(const AffineField& A, const AffineField& B) {
  AffineField out;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      // A_b * d_b B_a - B_b * d_b A_a, with d_b of an affine coefficient constant.
      const double dBa = B.c[a][b + 1], dAa = A.c[a][b + 1];
      for (int k = 0; k < 4; ++k) out.c[a][k] += A.c[b][k] * dBa - B.c[b][k] * dAa;
    }
  return out;
}

/// c[X][Y][Z] with [X, Y] = sum_Z c Z.
struct StructureTable {
  std::array<std::array<std::array<double, 6>, 6>, 6> c{};
  /// Largest coefficient left after projecting a commutator onto the basis.
  double decomposition_residual = 0.0;

  [[nodiscard]] double operator()(Generator x, Generator y, Generator z) const { return c[int(x)][int(y)][int(z)]; }

  /// max |sum_cyclic [X,[Y,Z]]| over all triples and output components.
  [[nodiscard]] double jacobi_residual() const {
    double worst = 0.0;
    for (int x = 0; x < 6; ++x)
      for (int y = 0; y < 6; ++y)
        for (int z = 0; z < 6; ++z)
          for (int w = 0; w < 6; ++w) {
            double s = 0.0;
            for (int u = 0; u < 6; ++u) {
              s += c[y][z][u] * c[x][u][w] + c[z][x][u] * c[y][u][w] + c[x][y][u] * c[z][u][w];
            }
            worst = std::max(worst, std::abs(s));
          }
    return worst;
  }

  [[nodiscard]] double antisymmetry_residual() const {
    double worst = 0.0;
    for (int x = 0; x < 6; ++x)
      for (int y = 0; y < 6; ++y)
        for (int z = 0; z < 6; ++z) worst = std::max(worst, std::abs(c[x][y][z] + c[y][x][z]));
    return worst;
  }
};

/// Symbolic commutation of the xi fields. Each basis field occupies disjoint
/// coefficient slots up to sign, so the projection is exact.
inline StructureTable structure_constants(bool flip_rotation = false) {
  StructureTable table;
  std::array<AffineField, 6> basis;
  for (int i = 0; i < 6; ++i) basis[i] = xi(all_generators[i], flip_rotation);
  auto dot = [](const AffineField& a, const AffineField& b) {
    double s = 0.0;
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 4; ++k) s += a.c[r][k] * b.c[r][k];
    return s;
  };
  for (int x = 0; x < 6; ++x)
    for (int y = 0; y < 6; ++y) {
      AffineField rem = commutator(basis[x], basis[y]);
      for (int z = 0; z < 6; ++z) {
        const double coef = dot(rem, basis[z]) / dot(basis[z], basis[z]);
        table.c[x][y][z] = coef;
        for (int r = 0; r < 3; ++r)
          for (int k = 0; k < 4; ++k) rem.c[r][k] -= coef * basis[z].c[r][k];
      }
      for (int r = 0; r < 3; ++r)
        for (int k = 0; k < 4; ++k)
          table.decomposition_residual = std::max(table.decomposition_residual, std::abs(rem.c[r][k]));
    }
  return table;
}

// ---------------------------------------------------------------------------
// Representations on phase space.

namespace detail {

inline SpectralField times_i_eps_omega(const SpectralField& f, double M, int eps) {
  SpectralField out = apply_multiplier(f, mult::Omega{M, 1.0});
  out *= cplx{0.0, double(eps)};
  return out;
}

inline SpectralField t1_component(Generator X, const SpectralField& f, double M, int eps) {
  switch (X) {
    case Generator::P0: return times_i_eps_omega(f, M, eps);
    case Generator::P1: return apply_multiplier(f, mult::Derivative{0});
    case Generator::P2: return apply_multiplier(f, mult::Derivative{1});
    case Generator::R:
      return apply_multiplier(apply_multiplier(f, mult::Derivative{1}), mult::Coordinate{0}) -
             apply_multiplier(apply_multiplier(f, mult::Derivative{0}), mult::Coordinate{1});
    case Generator::N1: return times_i_eps_omega(apply_multiplier(f, mult::Coordinate{0}), M, eps);
    case Generator::N2: return times_i_eps_omega(apply_multiplier(f, mult::Coordinate{1}), M, eps);
  }
  throw std::logic_error("t1_component: bad generator");
}

}  // namespace detail

/// Linear representation T^1_X.
inline PhaseState t1_apply(Generator X, const PhaseState& f) {
  PhaseState out(f.grid(), f.m());
  for (int s = 0; s < 4; ++s) out[s] = detail::t1_component(X, f[s], f.mass_of(slot_field(s)), slot_sign(s));
  return out;
}

/// Symmetric bilinear form B_X with B_X(f, f) = T^2_X(f).
inline PhaseState t2_bilinear(System kind, Generator X, const PhaseState& f, const PhaseState& h) {
  PhaseState out(f.grid(), f.m());
  if (X == Generator::P1 || X == Generator::P2 || X == Generator::R) return out;
  const SpectralField f1 = reconstruct_phi(f, 1)[0];
  const SpectralField h1 = reconstruct_phi(h, 1)[0];
  SpectralField F(f.grid());
  int driven = 2;
  if (kind == System::A) {
    F = product(f1, h1);
  } else {
    driven = 1;
    F = product(f1, reconstruct_phi(h, 2)[0]) + product(h1, reconstruct_phi(f, 2)[0]);
    F *= 0.5;
  }
  if (X == Generator::N1) F = apply_multiplier(F, mult::Coordinate{0});
  if (X == Generator::N2) F = apply_multiplier(F, mult::Coordinate{1});
  out.at(driven, +1) = F;
  out.at(driven, -1) = std::move(F);
  return out;
}

inline PhaseState t2_apply(System kind, Generator X, const PhaseState& f) { return t2_bilinear(kind, X, f, f); }

/// T_X = T^1_X + T^2_X.
inline PhaseState t_apply(System kind, Generator X, const PhaseState& f) {
  return t1_apply(X, f) + t2_apply(kind, X, f);
}

/// DT_X(f; h) = T^1_X h + 2 B_X(f, h).
inline PhaseState dt_apply(System kind, Generator X, const PhaseState& f, const PhaseState& h) {
  PhaseState out = t1_apply(X, h);
  out.axpy(2.0, t2_bilinear(kind, X, f, h));
  return out;
}

/// T_Y(f) for |Y| <= 2; the empty word is the identity.
inline PhaseState t_word(System kind, const Word& Y, const PhaseState& f) {
  switch (Y.size()) {
    case 0: return f;
    case 1: return t_apply(kind, Y[0], f);
    case 2: return dt_apply(kind, Y[0], f, t_apply(kind, Y[1], f));
    default: throw std::invalid_argument("t_word: words longer than 2 are not supported");
  }
}

/// Linear-only (T^1) word.
inline PhaseState t1_word(const Word& Y, const PhaseState& f) {
  PhaseState out = f;
  for (auto it = Y.rbegin(); it != Y.rend(); ++it) out = t1_apply(*it, out);
  return out;
}

struct BracketResidual {
  double absolute = 0.0;
  double relative = 0.0;  ///< absolute / max(e_norm of the two word terms)
};

/// || T_{XY}(f) - T_{YX}(f) - T_{[X,Y]}(f) ||_E. With linear_only the quadratic
/// parts are dropped throughout.
inline BracketResidual bracket_check(System kind, Generator X, Generator Y, const PhaseState& f,
                                     const StructureTable& table, bool linear_only = false) {
  if (X == Y) return {};
  const PhaseState xy = linear_only ? t1_word({X, Y}, f) : t_word(kind, {X, Y}, f);
  const PhaseState yx = linear_only ? t1_word({Y, X}, f) : t_word(kind, {Y, X}, f);
  PhaseState r = xy - yx;
  for (Generator Z : all_generators) {
    const double c = table(X, Y, Z);
    if (c == 0.0) continue;
    r.axpy(-c, linear_only ? t1_apply(Z, f) : t_apply(kind, Z, f));
  }
  BracketResidual out;
  out.absolute = e_norm(r);
  const double scale = std::max(e_norm(xy), e_norm(yx));
  out.relative = scale > 0.0 ? out.absolute / scale : out.absolute;
  return out;
}

/// Mass fraction of every component inside the central half of the box.
inline double locality_defect(const PhaseState& f) {
  double worst = 0.0;
  for (int s = 0; s < 4; ++s) worst = std::max(worst, locality_defect(f[s]));
  return worst;
}

// ---------------------------------------------------------------------------
// Group action of translations and the intertwining check.

/// Translation g = (time s0, space s).
struct Translation {
  double time = 0.0;
  std::array<double, 2> space{0.0, 0.0};
};

/// f(. - s) on every component.
inline PhaseState space_shift(const PhaseState& f, std::array<double, 2> s) {
  PhaseState out = f;
  const Grid& g = f.grid();
  for (int k = 0; k < 4; ++k)
    for (int ix = 0; ix < g.n; ++ix) {
      const double kx = g.wavenumber(ix);
      for (int iy = 0; iy < g.n; ++iy) out[k](ix, iy) *= std::polar(1.0, -(kx * s[0] + g.wavenumber(iy) * s[1]));
    }
  return out;
}

struct IntertwineOptions {
  double t_max = 50.0;
  double dt = 0.05;
  int doublings = 1;
  /// Compare the 1/T-extrapolated wave operators instead of Omega^{T_last}.
  bool extrapolate = true;
};

struct IntertwineResult {
  double residual = 0.0;         ///< || U_g Omega(f) - Omega(U^1_g f) ||_E
  double relative = 0.0;         ///< residual / e_norm(Omega(f))
  double truncation = 0.0;       ///< last entry of the t_max convergence table
};

/// U_g(Omega(f)) against Omega(U^1_g f). U_g is the space shift composed with
/// the nonlinear flow by g.time; U^1_g is the space shift composed with V(g.time).
///
/// Both sides start from the same final time: the left ladder runs at
/// T + s0, the right one at T, so the finite-T mismatch is s0 db/dt(T), a
/// coherent 1/T term that the extrapolation removes.
inline IntertwineResult intertwine_check(System kind, const ScatteringData& f, const Translation& g,
                                         const IntertwineOptions& opt = {}) {
  const double s0 = g.time;
  const double lift = std::max(0.0, -s0);
  WaveOperatorOptions left;
  left.doublings = opt.doublings;
  left.offset = s0 + lift;
  WaveOperatorOptions right = left;
  right.offset = lift;
  const WaveOperatorResult base = wave_operator(kind, f, opt.t_max, opt.dt, left);
  PhaseState lhs = space_shift(opt.extrapolate ? base.extrapolated : base.a0, g.space);
  if (s0 != 0.0) {
    const long steps = std::max(1L, std::lround(std::abs(s0) / opt.dt));
    lhs = evolve(kind, lhs, 0.0, s0, std::abs(s0) / double(steps));
  }
  const WaveOperatorResult moved = wave_operator(kind, f.translated(g.space, s0), opt.t_max, opt.dt, right);
  IntertwineResult r;
  r.residual = e_norm(lhs - (opt.extrapolate ? moved.extrapolated : moved.a0));
  const double scale = e_norm(base.a0);
  r.relative = scale > 0.0 ? r.residual / scale : r.residual;
  r.truncation = base.convergence_table.empty() ? 0.0 : base.convergence_table.back().difference;
  return r;
}

}  // namespace rkg
