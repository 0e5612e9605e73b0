#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <functional>
#include <map>
#include <vector>

#include "rkg/analytic_profile.hpp"
#include "rkg/decay_fit.hpp"
#include "rkg/norms.hpp"
#include "rkg/product.hpp"

namespace rkg {

/// Samples of a homogeneous function g on the t = 1 section of the forward
/// cone, on the uniform square grid over [-R, R]^2 (zero outside |x| <= R).
/// The extension is g(t, x) = t^degree G(x / t).
struct ConeSlice {
  double R = 0.9;
  int n_s = 0;
  int degree = -1;
  double M = 1.0;
  int eps = 1;
  std::vector<cplx> values;

  static ConeSlice zeros(double R, int n_s, int degree, double M, int eps) {
    if (!(R > 0.0 && R < 1.0)) throw std::invalid_argument("ConeSlice: need 0 < R < 1");
    if (n_s < 16) throw std::invalid_argument("ConeSlice: resolution must be at least 16");
    ConeSlice s{R, n_s, degree, M, eps, std::vector<cplx>(std::size_t(n_s) * n_s)};
    return s;
  }
  [[nodiscard]] ConeSlice like(int new_degree) const { return zeros(R, n_s, new_degree, M, eps); }

  [[nodiscard]] double h() const { return 2.0 * R / double(n_s - 1); }
  [[nodiscard]] double coord(int i) const { return -R + double(i) * h(); }
  [[nodiscard]] bool inside(int i, int j) const {
    const double x = coord(i), y = coord(j);
    return x * x + y * y <= R * R;
  }
  cplx& operator()(int i, int j) { return values[std::size_t(i) * n_s + j]; }
  [[nodiscard]] cplx operator()(int i, int j) const { return values[std::size_t(i) * n_s + j]; }
  /// Zero outside the index range.
  [[nodiscard]] cplx at_or_zero(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_s || j >= n_s) return {};
    return (*this)(i, j);
  }

  [[nodiscard]] double max_abs() const {
    double m = 0.0;
    for (const cplx& v : values) m = std::max(m, std::abs(v));
    return m;
  }
  /// Largest |G| on the rim ring R - 3h < |x| <= R.
  [[nodiscard]] double ring_max() const {
    double m = 0.0;
    const double inner = R - 3.0 * h();
    for (int i = 0; i < n_s; ++i)
      for (int j = 0; j < n_s; ++j) {
        const double r = std::hypot(coord(i), coord(j));
        if (r > inner && r <= R) m = std::max(m, std::abs((*this)(i, j)));
      }
    return m;
  }

  /// Tensor Lagrange interpolation with `order` points per axis (even).
  [[nodiscard]] cplx interpolate(double x, double y, int order = 6) const {
    if (x * x + y * y > R * R) return {};
    const double hh = h();
    const double ux = (x + R) / hh, uy = (y + R) / hh;
    const int ix0 = int(std::floor(ux)) - order / 2 + 1;
    const int iy0 = int(std::floor(uy)) - order / 2 + 1;
    double wx[8], wy[8];
    lagrange_weights(ux - ix0, order, wx);
    lagrange_weights(uy - iy0, order, wy);
    cplx s{};
    for (int a = 0; a < order; ++a) {
      if (wx[a] == 0.0) continue;
      cplx row{};
      for (int b = 0; b < order; ++b) row += wy[b] * at_or_zero(ix0 + a, iy0 + b);
      s += wx[a] * row;
    }
    return s;
  }

 private:
  /// Weights at offset u (in grid units) from the first of `order` nodes 0..order-1.
  static void lagrange_weights(double u, int order, double* w) {
    for (int a = 0; a < order; ++a) {
      double p = 1.0;
      for (int b = 0; b < order; ++b)
        if (b != a) p *= (u - b) / double(a - b);
      w[a] = p;
    }
  }
};

/// rho(1, x) = sqrt(1 - |x|^2)
inline double rho1(double x, double y) { return std::sqrt(std::max(0.0, 1.0 - x * x - y * y)); }

/// g_0 at t = 1: i eps (M / rho^2) f^(-eps M x / rho).
inline ConeSlice g0_from_profile(const SpectralFunction& f, double k_eff, double M, int eps, double R, int n_s) {
  if (!(M > 0.0)) throw std::invalid_argument("g0_from_profile: mass must be positive");
  const double reach = k_eff / std::sqrt(k_eff * k_eff + M * M);
  if (!(reach < R)) {
    throw std::domain_error("g0_from_profile: support overflow (band limit maps to |x| = " + std::to_string(reach) +
                            " >= R = " + std::to_string(R) + ")");
  }
  ConeSlice s = ConeSlice::zeros(R, n_s, -1, M, eps);
  for (int i = 0; i < n_s; ++i)
    for (int j = 0; j < n_s; ++j) {
      if (!s.inside(i, j)) continue;
      const double x = s.coord(i), y = s.coord(j);
      const double r = rho1(x, y);
      s(i, j) = cplx{0.0, double(eps)} * (M / (r * r)) * f(-eps * M * x / r, -eps * M * y / r);
    }
  return s;
}

inline ConeSlice g0_from_profile(const AnalyticProfile& f, double M, int eps, double R, int n_s) {
  return g0_from_profile(f.as_function(), f.effective_band_limit(1e-14), M, eps, R, n_s);
}

namespace detail {

/// Order-6 centered first and second differences along one axis.
inline constexpr double fd1[4] = {0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};
inline constexpr double fd2[4] = {-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};

inline cplx diff1(const ConeSlice& s, int i, int j, int axis) {
  cplx d{};
  for (int o = 1; o <= 3; ++o) {
    const cplx p = axis == 0 ? s.at_or_zero(i + o, j) : s.at_or_zero(i, j + o);
    const cplx m = axis == 0 ? s.at_or_zero(i - o, j) : s.at_or_zero(i, j - o);
    d += fd1[o] * (p - m);
  }
  return d / s.h();
}

inline cplx diff2(const ConeSlice& s, int i, int j, int axis) {
  cplx d = fd2[0] * s(i, j);
  for (int o = 1; o <= 3; ++o) {
    const cplx p = axis == 0 ? s.at_or_zero(i + o, j) : s.at_or_zero(i, j + o);
    const cplx m = axis == 0 ? s.at_or_zero(i - o, j) : s.at_or_zero(i, j - o);
    d += fd2[o] * (p + m);
  }
  return d / (s.h() * s.h());
}

}  // namespace detail

/// t = 1 section of d/dt g: (d - x.grad) G, degree d - 1.
inline ConeSlice slice_dt(const ConeSlice& s) {
  ConeSlice out = s.like(s.degree - 1);
  for (int i = 0; i < s.n_s; ++i)
    for (int j = 0; j < s.n_s; ++j) {
      if (!s.inside(i, j)) continue;
      out(i, j) = double(s.degree) * s(i, j) - s.coord(i) * detail::diff1(s, i, j, 0) -
                  s.coord(j) * detail::diff1(s, i, j, 1);
    }
  return out;
}

/// t = 1 section of (d_t^2 - Laplacian) g, degree d - 2.
inline ConeSlice slice_box(const ConeSlice& s) {
  ConeSlice out = slice_dt(slice_dt(s));
  for (int i = 0; i < s.n_s; ++i)
    for (int j = 0; j < s.n_s; ++j) {
      if (!s.inside(i, j)) continue;
      out(i, j) -= detail::diff2(s, i, j, 0) + detail::diff2(s, i, j, 1);
    }
  return out;
}

/// c rho G, degree d + 1.
inline ConeSlice slice_times_rho(const ConeSlice& s, cplx c) {
  ConeSlice out = s.like(s.degree + 1);
  for (int i = 0; i < s.n_s; ++i)
    for (int j = 0; j < s.n_s; ++j)
      if (s.inside(i, j)) out(i, j) = c * rho1(s.coord(i), s.coord(j)) * s(i, j);
  return out;
}

/// g_l = (rho / 2 i eps l M) box g_{l-1}
inline ConeSlice next_cone_term(const ConeSlice& prev, int l) {
  return slice_times_rho(slice_box(prev), 1.0 / cplx{0.0, 2.0 * prev.eps * l * prev.M});
}

/// [g_0, ..., g_{n_terms}].
inline std::vector<ConeSlice> cone_expansion(const AnalyticProfile& f, double M, int eps, int n_terms, double R,
                                             int n_s) {
  if (n_terms < 0 || n_terms > 3) throw std::invalid_argument("cone_expansion: n_terms must be 0..3");
  std::vector<ConeSlice> out{g0_from_profile(f, M, eps, R, n_s)};
  for (int l = 1; l <= n_terms; ++l) out.push_back(next_cone_term(out.back(), l));
  return out;
}

/// Pointwise product of two slices on the same grid; degrees add.
inline ConeSlice slice_product(const ConeSlice& a, const ConeSlice& b, double M, int eps) {
  if (a.n_s != b.n_s || a.R != b.R) throw std::invalid_argument("slice_product: slice grids differ");
  ConeSlice out = ConeSlice::zeros(a.R, a.n_s, a.degree + b.degree, M, eps);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a.values[i] * b.values[i];
  return out;
}

inline ConeSlice operator+(ConeSlice a, const ConeSlice& b) {
  if (a.n_s != b.n_s || a.degree != b.degree) throw std::invalid_argument("slice sum: incompatible slices");
  for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] += b.values[i];
  return a;
}

/// e^{i eps M rho} sum_l t^{deg_l} G_l(x / t) on the physical grid; zero outside |x| <= R t.
inline PhysicalField cone_field(const std::vector<ConeSlice>& terms, double t, const Grid& grid, int order = 6) {
  PhysicalField u(grid);
  if (terms.empty()) return u;
  const ConeSlice& g0 = terms.front();
  if (g0.R * t >= 0.5 * grid.length) {
    throw std::domain_error("cone_field: cone section |x| <= " + std::to_string(g0.R * t) +
                            " overflows the box half-width " + std::to_string(0.5 * grid.length));
  }
  for (int ix = 0; ix < grid.n; ++ix) {
    const double x1 = grid.coordinate(ix);
    for (int iy = 0; iy < grid.n; ++iy) {
      const double x2 = grid.coordinate(iy);
      const double y1 = x1 / t, y2 = x2 / t;
      if (y1 * y1 + y2 * y2 > g0.R * g0.R) continue;
      const double rho = t * rho1(y1, y2);
      cplx s{};
      for (const ConeSlice& g : terms) s += std::pow(t, double(g.degree)) * g.interpolate(y1, y2, order);
      u(ix, iy) = std::polar(1.0, g0.eps * g0.M * rho) * s;
    }
  }
  return u;
}

/// L2 norm and delta(t)-weighted sup norm of a series of physical fields.
struct RestTermSeries {
  DecaySeries l2;
  DecaySeries weighted_sup;
};

/// phi_n(t) = V(t) f - e^{i eps M rho} sum_{l < n} g_l on the grid.
inline RestTermSeries rest_term_norms(const AnalyticProfile& f, double M, int eps, int n, const std::vector<double>& t_grid,
                                      const Grid& grid, double R, int n_s, int order = 6) {
  if (n < 0 || n > 3) throw std::invalid_argument("rest_term_norms: n must be 0..3");
  RestTermSeries out;
  out.l2.norm_tag = "L2(phi_" + std::to_string(n) + ")";
  out.weighted_sup.norm_tag = "sup(delta phi_" + std::to_string(n) + ")";
  std::vector<ConeSlice> terms;
  if (n > 0) terms = cone_expansion(f, M, eps, n - 1, R, n_s);
  const SpectralField f_hat = f.sample(grid);
  for (double t : t_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("rest_term_norms: times must be positive");
    PhysicalField u = inverse_transform(free_propagate(f_hat, M, eps, t));
    if (!terms.empty()) u -= cone_field(terms, t, grid, order);
    double sup = 0.0;
    for (int ix = 0; ix < grid.n; ++ix)
      for (int iy = 0; iy < grid.n; ++iy) {
        const double r = std::hypot(grid.coordinate(ix), grid.coordinate(iy));
        sup = std::max(sup, (1.0 + t + r) * std::abs(u(ix, iy)));
      }
    out.l2.times.push_back(t);
    out.l2.values.push_back(u.l2_norm());
    out.weighted_sup.times.push_back(t);
    out.weighted_sup.values.push_back(sup);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Weighted norms of free solutions.

/// lambda(t)(x): t / (1 + t - |x|) inside the cone, |x| outside.
inline double lambda_weight(double t, double r) { return r <= t ? t / (1.0 + t - r) : r; }
inline double delta_weight(double t, double r) { return 1.0 + t + r; }

enum class NormKind { l2, sup };

/// p_j^(s) of the weighted xi-derivatives of phi(t) = e^{i eps omega_M t} f:
///   sum_{|Y| <= j} ( M ||w xi_Y phi|| + sum_mu ||w d_mu xi_Y phi|| ),
/// with w = (1 + lambda)^{k/2} for L2 and delta (1 + lambda)^{k/2} for sup.
inline double weighted_p_norm(const SpectralField& f, double M, int eps, double t, int j, int k, NormKind s) {
  if (j < 0 || j > 1) throw std::invalid_argument("weighted_p_norm: j must be 0 or 1");
  if (k < 0 || k > 2) throw std::invalid_argument("weighted_p_norm: k must be 0..2");
  const Grid& g = f.grid();
  const SpectralField phi_hat = free_propagate(f, M, eps, t);
  // D(a, b1, b2) = d_t^a d_1^b1 d_2^b2 phi
  std::map<std::array<int, 3>, PhysicalField> cache;
  auto D = [&](int a, int b1, int b2) -> const PhysicalField& {
    const std::array<int, 3> key{a, b1, b2};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    SpectralField d(g);
    for (int ix = 0; ix < g.n; ++ix)
      for (int iy = 0; iy < g.n; ++iy) {
        const double kx = g.wavenumber(ix), ky = g.wavenumber(iy);
        const cplx dt{0.0, eps * omega(M, kx, ky)};
        d(ix, iy) = phi_hat(ix, iy) * std::pow(dt, a) * std::pow(cplx{0.0, kx}, b1) * std::pow(cplx{0.0, ky}, b2);
      }
    return cache.emplace(key, inverse_transform(d)).first->second;
  };
  auto norm = [&](const std::function<cplx(int, int)>& value) {
    double acc = 0.0;
    for (int ix = 0; ix < g.n; ++ix)
      for (int iy = 0; iy < g.n; ++iy) {
        const double r = std::hypot(g.coordinate(ix), g.coordinate(iy));
        double w = std::pow(1.0 + lambda_weight(t, r), 0.5 * k);
        if (s == NormKind::sup) w *= delta_weight(t, r);
        const double v = w * std::abs(value(ix, iy));
        if (s == NormKind::sup) {
          acc = std::max(acc, v);
        } else {
          acc += v * v;
        }
      }
    return s == NormKind::sup ? acc : std::sqrt(acc) * g.dx();
  };
  // Each family member: xi_Y phi and its three first derivatives (mu = t, 1, 2).
  using Sample = std::function<cplx(int, int)>;
  struct Family {
    Sample base;
    std::array<Sample, 3> d;
  };
  std::vector<Family> fams;
  auto e = [](int mu) {
    std::array<int, 3> v{0, 0, 0};
    v[mu] = 1;
    return v;
  };
  auto Dv = [&](std::array<int, 3> v) -> const PhysicalField& { return D(v[0], v[1], v[2]); };
  auto add = [](std::array<int, 3> a, std::array<int, 3> b) { return std::array<int, 3>{a[0] + b[0], a[1] + b[1], a[2] + b[2]}; };
  // Identity.
  {
    Family fam;
    const PhysicalField& p = D(0, 0, 0);
    fam.base = [&p](int ix, int iy) { return p(ix, iy); };
    for (int mu = 0; mu < 3; ++mu) {
      const PhysicalField& q = Dv(e(mu));
      fam.d[mu] = [&q](int ix, int iy) { return q(ix, iy); };
    }
    fams.push_back(fam);
  }
  if (j == 1) {
    // Translations P_nu.
    for (int nu = 0; nu < 3; ++nu) {
      Family fam;
      const PhysicalField& p = Dv(e(nu));
      fam.base = [&p](int ix, int iy) { return p(ix, iy); };
      for (int mu = 0; mu < 3; ++mu) {
        const PhysicalField& q = Dv(add(e(mu), e(nu)));
        fam.d[mu] = [&q](int ix, int iy) { return q(ix, iy); };
      }
      fams.push_back(fam);
    }
    // Rotation x1 d2 - x2 d1.
    {
      Family fam;
      const PhysicalField &d1 = D(0, 1, 0), &d2 = D(0, 0, 1);
      const PhysicalField &t1 = D(1, 1, 0), &t2 = D(1, 0, 1);
      const PhysicalField &d11 = D(0, 2, 0), &d12 = D(0, 1, 1), &d22 = D(0, 0, 2);
      fam.base = [&, &g = g](int ix, int iy) { return g.coordinate(ix) * d2(ix, iy) - g.coordinate(iy) * d1(ix, iy); };
      fam.d[0] = [&, &g = g](int ix, int iy) { return g.coordinate(ix) * t2(ix, iy) - g.coordinate(iy) * t1(ix, iy); };
      fam.d[1] = [&, &g = g](int ix, int iy) {
        return d2(ix, iy) + g.coordinate(ix) * d12(ix, iy) - g.coordinate(iy) * d11(ix, iy);
      };
      fam.d[2] = [&, &g = g](int ix, int iy) {
        return g.coordinate(ix) * d22(ix, iy) - d1(ix, iy) - g.coordinate(iy) * d12(ix, iy);
      };
      fams.push_back(fam);
    }
    // Boosts x_i d_t + t d_i.
    for (int i = 1; i <= 2; ++i) {
      Family fam;
      const PhysicalField& pt = D(1, 0, 0);
      const PhysicalField& pi_ = Dv(e(i));
      const PhysicalField& ptt = D(2, 0, 0);
      const PhysicalField& pti = Dv(add(e(0), e(i)));
      auto xi_ = [&g, i](int ix, int iy) { return i == 1 ? g.coordinate(ix) : g.coordinate(iy); };
      fam.base = [=, &pt, &pi_](int ix, int iy) { return xi_(ix, iy) * pt(ix, iy) + t * pi_(ix, iy); };
      fam.d[0] = [=, &ptt, &pi_, &pti](int ix, int iy) {
        return xi_(ix, iy) * ptt(ix, iy) + pi_(ix, iy) + t * pti(ix, iy);
      };
      for (int jj = 1; jj <= 2; ++jj) {
        const PhysicalField& ptj = Dv(add(e(0), e(jj)));
        const PhysicalField& pij = Dv(add(e(i), e(jj)));
        const bool same = i == jj;
        fam.d[jj] = [=, &pt, &ptj, &pij](int ix, int iy) {
          return (same ? pt(ix, iy) : cplx{}) + xi_(ix, iy) * ptj(ix, iy) + t * pij(ix, iy);
        };
      }
      fams.push_back(fam);
    }
  }
  double total = 0.0;
  for (const Family& fam : fams) {
    total += M * norm(fam.base);
    for (int mu = 0; mu < 3; ++mu) total += norm(fam.d[mu]);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Inverse construction.

struct InverseOptions {
  int order = 6;
  /// Abort when |I_order - I_{order-2}| exceeds this fraction of max |G| on the samples.
  double accuracy = 1e-8;
};

namespace detail {

/// -i eps (M / omega^2) G(-eps k / omega) on the grid.
inline SpectralField hyperboloid_sample(const ConeSlice& G, const Grid& grid, const InverseOptions& opt) {
  SpectralField out(grid);
  const double scale = std::max(G.max_abs(), std::numeric_limits<double>::min());
  double worst = 0.0;
  for (int ix = 0; ix < grid.n; ++ix)
    for (int iy = 0; iy < grid.n; ++iy) {
      if (grid.is_nyquist(ix, iy)) continue;
      const double kx = grid.wavenumber(ix), ky = grid.wavenumber(iy);
      const double w = omega(G.M, kx, ky);
      const double y1 = -G.eps * kx / w, y2 = -G.eps * ky / w;
      const cplx v = G.interpolate(y1, y2, opt.order);
      worst = std::max(worst, std::abs(v - G.interpolate(y1, y2, opt.order - 2)));
      out(ix, iy) = cplx{0.0, -double(G.eps)} * (G.M / (w * w)) * v;
    }
  if (worst > opt.accuracy * scale) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "inverse_construction: interpolation error estimate %.3e exceeds %.1e; refine the slice",
                  worst / scale, opt.accuracy);
    throw std::runtime_error(buf);
  }
  return out;
}

}  // namespace detail

/// f_0, ..., f_{n_terms} (n_terms <= 1) from a degree -1 slice:
///   f^_l(k) = -i eps (M / omega^2) g_{l,0}(1, -eps k / omega),
///   g_{0,0} = g, g_{0,1} = (rho / 2 i eps M) box g, g_{1,0} = -t g_{0,1}.
inline std::vector<SpectralField> inverse_construction(const ConeSlice& g, const Grid& grid, int n_terms,
                                                       const InverseOptions& opt = {}) {
  if (g.degree != -1) throw std::invalid_argument("inverse_construction: slice must have degree -1");
  if (n_terms < 0 || n_terms > 1) throw std::invalid_argument("inverse_construction: n_terms must be 0 or 1");
  std::vector<SpectralField> out{detail::hyperboloid_sample(g, grid, opt)};
  if (n_terms == 1) {
    ConeSlice g10 = next_cone_term(g, 1);
    for (auto& v : g10.values) v = -v;
    g10.degree = -1;  // t g_{0,1}
    out.push_back(detail::hyperboloid_sample(g10, grid, opt));
  }
  return out;
}

/// u_n(t) = e^{i eps M rho} g(t) - sum_{l <= n} t^{-l} e^{i eps omega t} f_l, L2 norm.
inline DecaySeries inverse_residual(const ConeSlice& g, const std::vector<SpectralField>& f,
                                    const std::vector<double>& t_grid, int order = 6) {
  if (f.empty()) throw std::invalid_argument("inverse_residual: no spectra");
  const Grid& grid = f.front().grid();
  DecaySeries s;
  s.norm_tag = "L2(u_" + std::to_string(f.size() - 1) + ")";
  for (double t : t_grid) {
    SpectralField sum(grid);
    for (std::size_t l = 0; l < f.size(); ++l) {
      sum.axpy(cplx{std::pow(t, -double(l)), 0.0}, free_propagate(f[l], g.M, g.eps, t));
    }
    PhysicalField u = cone_field({g}, t, grid, order);
    u -= inverse_transform(sum);
    s.times.push_back(t);
    s.values.push_back(u.l2_norm());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Resonant products.

/// eps M = eps1 M1 + eps2 M2.
struct ResonanceTriple {
  double M = 2.0;
  int eps = 1;
  double M1 = 1.0;
  int eps1 = 1;
  double M2 = 1.0;
  int eps2 = 1;

  void validate() const {
    if (!(M > 0.0 && M1 > 0.0 && M2 > 0.0)) throw std::invalid_argument("ResonanceTriple: masses must be positive");
    for (int e : {eps, eps1, eps2})
      if (e != 1 && e != -1) throw std::invalid_argument("ResonanceTriple: signs must be +1 or -1");
    const double defect = eps * M - eps1 * M1 - eps2 * M2;
    if (std::abs(defect) > 1e-12 * std::max({M, M1, M2})) {
      throw std::invalid_argument("ResonanceTriple: non-resonant triple (eps M - eps1 M1 - eps2 M2 = " +
                                  std::to_string(defect) + ")");
    }
  }
  /// Phase coherence on the cone: eps M rho - eps1 M1 rho - eps2 M2 rho at rho.
  [[nodiscard]] double phase_defect(double rho) const { return eps * M * rho - eps1 * M1 * rho - eps2 * M2 * rho; }
};

/// f^_0(k) = i (eps1 M1 eps2 M2 / eps M) (omega_M / M)^2 f1^(eps1 M1 k / eps M) f2^(eps2 M2 k / eps M).
inline SpectralField resonant_f0(const ResonanceTriple& rt, const SpectralFunction& f1, const SpectralFunction& f2,
                                 const Grid& grid) {
  rt.validate();
  const double eM = rt.eps * rt.M;
  const double c1 = rt.eps1 * rt.M1 / eM, c2 = rt.eps2 * rt.M2 / eM;
  const double pref = rt.eps1 * rt.M1 * rt.eps2 * rt.M2 / eM;
  return SpectralField::from_symbol(grid, [&](double kx, double ky) {
    const double r = omega(rt.M, kx, ky) / rt.M;
    return cplx{0.0, pref * r * r} * f1(c1 * kx, c1 * ky) * f2(c2 * kx, c2 * ky);
  });
}

struct ResonanceOptions {
  double R = 0.95;
  int n_s = 401;
  InverseOptions inverse{};
  int q_order = 0;  ///< q-bar order N of the reported series
};

/// f_1 = f_{1,0} + f_{0,1}: inverse construction of the order-1 product slice
/// g0^(1) g1^(2) + g1^(1) g0^(2) at order 0, plus the order-1 term of g0^(1) g0^(2).
inline SpectralField resonant_f1(const ResonanceTriple& rt, const AnalyticProfile& f1, const AnalyticProfile& f2,
                                 const Grid& grid, const ResonanceOptions& opt = {}) {
  rt.validate();
  const auto c1 = cone_expansion(f1, rt.M1, rt.eps1, 1, opt.R, opt.n_s);
  const auto c2 = cone_expansion(f2, rt.M2, rt.eps2, 1, opt.R, opt.n_s);
  ConeSlice G0 = slice_product(c1[0], c2[0], rt.M, rt.eps);
  G0.degree = -1;  // t g0^(1) g0^(2)
  ConeSlice G1 = slice_product(c1[0], c2[1], rt.M, rt.eps) + slice_product(c1[1], c2[0], rt.M, rt.eps);
  G1.degree = -1;  // t^2 (...)
  SpectralField out = inverse_construction(G1, grid, 0, opt.inverse)[0];
  out += inverse_construction(G0, grid, 1, opt.inverse)[1];
  return out;
}

/// q-bar_N (N = 0..max_order) of
///   delta_n(t) = V_M(-t)[(V_M1(t) f1)(V_M2(t) f2)] - sum_{l <= n} t^{-1-l} f_l.
inline std::vector<DecaySeries> delta_norms(const ResonanceTriple& rt, const AnalyticProfile& f1,
                                            const AnalyticProfile& f2, int n, const std::vector<double>& t_grid,
                                            const Grid& grid, int max_order, const ResonanceOptions& opt = {}) {
  rt.validate();
  if (n < 0 || n > 1) throw std::invalid_argument("delta_residual: n must be 0 or 1");
  if (max_order < 0 || max_order > 2) throw std::invalid_argument("delta_residual: q-bar order must be 0..2");
  std::vector<DecaySeries> out(std::size_t(max_order) + 1);
  for (int N = 0; N <= max_order; ++N) {
    out[N].norm_tag = "qbar_" + std::to_string(N) + "(delta_" + std::to_string(n) + ")";
  }
  const SpectralField h1 = f1.sample(grid), h2 = f2.sample(grid);
  const SpectralField F0 = resonant_f0(rt, f1.as_function(), f2.as_function(), grid);
  SpectralField F1(grid);
  if (n == 1 && !f1.empty() && !f2.empty()) F1 = resonant_f1(rt, f1, f2, grid, opt);
  for (double t : t_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("delta_residual: times must be positive");
    const SpectralField p =
        product(free_propagate(h1, rt.M1, rt.eps1, t), free_propagate(h2, rt.M2, rt.eps2, t));
    SpectralField d = free_propagate(p, rt.M, -rt.eps, t);
    d.axpy(cplx{-1.0 / t, 0.0}, F0);
    if (n == 1) d.axpy(cplx{-1.0 / (t * t), 0.0}, F1);
    for (int N = 0; N <= max_order; ++N) {
      out[N].times.push_back(t);
      out[N].values.push_back(q_bar_norm(d, N));
    }
  }
  return out;
}

inline DecaySeries delta_residual(const ResonanceTriple& rt, const AnalyticProfile& f1, const AnalyticProfile& f2,
                                  int n, const std::vector<double>& t_grid, const Grid& grid,
                                  const ResonanceOptions& opt = {}) {
  return delta_norms(rt, f1, f2, n, t_grid, grid, opt.q_order, opt).back();
}

}  // namespace rkg
