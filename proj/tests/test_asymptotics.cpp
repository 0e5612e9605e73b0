#include <catch_amalgamated.hpp>

#include "rkg/asymptotics.hpp"

using namespace rkg;
using Catch::Matchers::WithinRel;

namespace {

const AnalyticProfile gauss = AnalyticProfile::gaussian({1.0, 0.3}, 0.35, {0.035, -0.0175});

/// Slice of rho(t, x)^s, homogeneous of degree s.
ConeSlice rho_power(double s, double R = 0.9, int n_s = 401) {
  ConeSlice g = ConeSlice::zeros(R, n_s, int(s), 1.0, 1);
  for (int i = 0; i < n_s; ++i)
    for (int j = 0; j < n_s; ++j)
      if (g.inside(i, j)) g(i, j) = std::pow(rho1(g.coord(i), g.coord(j)), s);
  return g;
}

/// max |a - b| / |b| over |x| <= r.
double interior_error(const ConeSlice& a, const std::function<double(double)>& exact, double r) {
  double worst = 0.0;
  for (int i = 0; i < a.n_s; ++i)
    for (int j = 0; j < a.n_s; ++j) {
      const double x = a.coord(i), y = a.coord(j);
      if (x * x + y * y > r * r) continue;
      const double e = exact(rho1(x, y));
      worst = std::max(worst, std::abs(a(i, j) - e) / std::abs(e));
    }
  return worst;
}

}  // namespace

TEST_CASE("leading cone term at the apex and against the direct formula") {
  const ConeSlice g = g0_from_profile(gauss, 1.0, 1, 0.99, 401);
  const int c = 200;
  CHECK(std::abs(g.coord(c)) < 1e-15);
  CHECK(std::abs(g(c, c) - cplx{0.0, 1.0} * gauss(0.0, 0.0)) < 1e-15);
  // Independent evaluation with eps = -1, M = 2.
  const ConeSlice h = g0_from_profile(gauss, 2.0, -1, 0.99, 201);
  double worst = 0.0;
  for (int i = 0; i < h.n_s; ++i)
    for (int j = 0; j < h.n_s; ++j) {
      if (!h.inside(i, j)) continue;
      const double x = h.coord(i), y = h.coord(j);
      const double q = 1.0 - x * x - y * y;
      const cplx direct = cplx{0.0, -1.0} * (2.0 / q) * gauss(2.0 * x / std::sqrt(q), 2.0 * y / std::sqrt(q));
      worst = std::max(worst, std::abs(h(i, j) - direct));
    }
  CHECK(worst < 1e-14);
  CHECK(g.ring_max() < 1e-13);
}

TEST_CASE("support overflow is reported") {
  const AnalyticProfile wide = AnalyticProfile::gaussian({1.0, 0.0}, 3.0);
  CHECK_THROWS_AS(g0_from_profile(wide, 1.0, 1, 0.9, 101), std::domain_error);
  CHECK_THROWS_AS(ConeSlice::zeros(1.0, 101, -1, 1.0, 1), std::invalid_argument);
}

TEST_CASE("slice time derivative follows homogeneity") {
  // d/dt t^-1 = -t^-2: the constant slice -1.
  const ConeSlice inv_t = rho_power(0.0).like(-1);
  ConeSlice one = inv_t;
  for (int i = 0; i < one.n_s; ++i)
    for (int j = 0; j < one.n_s; ++j)
      if (one.inside(i, j)) one(i, j) = 1.0;
  const ConeSlice d = slice_dt(one);
  CHECK(d.degree == -2);
  CHECK(interior_error(d, [](double) { return -1.0; }, 0.8) < 1e-12);
  // d/dt rho^s = s t rho^{s-2}
  const ConeSlice r3 = slice_dt(rho_power(3.0));
  CHECK(interior_error(r3, [](double r) { return 3.0 * r; }, 0.8) < 1e-9);
}

TEST_CASE("slice wave operator against the symbolic box of rho powers") {
  // box rho^s = s (s + 1) rho^{s-2} in 2+1 dimensions.
  for (double s : {1.0, -3.0, 3.0}) {
    const ConeSlice b = slice_box(rho_power(s));
    CHECK(b.degree == int(s) - 2);
    INFO("s = " << s);
    CHECK(interior_error(b, [s](double r) { return s * (s + 1) * std::pow(r, s - 2); }, 0.6) < 1e-6);
  }
}

TEST_CASE("cone expansion bookkeeping") {
  CHECK(cone_expansion(gauss, 1.0, 1, 0, 0.99, 201).size() == 1);
  const auto terms = cone_expansion(gauss, 1.0, 1, 3, 0.99, 201);
  REQUIRE(terms.size() == 4);
  for (int l = 0; l < 4; ++l) CHECK(terms[l].degree == -1 - l);
  CHECK_THROWS_AS(cone_expansion(gauss, 1.0, 1, 4, 0.99, 201), std::invalid_argument);
}

TEST_CASE("interpolation reproduces low-degree polynomials") {
  ConeSlice g = ConeSlice::zeros(0.9, 101, 0, 1.0, 1);
  auto p = [](double x, double y) { return 1.0 + 2.0 * x - y + x * x * y - 0.5 * y * y * y; };
  for (int i = 0; i < g.n_s; ++i)
    for (int j = 0; j < g.n_s; ++j) g(i, j) = p(g.coord(i), g.coord(j));
  for (auto [x, y] : {std::pair{0.1234, -0.3}, std::pair{-0.5, 0.41}, std::pair{0.0, 0.0}}) {
    CHECK(std::abs(g.interpolate(x, y, 6) - p(x, y)) < 1e-13);
    CHECK(std::abs(g.interpolate(x, y, 4) - p(x, y)) < 1e-13);
  }
  CHECK(g.interpolate(0.95, 0.0) == cplx{});
}

TEST_CASE("rest terms: unitarity at n = 0 and one power per added term") {
  const Grid grid = make_grid(192, 150.0);
  const auto ts = geometric_times(5.0, 70.0, 8);
  const RestTermSeries r0 = rest_term_norms(gauss, 1.0, 1, 0, ts, grid, 0.99, 801);
  for (double v : r0.l2.values) CHECK_THAT(v, WithinRel(r0.l2.values.front(), 1e-12));
  const RestTermSeries r1 = rest_term_norms(gauss, 1.0, 1, 1, ts, grid, 0.99, 801);
  const RestTermSeries r2 = rest_term_norms(gauss, 1.0, 1, 2, ts, grid, 0.99, 801);
  const double s1 = fit_decay(r1.l2, DecayModel::power, 0.0, 1e9, 5).slope;
  const double s2 = fit_decay(r2.l2, DecayModel::power, 0.0, 1e9, 5).slope;
  INFO("slopes " << s1 << " " << s2);
  CHECK(s1 <= -0.8);
  CHECK(s2 <= -1.7);
  CHECK(s2 - s1 <= -0.8);
  CHECK_THROWS_AS(rest_term_norms(gauss, 1.0, 1, 1, {100.0}, grid, 0.99, 801), std::domain_error);
}

TEST_CASE("weighted p norms") {
  const Grid grid = make_grid(64, 40.0);
  const SpectralField f = AnalyticProfile::gaussian({1.0, 0.2}, 0.8).sample(grid);
  const double M = 1.0, t = 3.0;
  CHECK(weighted_p_norm(SpectralField(grid), M, 1, t, 1, 2, NormKind::l2) == 0.0);
  CHECK(weighted_p_norm(f, M, 1, t, 1, 2, NormKind::l2) >= weighted_p_norm(f, M, 1, t, 1, 0, NormKind::l2));
  CHECK(weighted_p_norm(f, M, 1, t, 0, 2, NormKind::sup) >= weighted_p_norm(f, M, 1, t, 0, 0, NormKind::sup));
  // j = k = 0, L2: M ||phi|| + sum_mu ||d_mu phi||
  const SpectralField phi = free_propagate(f, M, 1, t);
  auto l2 = [](const SpectralField& s) { return inverse_transform(s).l2_norm(); };
  double expected = M * l2(phi);
  expected += l2(apply_multiplier(phi, mult::Omega{M, 1.0}));
  expected += l2(apply_multiplier(phi, mult::Derivative{0}));
  expected += l2(apply_multiplier(phi, mult::Derivative{1}));
  CHECK_THAT(weighted_p_norm(f, M, 1, t, 0, 0, NormKind::l2), WithinRel(expected, 1e-12));
  CHECK_THROWS_AS(weighted_p_norm(f, M, 1, t, 2, 0, NormKind::l2), std::invalid_argument);
}

TEST_CASE("inverse construction round trip and zero slice") {
  const Grid grid = make_grid(128, 100.0);
  const ConeSlice g = g0_from_profile(gauss, 1.0, 1, 0.99, 801);
  const auto f = inverse_construction(g, grid, 0);
  const SpectralField ref = gauss.sample(grid);
  CHECK((f[0] - ref).max_abs() <= 1e-6 * ref.max_abs());
  const auto z = inverse_construction(g.like(-1), grid, 1);
  REQUIRE(z.size() == 2);
  CHECK(z[0].max_abs() == 0.0);
  CHECK(z[1].max_abs() == 0.0);
  CHECK_THROWS_AS(inverse_construction(g.like(-2), grid, 0), std::invalid_argument);
  CHECK_THROWS_AS(inverse_construction(g, grid, 2), std::invalid_argument);
}

TEST_CASE("inverse construction aborts on a coarse slice") {
  const Grid grid = make_grid(64, 50.0);
  const ConeSlice g = g0_from_profile(gauss, 1.0, 1, 0.99, 41);
  CHECK_THROWS_AS(inverse_construction(g, grid, 0), std::runtime_error);
}

TEST_CASE("u_0 residual of a hand-built homogeneous function decays") {
  const Grid grid = make_grid(192, 150.0);
  const ConeSlice g = g0_from_profile(gauss, 1.0, 1, 0.99, 801);
  const auto f = inverse_construction(g, grid, 0);
  const DecaySeries u = inverse_residual(g, f, geometric_times(5.0, 70.0, 8));
  CHECK(fit_decay(u, DecayModel::power, 0.0, 1e9, 5).slope <= -0.8);
}

TEST_CASE("resonance triples") {
  CHECK_NOTHROW(ResonanceTriple{2.0, 1, 1.0, 1, 1.0, 1}.validate());
  CHECK_NOTHROW(ResonanceTriple{1.0, 1, 1.0, -1, 2.0, 1}.validate());
  CHECK_THROWS_AS((ResonanceTriple{1.5, 1, 1.0, 1, 1.0, 1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ResonanceTriple{2.0, 0, 1.0, 1, 1.0, 1}.validate()), std::invalid_argument);
  CHECK(ResonanceTriple{2.0, 1, 1.0, 1, 1.0, 1}.phase_defect(0.7) == 0.0);
}

TEST_CASE("leading resonant coefficient reduces to the logarithmic profile coefficient") {
  const Grid grid = make_grid(64, 48.0);
  const double m = 1.0;
  const ResonanceTriple rt{2 * m, 1, m, 1, m, 1};
  const SpectralFunction dressed = [](double kx, double ky) {
    return gauss(kx, ky) / cplx{0.0, 2.0 * omega(1.0, kx, ky)};
  };
  const SpectralField f0 = resonant_f0(rt, dressed, dressed, grid);
  double worst = 0.0;
  for (int ix = 0; ix < grid.n; ++ix)
    for (int iy = 0; iy < grid.n; ++iy) {
      if (grid.is_nyquist(ix, iy)) continue;
      const cplx h = gauss(0.5 * grid.wavenumber(ix), 0.5 * grid.wavenumber(iy));
      const cplx ref = cplx{0.0, -1.0 / (8 * m)} * h * h;
      if (std::abs(ref) > 1e-8) worst = std::max(worst, std::abs(f0(ix, iy) - ref) / std::abs(ref));
    }
  CHECK(worst <= 1e-10);
  const SpectralFunction zero = [](double, double) { return cplx{}; };
  CHECK(resonant_f0(rt, zero, dressed, grid).max_abs() == 0.0);
}

TEST_CASE("mixed-sign triple samples -k and 2k") {
  const Grid grid = make_grid(32, 24.0);
  const double m = 1.0;
  const ResonanceTriple rt{m, 1, m, -1, 2 * m, 1};
  const AnalyticProfile g2 = AnalyticProfile::gaussian({0.4, 0.1}, 0.5, {0.1, 0.0});
  const SpectralField f0 = resonant_f0(rt, gauss.as_function(), g2.as_function(), grid);
  const int ix = 3, iy = 29;
  const double kx = grid.wavenumber(ix), ky = grid.wavenumber(iy);
  const double r = omega(m, kx, ky) / m;
  const cplx expected = cplx{0.0, -2.0 * m * r * r} * gauss(-kx, -ky) * g2(2 * kx, 2 * ky);
  CHECK(std::abs(f0(ix, iy) - expected) < 1e-15);
}

TEST_CASE("resonance residual vanishes for zero data") {
  const Grid grid = make_grid(64, 64.0);
  const ResonanceTriple rt{2.0, 1, 1.0, 1, 1.0, 1};
  ResonanceOptions opt;
  opt.n_s = 201;
  const DecaySeries s = delta_residual(rt, AnalyticProfile{}, gauss, 1, {1.0, 2.0}, grid, opt);
  for (double v : s.values) CHECK(v == 0.0);
}
