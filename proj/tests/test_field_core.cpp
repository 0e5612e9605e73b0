#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "rkg/field_io.hpp"
#include "rkg/multiplier.hpp"
#include "rkg/product.hpp"

using namespace rkg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

PhysicalField random_field(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  PhysicalField u(g);
  for (auto& v : u.data()) v = {nd(rng), nd(rng)};
  return u;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

SpectralField gaussian_spectrum(const Grid& g, double w, double kx0, double ky0, cplx amp) {
  return SpectralField::from_symbol(g, [&](double kx, double ky) {
    const double dx = kx - kx0, dy = ky - ky0;
    return amp * std::exp(-(dx * dx + dy * dy) / (2 * w * w));
  });
}

}  // namespace

TEST_CASE("make_grid layout and validation") {
  const Grid g = make_grid(64, 64.0);
  CHECK_THAT(g.dk(), WithinRel(2 * pi / 64, 1e-15));
  CHECK_THAT(g.dk(), WithinAbs(0.0982, 1e-4));

  const Grid h = make_grid(16, 2 * pi);
  CHECK_THAT(h.dk(), WithinRel(1.0, 1e-15));
  CHECK(h.signed_index(0) == 0);
  CHECK(h.signed_index(7) == 7);
  CHECK(h.signed_index(8) == -8);
  CHECK(h.signed_index(15) == -1);
  CHECK_THAT(h.wavenumber(8), WithinAbs(-8.0, 1e-14));

  CHECK_THROWS_AS(make_grid(15, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(14, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(32, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(32, -1.0), std::invalid_argument);
}

TEST_CASE("transform of a constant lives at k = 0") {
  const Grid g = make_grid(32, 20.0);
  const cplx c{1.5, -0.25};
  const SpectralField f = transform(PhysicalField::sample(g, [&](double, double) { return c; }));
  const cplx expected = c * g.length * g.length / (2 * pi);
  CHECK(std::abs(f(0, 0) - expected) < 1e-12 * std::abs(expected));
  double rest = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) rest = std::max(rest, std::abs(f[i]));
  CHECK(rest < 1e-12);
}

TEST_CASE("transform round trip and Plancherel") {
  for (int n : {16, 64, 128}) {
    const Grid g = make_grid(n, 37.0);
    const PhysicalField u = random_field(g, 7u + n);
    const PhysicalField back = inverse_transform(transform(u));
    CHECK(max_diff(back.data(), u.data()) <= 1e-12 * u.sup_norm());
    CHECK_THAT(transform(u).l2_norm(), WithinRel(u.l2_norm(), 1e-12));
  }
}

TEST_CASE("Gaussian transform matches its closed form") {
  // (2 pi)^-1 \int e^{-ikx} e^{-|x|^2/2} dx = e^{-|k|^2/2}
  const Grid g = make_grid(128, 40.0);
  const SpectralField f =
      transform(PhysicalField::sample(g, [](double x, double y) { return std::exp(-(x * x + y * y) / 2); }));
  double err = 0.0;
  for (int ix = 0; ix < g.n; ++ix)
    for (int iy = 0; iy < g.n; ++iy) {
      const double kx = g.wavenumber(ix), ky = g.wavenumber(iy);
      err = std::max(err, std::abs(f(ix, iy) - std::exp(-(kx * kx + ky * ky) / 2)));
    }
  CHECK(err < 1e-13);
}

TEST_CASE("multiplier symbols") {
  const Grid g = make_grid(16, 2 * pi);
  SpectralField delta(g);
  delta(0, 0) = 1.0;
  CHECK_THAT(apply_multiplier(delta, mult::Omega{1.0, 1.0})(0, 0).real(), WithinAbs(1.0, 1e-15));

  SpectralField e2(g);
  e2(2, 0) = 1.0;
  const cplx v = apply_multiplier(e2, mult::Omega{2.0, 1.0})(2, 0);
  CHECK_THAT(v.real(), WithinRel(std::sqrt(8.0), 1e-15));
  CHECK_THAT(v.real(), WithinRel(2 * omega(1.0, 1.0, 0.0), 1e-15));

  SpectralField r = SpectralField::from_symbol(g, [](double kx, double ky) { return cplx{kx + 0.3, ky}; });
  const SpectralField same = apply_multiplier(r, mult::Phase{1.3, -1, 0.0});
  CHECK(max_diff(same.data(), r.data()) == 0.0);

  const SpectralField dx = apply_multiplier(e2, mult::Derivative{0});
  CHECK(std::abs(dx(2, 0) - cplx{0.0, 2.0}) < 1e-15);
  CHECK_THROWS_AS(apply_multiplier(e2, mult::Derivative{2}), std::invalid_argument);
}

TEST_CASE("2 omega_m(k/2) = omega_2m(k) on every mode") {
  const Grid g = make_grid(64, 30.0);
  for (double m : {0.5, 1.0, 1.7}) {
    for (int ix = 0; ix < g.n; ++ix)
      for (int iy = 0; iy < g.n; ++iy) {
        const double kx = g.wavenumber(ix), ky = g.wavenumber(iy);
        CHECK_THAT(2 * omega(m, kx / 2, ky / 2), WithinRel(omega(2 * m, kx, ky), 4e-16));
      }
  }
}

TEST_CASE("coordinate multiplier acts in physical space") {
  const Grid g = make_grid(128, 40.0);
  const SpectralField f =
      transform(PhysicalField::sample(g, [](double x, double y) { return std::exp(-(x * x + y * y) / 2); }));
  const SpectralField xf = apply_multiplier(f, mult::Coordinate{0});
  // F[x e^{-x^2/2}](k) = i d/dk e^{-k^2/2} = -i k e^{-k^2/2}
  double err = 0.0;
  for (int ix = 0; ix < g.n; ++ix)
    for (int iy = 0; iy < g.n; ++iy) {
      const double kx = g.wavenumber(ix), ky = g.wavenumber(iy);
      const cplx ref = cplx{0.0, -kx} * std::exp(-(kx * kx + ky * ky) / 2);
      if (!g.is_nyquist(ix, iy)) err = std::max(err, std::abs(xf(ix, iy) - ref));
    }
  CHECK(err < 1e-12);
}

TEST_CASE("free propagator is diagonal, unitary and a group") {
  const Grid g = make_grid(32, 25.0);
  SpectralField single(g);
  single(3, 30) = 1.0;
  const double M = 1.3, t = 2.7;
  const SpectralField p = free_propagate(single, M, -1, t);
  const cplx expected = std::polar(1.0, -omega(M, g.wavenumber(3), g.wavenumber(30)) * t);
  CHECK(std::abs(p(3, 30) - expected) < 1e-15);

  const SpectralField f = transform(random_field(g, 3));
  CHECK(max_diff(free_propagate(f, M, 1, 0.0).data(), f.data()) == 0.0);
  CHECK_THAT(free_propagate(f, M, 1, 37.5).l2_norm(), WithinRel(f.l2_norm(), 1e-14));
  const SpectralField ab = free_propagate(free_propagate(f, M, 1, 1.25), M, 1, 3.5);
  const SpectralField c = free_propagate(f, M, 1, 4.75);
  CHECK(max_diff(ab.data(), c.data()) < 1e-13 * f.max_abs());
}

TEST_CASE("dealiased product of single modes") {
  const Grid g = make_grid(32, 2 * pi);
  SpectralField a(g), b(g), zero(g);
  a(g.storage_index(2), g.storage_index(-3)) = cplx{1.0, 2.0};
  b(g.storage_index(-4), g.storage_index(1)) = cplx{0.5, -1.0};
  SpectralField ab = product(a, b);
  // (2 pi)^-1 dk^2 * product of amplitudes at the summed mode.
  const cplx expected = cplx{1.0, 2.0} * cplx{0.5, -1.0} * g.dk() * g.dk() / (2 * pi);
  CHECK(std::abs(ab.at_mode(-2, -2) - expected) < 1e-14);
  ab.data()[g.flat(g.storage_index(-2), g.storage_index(-2))] = 0.0;
  CHECK(ab.max_abs() < 1e-14);
  CHECK(product(a, zero).max_abs() == 0.0);
}

TEST_CASE("dealiased product matches the direct convolution oracle") {
  const Grid g = make_grid(32, 16.0);
  const SpectralField f = gaussian_spectrum(g, 0.9, 0.4, -0.2, {1.0, 0.5});
  const SpectralField h = gaussian_spectrum(g, 1.2, -0.7, 0.3, {0.3, -0.8});
  const SpectralField fh = product(f, h);

  // O(N^4) oracle: (Delta k^2 / 2 pi) sum_p f^(p) h^(k - p) over the filtered band.
  SpectralField oracle(g);
  const double r2 = (g.n / 3.0) * (g.n / 3.0);
  auto in_band = [&](int wx, int wy) { return wx * wx + wy * wy < r2; };
  for (int kx = -g.n / 2; kx < g.n / 2; ++kx)
    for (int ky = -g.n / 2; ky < g.n / 2; ++ky) {
      if (!in_band(kx, ky)) continue;
      cplx s{};
      for (int px = -g.n / 2; px < g.n / 2; ++px)
        for (int py = -g.n / 2; py < g.n / 2; ++py) {
          const int qx = kx - px, qy = ky - py;
          if (!in_band(px, py) || !in_band(qx, qy)) continue;
          s += f.at_mode(px, py) * h.at_mode(qx, qy);
        }
      oracle(g.storage_index(kx), g.storage_index(ky)) = s * g.dk() * g.dk() / (2 * pi);
    }
  SpectralField diff = fh - oracle;
  CHECK(diff.l2_norm() <= 1e-10 * oracle.l2_norm());
  CHECK(max_diff(product(h, f).data(), fh.data()) < 1e-15 * fh.max_abs() * 10);
}

TEST_CASE("half-frequency sampling of a Gaussian") {
  const Grid g = make_grid(96, 32.0);
  const cplx amp{0.8, -0.3};
  const SpectralField f = gaussian_spectrum(g, 1.0, 0.5, -0.25, amp);
  const SpectralField half = half_frequency_sample(f);
  double err = 0.0, peak = 0.0;
  for (int ix = 0; ix < g.n; ++ix)
    for (int iy = 0; iy < g.n; ++iy) {
      if (g.is_nyquist(ix, iy)) continue;
      const double kx = g.wavenumber(ix) / 2, ky = g.wavenumber(iy) / 2;
      const cplx ref = amp * std::exp(-((kx - 0.5) * (kx - 0.5) + (ky + 0.25) * (ky + 0.25)) / 2);
      err = std::max(err, std::abs(half(ix, iy) - ref));
      peak = std::max(peak, std::abs(ref));
    }
  CHECK(err <= 1e-8 * peak);

  const SpectralField zero(g);
  CHECK(half_frequency_sample(zero).max_abs() == 0.0);
  CHECK(double_frequency_sample(zero).max_abs() == 0.0);
}

TEST_CASE("double-frequency sampling inverts half sampling on the retained band") {
  const Grid g = make_grid(64, 32.0);
  const SpectralField f = gaussian_spectrum(g, 0.6, 0.2, 0.1, {1.0, 0.0});
  SamplingDiagnostic diag;
  const SpectralField back = double_frequency_sample(half_frequency_sample(f), &diag);
  double err = 0.0;
  for (int wx = -g.n / 4 + 1; wx < g.n / 4; ++wx)
    for (int wy = -g.n / 4 + 1; wy < g.n / 4; ++wy) err = std::max(err, std::abs(back.at_mode(wx, wy) - f.at_mode(wx, wy)));
  CHECK(err < 1e-10);

  const SpectralField wide = gaussian_spectrum(g, 3.0, 0.0, 0.0, {1.0, 0.0});
  double_frequency_sample(wide, &diag);
  CHECK_FALSE(diag.lossless);
  double_frequency_sample(gaussian_spectrum(g, 0.3, 0.0, 0.0, {1.0, 0.0}), &diag);
  CHECK(diag.lossless);
}

TEST_CASE("field serialization round trips") {
  const Grid g = make_grid(16, 9.5);
  SpectralField f = transform(random_field(g, 11));
  f.zero_nyquist();
  std::stringstream csv;
  write_field_csv(csv, f);
  const SpectralField a = read_field_csv(csv);
  CHECK(a.grid() == g);
  CHECK(max_diff(a.data(), f.data()) == 0.0);

  std::stringstream bin;
  write_field_binary(bin, f);
  const SpectralField b = read_field_binary(bin);
  CHECK(max_diff(b.data(), f.data()) == 0.0);

  std::stringstream bad("# n=16 L=1 normalization=unitary\n");
  CHECK_THROWS(read_field_csv(bad));
}
