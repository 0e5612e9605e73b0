#include <catch_amalgamated.hpp>

#include <random>

#include "rkg/norms.hpp"

using namespace rkg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SpectralField gaussian(const Grid& g, double w, cplx amp, double kx0 = 0.0, double ky0 = 0.0) {
  return SpectralField::from_symbol(g, [&](double kx, double ky) {
    const double dx = kx - kx0, dy = ky - ky0;
    return amp * std::exp(-(dx * dx + dy * dy) / (2 * w * w));
  });
}

PhaseState sample_state(const Grid& g, double m) {
  return PhaseState::from_plus(m, gaussian(g, 0.6, {1.0, 0.4}, 0.2, -0.1), gaussian(g, 0.5, {0.3, -0.2}, -0.1, 0.3));
}

}  // namespace

TEST_CASE("slot layout and mirror involution") {
  CHECK(slot(1, +1) == 0);
  CHECK(slot(1, -1) == 1);
  CHECK(slot(2, +1) == 2);
  CHECK(slot(2, -1) == 3);
  const Grid g = make_grid(32, 20.0);
  const SpectralField f = gaussian(g, 0.7, {0.5, 1.0}, 0.3, 0.1);
  const SpectralField back = mirror(mirror(f));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(back[i] - f[i]) == 0.0);
  CHECK(reality_defect(PhaseState::from_plus(1.0, f, f)) == 0.0);
}

TEST_CASE("e_norm of a single mode") {
  const Grid g = make_grid(32, 16.0);
  const double m = 0.8;
  PhaseState a(g, m);
  a.at(2, -1)(3, 5) = {2.0, -1.0};
  const double w = omega(2 * m, g.wavenumber(3), g.wavenumber(5));
  CHECK_THAT(e_norm(a), WithinRel(std::sqrt(5.0 / w) * g.dk(), 1e-14));
}

TEST_CASE("e_norm is a norm") {
  const Grid g = make_grid(32, 16.0);
  const PhaseState a = sample_state(g, 1.0);
  PhaseState b = free_propagate(a, 0.7);
  b *= cplx{0.2, 0.5};
  CHECK(e_norm(a + b) <= e_norm(a) + e_norm(b) + 1e-14);
  CHECK_THAT(e_norm(cplx{0.0, -3.0} * a), WithinRel(3.0 * e_norm(a), 1e-14));
  CHECK(e_norm(PhaseState(g, 1.0)) == 0.0);
}

TEST_CASE("free propagation preserves e_norm and reality") {
  const Grid g = make_grid(64, 30.0);
  const PhaseState a = sample_state(g, 1.3);
  for (double t : {0.5, 10.0, -7.0}) {
    const PhaseState b = free_propagate(a, t);
    CHECK_THAT(e_norm(b), WithinRel(e_norm(a), 1e-14));
    CHECK(reality_defect(b) < 1e-15);
  }
}

TEST_CASE("phase-space round trip of real fields") {
  const Grid g = make_grid(64, 24.0);
  const double m = 1.1;
  FieldPair p;
  for (int j = 0; j < 2; ++j) {
    p.phi[j] = PhysicalField::sample(g, [&](double x, double y) {
      return cplx{std::exp(-(x * x + y * y) / (4.0 + j)) * (1.0 + 0.2 * x), 0.0};
    });
    p.phi_dot[j] = PhysicalField::sample(g, [&](double x, double y) {
      return cplx{0.3 * y * std::exp(-((x - 1) * (x - 1) + y * y) / 3.0), 0.0};
    });
  }
  const PhaseState a = to_phase_space(p, m);
  CHECK(reality_defect(a) < 1e-12);
  const FieldPair q = from_phase_space(a);
  for (int j = 0; j < 2; ++j) {
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      e1 = std::max(e1, std::abs(q.phi[j][i] - p.phi[j][i]));
      e2 = std::max(e2, std::abs(q.phi_dot[j][i] - p.phi_dot[j][i]));
    }
    CHECK(e1 < 1e-12);
    CHECK(e2 < 1e-12);
  }
}

TEST_CASE("complex physical data and broken reality are rejected") {
  const Grid g = make_grid(32, 16.0);
  FieldPair p;
  for (int j = 0; j < 2; ++j) {
    p.phi[j] = PhysicalField::sample(g, [](double x, double) { return cplx{std::exp(-x * x), 0.1}; });
    p.phi_dot[j] = PhysicalField(g);
  }
  CHECK_THROWS_AS(to_phase_space(p, 1.0), std::invalid_argument);
  PhaseState a = sample_state(g, 1.0);
  a.at(1, -1)(1, 1) += 1e-3;
  CHECK_THROWS_AS(from_phase_space(a), std::invalid_argument);
}

TEST_CASE("q-bar norms of a Gaussian match closed forms") {
  // f(x) = e^{-|x|^2/2}: ||f||^2 = pi, ||x1 f||^2 = pi/2, ||d1 f||^2 = pi/2.
  const Grid g = make_grid(128, 32.0);
  const SpectralField f = transform(PhysicalField::sample(g, [](double x, double y) {
    return cplx{std::exp(-(x * x + y * y) / 2.0), 0.0};
  }));
  CHECK_THAT(q_bar_norm(f, 0), WithinRel(std::sqrt(pi), 1e-12));
  // n = 1: mu, nu in {0, e1, e2}; 9 terms. ||x_a d_b f||^2 = pi/4 (a != b), 3pi/4 (a = b).
  const double n1 = pi + 2 * (pi / 2) + 2 * (pi / 2) + 2 * (3 * pi / 4) + 2 * (pi / 4);
  CHECK_THAT(q_bar_norm(f, 1), WithinRel(std::sqrt(n1), 1e-10));
  CHECK(q_bar_norm(f, 2) > q_bar_norm(f, 1));
  CHECK_THROWS_AS(q_bar_norm(f, -1), std::invalid_argument);
}

TEST_CASE("q norms are monotone in the order") {
  const Grid g = make_grid(64, 32.0);
  const PhaseState a = sample_state(g, 1.0);
  CHECK(e_N_norm(a, 0) <= e_N_norm(a, 1));
  CHECK(e_N_norm(a, 1) <= e_N_norm(a, 2));
  CHECK(q_big_norm(a[0], 1) > 0.0);
  CHECK_THROWS_AS(q_big_norm(a[0], 0), std::invalid_argument);
}

TEST_CASE("locality defect separates central and spread data") {
  const Grid g = make_grid(64, 32.0);
  const SpectralField narrow = transform(PhysicalField::sample(g, [](double x, double y) {
    return cplx{std::exp(-(x * x + y * y)), 0.0};
  }));
  const SpectralField wide = transform(PhysicalField::sample(g, [](double x, double y) {
    return cplx{std::exp(-(x * x + y * y) / 200.0), 0.0};
  }));
  CHECK(locality_defect(narrow) < 1e-12);
  CHECK(locality_defect(wide) > 0.1);
}

TEST_CASE("norm report serializes its fields") {
  const Grid g = make_grid(32, 16.0);
  const NormReport r = norm_report(sample_state(g, 1.0), 2.5, {0, 1}, {1});
  nlohmann::json j = r;
  CHECK(j["t"].get<double>() == 2.5);
  CHECK(j.contains("q_0"));
  CHECK(j.contains("q_1"));
  CHECK(j.contains("Q_1"));
  CHECK_THAT(j["e_norm"].get<double>(), WithinAbs(r.e_norm, 0.0));
}
