#include <catch_amalgamated.hpp>

#include <sstream>

#include "rkg/dynamics.hpp"

using namespace rkg;
using Catch::Matchers::WithinRel;

namespace {

SpectralField gaussian(const Grid& g, double w, cplx amp, double kx0 = 0.0, double ky0 = 0.0) {
  return SpectralField::from_symbol(g, [&](double kx, double ky) {
    const double dx = kx - kx0, dy = ky - ky0;
    return amp * std::exp(-(dx * dx + dy * dy) / (2 * w * w));
  });
}

PhaseState data(const Grid& g, double amp = 1.0) {
  return PhaseState::from_plus(1.0, gaussian(g, 0.6, amp * cplx{1.0, 0.4}, 0.2, -0.1),
                               gaussian(g, 0.6, amp * cplx{0.5, -0.2}, -0.1, 0.2));
}

/// Textbook RK4 on the profile b = V(-t) a, b' = V(-t) N(V(t) b).
PhaseState reference_step(System kind, const PhaseState& a, double t, double h) {
  const PhaseState b = free_propagate(a, -t);
  auto f = [&](double s, const PhaseState& y) { return free_propagate(nonlinear_term(kind, free_propagate(y, s)), -s); };
  const PhaseState k1 = f(t, b);
  const PhaseState k2 = f(t + h / 2, b + (h / 2) * k1);
  const PhaseState k3 = f(t + h / 2, b + (h / 2) * k2);
  const PhaseState k4 = f(t + h, b + h * k3);
  const PhaseState next = b + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return free_propagate(next, t + h);
}

}  // namespace

TEST_CASE("system kinds parse and print") {
  CHECK(parse_system("A") == System::A);
  CHECK(parse_system("b") == System::B);
  CHECK(std::string(to_string(System::B)) == "B");
  CHECK_THROWS_AS(parse_system("C"), std::invalid_argument);
}

TEST_CASE("nonlinear term fills both sign components of the driven field") {
  const Grid g = make_grid(32, 16.0);
  const PhaseState a = data(g);
  for (System kind : {System::A, System::B}) {
    const PhaseState n = nonlinear_term(kind, a);
    const int j = kind == System::A ? 2 : 1;
    CHECK(n.at(3 - j, +1).max_abs() == 0.0);
    CHECK(n.at(3 - j, -1).max_abs() == 0.0);
    CHECK(n.at(j, +1).max_abs() > 0.0);
    CHECK((n.at(j, +1) - n.at(j, -1)).max_abs() == 0.0);
  }
}

TEST_CASE("integrator step matches the reference RK4 oracle") {
  const Grid g = make_grid(32, 16.0);
  const PhaseState a = data(g);
  for (System kind : {System::A, System::B}) {
    Integrator integ(kind, g, 1.0, 0.1);
    const PhaseState x = integ.step(a, 0.3);
    const PhaseState y = reference_step(kind, a, 0.3, 0.1);
    CHECK(e_norm(x - y) < 1e-13 * e_norm(y));
  }
}

TEST_CASE("real-field product engine agrees with the complex product") {
  const Grid g = make_grid(32, 16.0);
  const PhaseState a = data(g);
  const SpectralField phi1 = reconstruct_phi(a, 1)[0];
  const SpectralField phi2 = reconstruct_phi(a, 2)[0];
  CHECK((real_product(phi1, phi2) - product(phi1, phi2)).max_abs() < 1e-14 * product(phi1, phi2).max_abs());
  CHECK((real_product(phi1, phi1) - product(phi1, phi1)).max_abs() < 1e-14 * product(phi1, phi1).max_abs());
}

TEST_CASE("free flow conserves e_norm to machine precision") {
  const Grid g = make_grid(64, 32.0);
  const PhaseState a = data(g);
  const PhaseState b = evolve(System::A, a, 0.0, 20.0, 0.1, 0.0);
  CHECK_THAT(e_norm(b), WithinRel(e_norm(a), 1e-13));
  CHECK(e_norm(b - free_propagate(a, 20.0)) < 1e-13 * e_norm(a));
}

TEST_CASE("reality constraint drift stays below 1e-10 per unit time") {
  const Grid g = make_grid(64, 32.0);
  const PhaseState a = data(g);
  for (System kind : {System::A, System::B}) {
    const PhaseState b = evolve(kind, a, 0.0, 10.0, 0.05);
    CHECK(reality_defect(b) / 10.0 <= 1e-10);
  }
}

TEST_CASE("self-convergence order is at least 3.8") {
  const Grid g = make_grid(32, 16.0);
  const PhaseState a = data(g, 2.0);
  for (System kind : {System::A, System::B}) {
    const double T = 2.0;
    const PhaseState u1 = evolve(kind, a, 0.0, T, 0.2);
    const PhaseState u2 = evolve(kind, a, 0.0, T, 0.1);
    const PhaseState u3 = evolve(kind, a, 0.0, T, 0.05);
    const double order = std::log2(e_norm(u1 - u2) / e_norm(u2 - u3));
    INFO("order " << order);
    CHECK(order >= 3.8);
  }
}

TEST_CASE("backward integration reverses forward integration") {
  const Grid g = make_grid(32, 16.0);
  const PhaseState a = data(g);
  for (System kind : {System::A, System::B}) {
    const PhaseState b = evolve(kind, a, 0.0, 3.0, 0.05);
    const PhaseState c = evolve(kind, b, 3.0, 0.0, 0.05);
    CHECK(e_norm(c - a) < 1e-7 * e_norm(a));
  }
}

TEST_CASE("solve validates its time grid and records samples") {
  const Grid g = make_grid(32, 16.0);
  const PhaseState a = data(g);
  CHECK_THROWS_AS(solve(System::A, a, 0.0, 1.0, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(solve(System::A, a, 0.0, 1.0, 0.0), std::invalid_argument);
  SolveOptions opt;
  opt.sample_every = 5;
  const Trajectory tr = solve(System::B, a, 0.0, 1.0, 0.05, opt);
  REQUIRE(tr.times.size() == 5);
  CHECK(tr.times.back() == 1.0);
  CHECK(tr.states.size() == tr.times.size());
  std::ostringstream os;
  write_trajectory_csv(os, tr);
  CHECK(os.str().rfind("t,e_norm,q_2,constraint_drift\n", 0) == 0);
}

TEST_CASE("blow-up guard rejects a step that grows the norm") {
  const Grid g = make_grid(32, 16.0);
  const PhaseState a = data(g, 50.0);
  Integrator integ(System::A, g, 1.0, 1.0);
  CHECK_THROWS_AS(integ.step(a, 0.0), StepRejected);
}
