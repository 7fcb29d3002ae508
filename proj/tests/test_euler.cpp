#include <doctest.h>

#include <cmath>
#include <numbers>

#include "srgeo/euler.hpp"
#include "support.hpp"

using namespace srgeo;
using testing::Gen;

namespace {

const double kPi = std::numbers::pi;
const double kR2 = std::sqrt(0.5);

double dist(const Momentum& a, const Momentum& b) { return (a.v - b.v).norm(); }

// Classical RK4 with a fixed step, as an independent reference integrator.
Momentum rk4(Momentum p, double t, int n) {
  const double h = t / n;
  auto f = [](const Vec3& v) { return euler_field(Momentum(v)).v; };
  Vec3 y = p.v;
  for (int i = 0; i < n; ++i) {
    const Vec3 k1 = f(y), k2 = f(y + 0.5 * h * k1), k3 = f(y + 0.5 * h * k2), k4 = f(y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return Momentum(y);
}

}  // namespace

TEST_CASE("euler_field examples") {
  CHECK(dist(euler_field(Momentum(1, 0, 0)), Momentum(0, 0, 2)) == 0.0);
  CHECK(dist(euler_field(Momentum(0, 0, 5)), Momentum(0, 0, 0)) == 0.0);
  CHECK(dist(euler_field(Momentum(kR2, kR2, 0)), Momentum(0, 0, 0)) < 1e-15);
}

TEST_CASE("euler_field is the Lie-Poisson flow of g*/2 (property)") {
  Gen gen(21);
  for (int n = 0; n < 200; ++n) {
    const Momentum p = gen.covector();
    const Vec3 h = 0.5 * gstar_gradient(p);
    Vec3 oracle;
    for (int i = 0; i < 3; ++i) oracle(i) = lie_poisson_bracket(Vec3(Vec3::Unit(i)), h, p);
    CHECK((euler_field(p).v - oracle).norm() < 1e-13);
    CHECK(std::abs(casimir_gradient(p).dot(euler_field(p).v)) < 1e-12);
    CHECK(std::abs(gstar_gradient(p).dot(euler_field(p).v)) < 1e-12);
  }
}

TEST_CASE("reduced_field examples and chart consistency") {
  auto rf = [](double th, double z) { return reduced_field(ReducedState{th, z}); };
  CHECK(rf(-kPi / 4, 0).theta_dot == 0.0);
  CHECK(std::abs(rf(-kPi / 4, 0).zeta_dot) < 1e-15);
  CHECK(rf(0, 1).theta_dot == -1.0);
  CHECK(rf(0, 1).zeta_dot == doctest::Approx(2.0));
  CHECK(std::abs(rf(kPi / 4, 0).zeta_dot) < 1e-15);

  for (int i = 0; i < 24; ++i) {
    for (int j = 0; j < 9; ++j) {
      const ReducedState s{2 * kPi * i / 24, -2.0 + 0.5 * j};
      const Momentum p = s.lift();
      CHECK(casimir(p) == doctest::Approx(0.5 * s.zeta * s.zeta + std::sin(2 * s.theta)));
      // Push forward through the chart: d/dt (cos theta, sin theta, zeta).
      const ReducedVelocity v = reduced_field(s);
      const Vec3 pushed(-std::sin(s.theta) * v.theta_dot, std::cos(s.theta) * v.theta_dot,
                        v.zeta_dot);
      CHECK((pushed - euler_field(p).v).norm() < 1e-13);
    }
  }
}

TEST_CASE("classify_regime") {
  CHECK(classify_regime(3.0).tag == RegimeTag::PrincipalSeries);
  CHECK(classify_regime(-0.5).tag == RegimeTag::DiscreteSeries);
  CHECK(classify_regime(0.5).tag == RegimeTag::ComplementarySeries);
  CHECK(classify_regime(0.0).tag == RegimeTag::Parabolic);
  CHECK_FALSE(classify_regime(0.0).has_periodic_orbits());
  CHECK(classify_regime(1.0).tag == RegimeTag::Separatrix);
  CHECK(classify_regime(1.0 + 1e-13).tag == RegimeTag::Separatrix);
  CHECK(classify_regime(-1.0).tag == RegimeTag::EllipticEquilibrium);
  CHECK(classify_regime(-1.5).tag == RegimeTag::BelowMinimum);
}

TEST_CASE("initial_momentum examples") {
  CHECK(dist(initial_momentum(-1.0), Momentum(kR2, -kR2, 0.0)) < 1e-15);
  CHECK(dist(initial_momentum(1.0), Momentum(kR2, -kR2, 2.0)) < 1e-15);
  CHECK(dist(initial_momentum(0.0), Momentum(kR2, -kR2, std::sqrt(2.0))) < 1e-15);
  for (double c : {-0.9, -0.2, 0.3, 4.0}) {
    CHECK(casimir(initial_momentum(c)) == doctest::Approx(c));
  }
}

TEST_CASE("t_geod limits and frozen oracle values") {
  // Frozen values: complete elliptic integrals (tests/oracles/omega_oracle.py).
  CHECK(t_geod(0.5) == doctest::Approx(4.313031294999286).epsilon(1e-11));
  CHECK(t_geod(5.0) == doctest::Approx(2.002154760912213).epsilon(1e-11));
  CHECK(t_geod(-0.5) == doctest::Approx(3.371500709625192).epsilon(1e-11));
  CHECK(t_geod(0.2) == doctest::Approx(3.8991354996120515).epsilon(1e-11));
  CHECK(t_geod(-0.9) == doctest::Approx(3.182006907581584).epsilon(1e-11));
  CHECK(t_geod(1.0 + 1e-6) == doctest::Approx(17.28124455051364).epsilon(1e-10));
  CHECK(t_geod(-1.0 + 1e-8) == doctest::Approx(kPi).epsilon(1e-7));
  CHECK(t_geod(1e6) == doctest::Approx(kPi * std::sqrt(2.0) / 1e3).epsilon(1e-2));
  CHECK_THROWS_AS(t_geod(1.0), Error);
  CHECK_THROWS_AS(t_geod(-1.0), Error);
  CHECK(t_geod(0.0, kDefaultTol) > 0.0);
}

TEST_CASE("quadrature and ODE periods agree on a log grid (property)") {
  std::vector<double> cs;
  for (int i = 0; i < 12; ++i) cs.push_back(-1.0 + std::pow(10.0, -6.0 + 5.9 * i / 11));
  for (int i = 0; i < 12; ++i) cs.push_back(1.0 + std::pow(10.0, -6.0 + 12.0 * i / 11));
  for (int i = 0; i < 6; ++i) cs.push_back(1.0 - std::pow(10.0, -6.0 + 5.5 * i / 5));
  for (double c : cs) {
    const double q = t_geod_quadrature(c), o = t_geod_ode(c);
    CHECK_MESSAGE(std::abs(q - o) <= 1e-8 * q, "C = " << c);
  }
}

TEST_CASE("integrate_momentum") {
  const Momentum eq(kR2, kR2, 0.0);
  CHECK(dist(integrate_momentum(eq, 17.0), eq) < 1e-14);

  const double c = -1.0 + 1e-4;
  const Momentum p0 = initial_momentum(c);
  CHECK(dist(integrate_momentum(p0, t_geod(c)), p0) < 1e-8);

  const Momentum p1(1.0, 0.0, 0.0);
  const Momentum ref = rk4(p1, 0.1, 2000);
  CHECK(dist(integrate_momentum(p1, 0.1), ref) < 1e-10);
}

TEST_CASE("invariants are conserved over 100 time units (property)") {
  Gen gen(22);
  for (int n = 0; n < 6; ++n) {
    const Momentum p0 = gen.unit_covector(2.5);
    const Momentum p = integrate_momentum(p0, 100.0);
    CHECK(std::abs(casimir(p) - casimir(p0)) < 1e-9);
    CHECK(std::abs(gstar(p) - 1.0) < 1e-9);
  }
}

TEST_CASE("project_to_level lands on both level sets") {
  Gen gen(23);
  for (int n = 0; n < 100; ++n) {
    const Momentum p = gen.unit_covector(2.0);
    const Momentum noisy(Vec3(p.v + Vec3(1e-4, -2e-4, 3e-4)));
    const Momentum q = project_to_level(noisy, 1.0, casimir(p));
    CHECK(std::abs(gstar(q) - 1.0) < 1e-13);
    CHECK(std::abs(casimir(q) - casimir(p)) < 1e-12);
  }
}
