#include <doctest.h>

#include <cmath>
#include <numbers>

#include "srgeo/annulus.hpp"
#include "srgeo/birkhoff.hpp"

using namespace srgeo;

namespace {

const double kPi = std::numbers::pi;

TwistMap standard_like(double eps) {
  TwistMap m;
  m.a = 0.0;
  m.b = 1.0;
  m.map = [eps](double x, double y) {
    const double y1 = y + eps * std::sin(2 * kPi * x);
    return Vec2(x + y1 - 0.5, y1);
  };
  return m;
}

TwistMap shear(double sign) {
  TwistMap m;
  m.a = 0.0;
  m.b = 1.0;
  m.map = [sign](double x, double y) { return Vec2(x + sign * (y - 0.5), y); };
  return m;
}

// F(y, z) = (y + rot, b z + eps g(y)): the invariant graph solves
// f(y + rot) = b f(y) + eps g(y).
GraphFamily linear_family(double rot, double b) {
  GraphFamily fam;
  fam.normal_dim = 1;
  fam.eval = [rot, b](double eps, const VecX& y, const VecX& z) {
    GraphFamily::Value v;
    v.a = VecX::Constant(1, y(0) + rot);
    v.b = VecX::Constant(1, b * z(0) + eps * std::cos(y(0)));
    v.a_z = MatX::Zero(1, 1);
    v.b_z = MatX::Constant(1, 1, b);
    return v;
  };
  return fam;
}

}  // namespace

TEST_CASE("check_twist") {
  CHECK(check_twist(shear(1.0)).pass);
  const TwistReport bad = check_twist(shear(-1.0));
  CHECK_FALSE(bad.pass);
  CHECK_FALSE(bad.twist_ok);
  CHECK_FALSE(bad.offender.empty());
  CHECK(check_twist(standard_like(0.05)).pass);

  TwistMap squash = shear(1.0);
  squash.map = [](double x, double y) { return Vec2(x + y - 0.5, 0.5 * y); };
  const TwistReport sq = check_twist(squash);
  CHECK_FALSE(sq.area_ok);
}

TEST_CASE("pb_fixed_point") {
  const auto pts = pb_fixed_point(standard_like(0.05));
  REQUIRE(pts.size() == 2);
  CHECK(std::abs(pts[0](0)) < 1e-10);
  CHECK(std::abs(pts[0](1) - 0.5) < 1e-10);
  CHECK(std::abs(pts[1](0) - 0.5) < 1e-10);
  CHECK(std::abs(pts[1](1) - 0.5) < 1e-10);

  const TwistMap line = shear(1.0);
  const auto all = pb_fixed_point(line, 1e-12, 64);
  CHECK(all.size() == 64);
  for (const auto& p : all) {
    const Vec2 f = line(p(0), p(1));
    CHECK((f - p).cwiseAbs().maxCoeff() <= 1e-12);
  }

  CHECK_THROWS_AS(pb_fixed_point(shear(-1.0)), Error);

  TwistMap drift = shear(1.0);
  drift.map = [](double x, double y) { return Vec2(x + y - 0.5, y + 1e-3 * (2 + std::sin(2 * kPi * x))); };
  // Not area preserving in general; the precondition check refuses it.
  CHECK_THROWS_AS(pb_fixed_point(drift), Error);
}

TEST_CASE("fixed points of twist maps are fixed (property)") {
  for (double eps : {0.01, 0.03, 0.07, 0.12}) {
    const TwistMap m = standard_like(eps);
    for (const auto& p : pb_fixed_point(m, 1e-12)) {
      const Vec2 f = m(p(0), p(1));
      CHECK((f - p).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("invariant_graph_newton on a linear family") {
  const GraphFamily fam = linear_family(0.0, 2.0);
  const InvariantGraph g0 = InvariantGraph::zero(GraphDomain::circle(64), 1);
  const InvariantGraph zero = invariant_graph_newton(fam, 0.0, g0);
  CHECK(zero.residual == 0.0);
  CHECK(zero.values.norm() == 0.0);

  const InvariantGraph g = invariant_graph_newton(fam, 0.1, g0);
  for (int i = 0; i < 64; ++i) {
    CHECK(std::abs(g.values(i, 0) + 0.1 * std::cos(g.domain.node(i)(0))) < 1e-13);
  }

  // With a rotation the graph must be interpolated off the grid.
  const GraphFamily rot = linear_family(0.3, 0.5);
  const InvariantGraph r = invariant_graph_newton(rot, 0.2, g0);
  CHECK(r.residual <= 1e-12);
  // Oracle: f = Re(c e^{iy}) with c (e^{i rot} - b) = eps.
  const std::complex<double> c = 0.2 / (std::exp(std::complex<double>(0, 0.3)) - 0.5);
  for (int i = 0; i < 64; ++i) {
    const double y = r.domain.node(i)(0);
    CHECK(std::abs(r.values(i, 0) - std::real(c * std::exp(std::complex<double>(0, y)))) < 1e-12);
  }
}

TEST_CASE("degenerate normal direction is rejected") {
  const GraphFamily fam = linear_family(0.0, 1.0);
  CHECK_THROWS_AS(
      invariant_graph_newton(fam, 0.1, InvariantGraph::zero(GraphDomain::circle(32), 1)), Error);
}

TEST_CASE("nonlinear cylinder family converges quadratically") {
  GraphFamily fam;
  fam.normal_dim = 1;
  fam.eval = [](double eps, const VecX& y, const VecX& z) {
    GraphFamily::Value v;
    v.a = y;
    v.a(0) += 0.3 + 0.1 * z(0);
    v.b = VecX::Constant(1, 0.5 * z(0) + eps * std::sin(y(0)) * y(1) + eps * z(0) * z(0));
    v.a_z = MatX::Zero(2, 1);
    v.a_z(0, 0) = 0.1;
    v.b_z = MatX::Constant(1, 1, 0.5 + 2 * eps * z(0));
    return v;
  };
  const InvariantGraph g0 = InvariantGraph::zero(GraphDomain::cylinder(32, 12, 0.0, 1.0), 1);
  const InvariantGraph g = invariant_graph_newton(fam, 0.2, g0);
  CHECK(g.residual <= 1e-12);
  CHECK(quadratic_tail(g.history, 1e-12));
  // Invariance at off-grid sample points.
  for (int s = 0; s < 64; ++s) {
    VecX y(2);
    y << 2 * kPi * (s + 0.37) / 64, (s % 7) / 7.0 + 0.05;
    const VecX f = g.evaluate(y);
    const GraphFamily::Value v = fam.eval(0.2, y, f);
    CHECK(std::abs(v.b(0) - g.evaluate(v.a)(0)) < 1e-8);
  }
}

TEST_CASE("trigonometric interpolation") {
  InvariantGraph g = InvariantGraph::zero(GraphDomain::circle(32), 1);
  for (int i = 0; i < 32; ++i) {
    const double y = g.domain.node(i)(0);
    g.values(i, 0) = std::sin(3 * y) + 0.5 * std::cos(y);
  }
  for (double y : {0.1, 1.7, 4.4, 7.0, -2.0}) {
    const VecX p = VecX::Constant(1, y);
    CHECK(g.evaluate(p)(0) == doctest::Approx(std::sin(3 * y) + 0.5 * std::cos(y)).epsilon(1e-12));
    CHECK(g.gradient(p)(0, 0) ==
          doctest::Approx(3 * std::cos(3 * y) - 0.5 * std::sin(y)).epsilon(1e-11));
  }
}

TEST_CASE("invariant circle of the S-map") {
  const SMap zero = s_map(5, 1.0, kick_perturbation(0.0, 1.0));
  const InvariantGraph c0 = invariant_circle_ck(zero.circle_family());
  CHECK(c0.residual == 0.0);
  CHECK(c0.values.cwiseAbs().maxCoeff() == 0.0);
  const SMap s = s_map(10, 1.0, kick_perturbation(0.0, 1.0));
  CHECK(s.circle_family().j_star == doctest::Approx(10 * kPi));
}

TEST_CASE("quadratic_tail") {
  CHECK(quadratic_tail({1e-1, 1e-2, 1e-4, 1e-8, 1e-15}, 1e-14));
  CHECK_FALSE(quadratic_tail({1e-4, 5e-5, 2.5e-5, 1.2e-5}, 1e-14));
}
