#include <doctest.h>

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "srgeo/flow_compare.hpp"

using namespace srgeo;

namespace {

FlowPair linear_pair(const MatX& a, const MatX& b, bool closed_form) {
  FlowPair fp;
  fp.dim = int(a.rows());
  fp.base_field = [a](const VecX& x) { return VecX(a * x); };
  fp.base_flow = [a](const VecX& x, double t) { return VecX((t * a).exp() * x); };
  fp.base_jacobian = [a](const VecX&) { return a; };
  if (closed_form) {
    fp.base_inverse_differential = [a](const VecX&, double t) { return MatX((-t * a).exp()); };
  }
  fp.perturbation = [b](const VecX& x) { return VecX(b * x); };
  return fp;
}

VecX start(double i0) {
  VecX x(5);
  x << 0.0, 1.0, 0.0, 0.0, i0;
  return x;
}

}  // namespace

TEST_CASE("zero perturbation leaves the conjugator fixed") {
  FlowPair fp = model_flow_pair(5);
  fp.perturbation = [](const VecX& x) { return VecX::Zero(x.size()); };
  const VecX x0 = start(0.3);
  const ConjugatorResult r = conjugator_ode(fp, x0, 2.0);
  CHECK((r.w - x0).norm() == 0.0);
  CHECK(r.sup_displacement == 0.0);
  CHECK(r.conjugation_error < 1e-12);
}

TEST_CASE("constant perturbation of the zero field translates") {
  FlowPair fp;
  fp.dim = 3;
  fp.base_field = [](const VecX& x) { return VecX::Zero(x.size()); };
  fp.base_flow = [](const VecX& x, double) { return x; };
  fp.base_inverse_differential = [](const VecX&, double) { return MatX::Identity(3, 3); };
  const VecX c = (VecX(3) << 0.5, -1.0, 2.0).finished();
  fp.perturbation = [c](const VecX&) { return c; };
  const VecX x0 = (VecX(3) << 1.0, 2.0, 3.0).finished();
  const ConjugatorResult r = conjugator_ode(fp, x0, 1.5);
  CHECK((r.w - (x0 + 1.5 * c)).norm() < 1e-12);
  CHECK((perturbed_flow(fp, x0, 1.5) - (x0 + 1.5 * c)).norm() < 1e-12);
}

TEST_CASE("linear flows match the matrix exponential oracle") {
  MatX a(3, 3), b(3, 3);
  a << 0.0, -1.0, 0.2, 1.0, 0.0, 0.0, 0.0, 0.3, -0.1;
  b << 0.05, 0.0, 0.1, -0.02, 0.01, 0.0, 0.0, 0.04, 0.03;
  const VecX x0 = (VecX(3) << 0.3, -0.7, 1.1).finished();
  const double t = 2.0;
  const VecX oracle = (-t * a).exp() * (t * (a + b)).exp() * x0;
  for (bool closed : {true, false}) {
    const FlowPair fp = linear_pair(a, b, closed);
    const ConjugatorResult r = conjugator_ode(fp, x0, t);
    CHECK_MESSAGE((r.w - oracle).norm() < 1e-10, "closed form: " << closed);
    CHECK(r.conjugation_error < 1e-10);
    CHECK((inverse_differential(fp, x0, t) - MatX((-t * a).exp())).norm() < 1e-10);
  }
}

TEST_CASE("singular base differential is rejected") {
  MatX a = MatX::Zero(2, 2);
  a(0, 0) = -40.0;
  const FlowPair fp = linear_pair(a, MatX::Identity(2, 2) * 0.1, true);
  CHECK_THROWS_AS(conjugator_ode(fp, VecX::Ones(2), 1.0), Error);
}

TEST_CASE("model_flow_g0 examples") {
  const G0Result g = model_flow_g0(0.0, 0.0, 1.0, 2.0);
  CHECK(g.state(0) == doctest::Approx(1.0));
  CHECK(g.state(3) == doctest::Approx(2.0));
  CHECK(g.state(4) == 1.0);
  CHECK(g.differential(3, 4) == doctest::Approx(-2.0));
  CHECK((g.differential * g.inverse - MatX::Identity(5, 5)).norm() < 1e-13);

  // The transverse block is a rotation by I t / 2.
  const G0Result r = model_flow_g0(start(1.0), 3.14159265358979323846);
  CHECK(r.state(1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.state(2) == doctest::Approx(1.0));

  const VecX x = start(0.5);
  const VecX v = model_field(x);
  CHECK(v(0) == doctest::Approx(0.25));
  CHECK(v(3) == doctest::Approx(2.0));
  CHECK(v(4) == 0.0);
}

TEST_CASE("inverse differential norm bound (property)") {
  for (double i : {0.05, 0.2, 1.0, 3.0}) {
    for (double t : {0.1, 1.0, 10.0}) {
      const G0Result g = model_flow_g0(0.3, 0.7, i, t);
      const double bound = g.reeb_inverse.norm() + std::abs(t / (i * i));
      CHECK(g.inverse.norm() <= bound * (1 + 1e-14));
      MatX diff = g.inverse - g.reeb_inverse;
      diff(3, 4) = 0.0;
      CHECK(diff.norm() == 0.0);
    }
  }
}

TEST_CASE("closeness report") {
  const ClosenessReport rep =
      closeness_report([](int m) { return model_flow_pair(m); }, {0.2, 0.1}, 10);
  CHECK(rep.expected_exponent == 7.0);
  REQUIRE(rep.rows.size() == 2);
  for (const auto& row : rep.rows) {
    CHECK(row.horizon == doctest::Approx(1 / row.i0));
    CHECK(row.conjugation_error < 1e-10);
  }
  // dI ~ I^10 t feeds theta through t / I^2: distance of order I^6 at t = 1 / I.
  CHECK(rep.rows[1].sup_distance > 0.1 * std::pow(0.1, 6));
  CHECK(rep.rows[1].sup_distance < 10 * std::pow(0.1, 6));
  CHECK(rep.rows[1].sup_distance < rep.rows[0].sup_distance);

  CHECK(loglog_slope({1, 10, 100}, {2, 200, 20000}) == doctest::Approx(2.0));
}
