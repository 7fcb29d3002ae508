#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

#include "srgeo/sl2.hpp"
#include "support.hpp"

using namespace srgeo;
using testing::Gen;

namespace {

const double kR2 = std::sqrt(0.5);

Vec3 unit(int i) { return Vec3::Unit(i); }

}  // namespace

TEST_CASE("algebra bracket on the basis") {
  const Algebra x = Algebra::X(), y = Algebra::Y(), z = Algebra::Z();
  CHECK((algebra_bracket(x, y).coeffs - (-1.0 * z).coeffs).norm() == 0.0);
  CHECK(algebra_bracket(x, x).coeffs.norm() == 0.0);
  CHECK((algebra_bracket(y, z).coeffs - (-2.0 * y).coeffs).norm() == 0.0);
  CHECK((algebra_bracket(z, x).coeffs - (-2.0 * x).coeffs).norm() == 0.0);
}

TEST_CASE("algebra element round trip and trace") {
  Gen gen(11);
  for (int n = 0; n < 200; ++n) {
    const Algebra u = gen.algebra();
    CHECK(u.matrix().trace() == 0.0);
    CHECK((Algebra::from_matrix(u.matrix()).coeffs - u.coeffs).norm() == 0.0);
  }
}

TEST_CASE("Lie-Poisson bracket examples") {
  const Momentum p(0.0, 0.0, 3.0);
  CHECK(lie_poisson_bracket(unit(0), unit(1), p) == doctest::Approx(3.0));
  CHECK(lie_poisson_bracket(unit(2), unit(2), p) == 0.0);
  const Momentum q(0.3, -0.4, 1.1);
  CHECK(std::abs(lie_poisson_bracket(casimir_gradient(q), gstar_gradient(q), q)) < 1e-15);
}

TEST_CASE("Casimir commutes with coordinates (property)") {
  Gen gen(12);
  for (int n = 0; n < 500; ++n) {
    const Momentum p = gen.covector(3.0);
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(lie_poisson_bracket(casimir_gradient(p), unit(i), p)) < 1e-12);
    }
  }
}

TEST_CASE("Jacobi identity on the structure table") {
  // The bracket of coordinate functions is linear; its structure constants
  // are the Poisson tensor evaluated at the basis covectors.
  auto bracket_coord = [](int i, int j) {
    Vec3 out;
    for (int k = 0; k < 3; ++k) {
      out(k) = lie_poisson_bracket(unit(i), unit(j), Momentum(Vec3(unit(k))));
    }
    return out;  // {x_i, x_j} = sum_k out(k) x_k
  };
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        // {x_i, {x_j, x_k}} + cyclic, evaluated at a generic point.
        const Momentum p(0.7, -1.3, 0.4);
        auto outer = [&](int a, int b, int c) {
          return lie_poisson_bracket(unit(a), bracket_coord(b, c), p);
        };
        CHECK(std::abs(outer(i, j, k) + outer(j, k, i) + outer(k, i, j)) < 1e-14);
      }
    }
  }
}

TEST_CASE("casimir and gstar examples") {
  CHECK(casimir(Momentum(kR2, kR2, 0.0)) == doctest::Approx(1.0));
  CHECK(casimir(Momentum(kR2, -kR2, 0.0)) == doctest::Approx(-1.0));
  CHECK(casimir(Momentum(0.0, 0.0, 2.0)) == 2.0);
  CHECK(gstar(Momentum(1.0, 0.0, 7.0)) == 1.0);
  CHECK(gstar(Momentum(0.0, 0.0, 5.0)) == 0.0);
  CHECK(gstar(Momentum(0.6, 0.8, -2.0)) == doctest::Approx(1.0));
}

TEST_CASE("a_matrix examples and the determinant identity") {
  CHECK((a_matrix(Momentum(0, 0, 1)).matrix() - Algebra::Z().matrix()).norm() == 0.0);
  const Mat2 a = a_matrix(Momentum(kR2, kR2, 0.0)).matrix();
  CHECK(a(0, 1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(a(1, 0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(a.determinant() == doctest::Approx(-2.0));
  const Mat2 b = a_matrix(Momentum(kR2, -kR2, 0.0)).matrix();
  CHECK(b(0, 1) == doctest::Approx(-std::sqrt(2.0)));
  CHECK(b.determinant() == doctest::Approx(2.0));

  Gen gen(13);
  for (int n = 0; n < 300; ++n) {
    const Momentum p = gen.covector(3.0);
    CHECK(std::abs(casimir(p) + 0.5 * a_matrix(p).matrix().determinant()) < 1e-12);
  }
}

TEST_CASE("exp_traceless examples") {
  const Psl2 d = exp_traceless(Algebra::Z(), 1.0);
  CHECK(d.a() == doctest::Approx(std::numbers::e));
  CHECK(d.d() == doctest::Approx(1.0 / std::numbers::e));
  CHECK(psl2_distance(exp_traceless(Algebra(), 3.7), Psl2::identity()) == 0.0);
  const Algebra rot(1.0, -1.0, 0.0);  // [[0,1],[-1,0]]
  const Mat2 oracle = (rot.matrix() * (std::numbers::pi / 2)).exp();
  CHECK(psl2_distance(exp_traceless_sl2(rot, std::numbers::pi / 2), oracle) < 1e-15);
}

TEST_CASE("exp_traceless matches the scaling-and-squaring oracle (property)") {
  Gen gen(14);
  for (int n = 0; n < 300; ++n) {
    const Algebra u = gen.algebra();
    const double t = gen.uniform(-2.0, 2.0);
    const Mat2 oracle = (u.matrix() * t).exp();
    CHECK(psl2_distance(exp_traceless_sl2(u, t), oracle) <=
          1e-13 * std::max(1.0, oracle.cwiseAbs().maxCoeff()));
  }
  // Near-parabolic generator uses the series branch.
  const Algebra par(1.0, 0.0, 1e-9);
  const Mat2 oracle = (par.matrix() * 1.5).exp();
  CHECK(psl2_distance(exp_traceless_sl2(par, 1.5), oracle) < 1e-14);
}

TEST_CASE("one-parameter subgroup law (property)") {
  Gen gen(15);
  for (int n = 0; n < 300; ++n) {
    const Algebra u = gen.algebra(1.0);
    const double s = gen.uniform(-1.5, 1.5), t = gen.uniform(-1.5, 1.5);
    const Psl2 lhs = exp_traceless(u, s + t);
    const Psl2 rhs = exp_traceless(u, s) * exp_traceless(u, t);
    CHECK(psl2_distance(lhs, rhs) <= 1e-10 * std::max(1.0, lhs.matrix().cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("log_in_subgroup examples and round trip") {
  const Mat2 d = Eigen::DiagonalMatrix<double, 2>(std::numbers::e, 1.0 / std::numbers::e);
  CHECK(log_in_subgroup(d, Algebra::Z()) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(log_in_subgroup(Mat2(Mat2::Identity()), Algebra(1.0, 2.0, 0.3)) == doctest::Approx(0.0));
  const Algebra a = a_matrix(Momentum(1.0, 1.0, 1.0));
  CHECK(log_in_subgroup(exp_traceless_sl2(a, 0.37), a) == doctest::Approx(0.37).epsilon(1e-13));
  CHECK_THROWS_AS(log_in_subgroup(Mat2(Mat2::Identity()), Algebra(1.0, 0.0, 0.0)), Error);

  Gen gen(16);
  for (int n = 0; n < 300; ++n) {
    const Algebra u = gen.algebra();
    const double det = u.determinant();
    if (std::abs(det) < 1e-3) continue;
    const double s = det < 0 ? gen.uniform(-2.0, 2.0)
                             : gen.uniform(0.0, std::numbers::pi / std::sqrt(det) * 0.999);
    CHECK(log_in_subgroup(exp_traceless_sl2(u, s), u) == doctest::Approx(s).epsilon(1e-9));
  }
}

TEST_CASE("Psl2Element canonical representative") {
  Mat2 m;
  m << -2.0, 0.0, 0.0, -0.5;
  const Psl2 g(m);
  CHECK(g.a() == 2.0);
  Mat2 n;
  n << 0.0, -1.0, 1.0, 0.0;
  CHECK(Psl2(n).b() == 1.0);
  Mat2 bad;
  bad << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(Psl2{bad}, Error);

  Gen gen(17);
  for (int k = 0; k < 300; ++k) {
    const Psl2 a = gen.group(), b = gen.group();
    const Psl2 c = a * b.inverse();
    CHECK(std::abs(c.matrix().determinant() - 1.0) <= 1e-12);
    const Mat2& cm = c.matrix();
    for (int e = 0; e < 4; ++e) {
      if (cm(e / 2, e % 2) != 0.0) {
        CHECK(cm(e / 2, e % 2) > 0.0);
        break;
      }
    }
  }
}
