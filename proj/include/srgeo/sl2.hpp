#pragma once

// Linear algebra of sl2(R) and PSL2(R).
//
// Algebra elements are stored by their coefficients (x, y, z) in the basis
//   X = [[0,1],[0,0]],  Y = [[0,0],[1,0]],  Z = [[1,0],[0,-1]],
// so that x X + y Y + z Z = [[z, x],[y, -z]]. The bracket uses the
// right-invariant sign convention [U, V] = -(UV - VU), which gives
//   [X,Y] = -Z,  [X,Z] = 2X,  [Y,Z] = -2Y.
// Covectors (xi, eta, zeta) are the dual coordinates; the Lie-Poisson
// structure is {xi,eta} = zeta, {xi,zeta} = -2 xi, {eta,zeta} = 2 eta.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "srgeo/error.hpp"

namespace srgeo {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

template <typename Scalar>
struct AlgebraElement {
  Vector3<Scalar> coeffs = Vector3<Scalar>::Zero();

  AlgebraElement() = default;
  AlgebraElement(Scalar x, Scalar y, Scalar z) : coeffs(x, y, z) {}
  explicit AlgebraElement(const Vector3<Scalar>& c) : coeffs(c) {}

  static AlgebraElement X() { return {1, 0, 0}; }
  static AlgebraElement Y() { return {0, 1, 0}; }
  static AlgebraElement Z() { return {0, 0, 1}; }

  Scalar x() const { return coeffs(0); }
  Scalar y() const { return coeffs(1); }
  Scalar z() const { return coeffs(2); }

  Matrix2<Scalar> matrix() const {
    Matrix2<Scalar> m;
    m << z(), x(), y(), -z();
    return m;
  }

  /// Coefficients of the traceless part of m.
  static AlgebraElement from_matrix(const Matrix2<Scalar>& m) {
    return {m(0, 1), m(1, 0), (m(0, 0) - m(1, 1)) / Scalar(2)};
  }

  /// det of the associated matrix: -z^2 - x y.
  Scalar determinant() const { return -z() * z() - x() * y(); }

  friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
    return AlgebraElement(Vector3<Scalar>(a.coeffs + b.coeffs));
  }
  friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
    return AlgebraElement(Vector3<Scalar>(a.coeffs - b.coeffs));
  }
  friend AlgebraElement operator*(Scalar s, const AlgebraElement& a) {
    return AlgebraElement(Vector3<Scalar>(s * a.coeffs));
  }
};

template <typename Scalar>
struct Covector {
  Vector3<Scalar> v = Vector3<Scalar>::Zero();

  Covector() = default;
  Covector(Scalar xi, Scalar eta, Scalar zeta) : v(xi, eta, zeta) {}
  explicit Covector(const Vector3<Scalar>& c) : v(c) {}

  Scalar xi() const { return v(0); }
  Scalar eta() const { return v(1); }
  Scalar zeta() const { return v(2); }

  Covector operator-() const { return Covector(Vector3<Scalar>(-v)); }
};

/// Rounding noise of the computed determinant of m. For large entries the
/// determinant ad - bc cancels heavily; deviations of det from 1 below this
/// level carry no information and are left alone.
template <typename Scalar>
Scalar determinant_noise(const Matrix2<Scalar>& m) {
  using std::abs;
  return Scalar(8) * std::numeric_limits<Scalar>::epsilon() *
         (abs(m(0, 0) * m(1, 1)) + abs(m(0, 1) * m(1, 0)));
}

/// A 2x2 real matrix of determinant one, modulo sign.
///
/// The stored representative is renormalized to det = 1 (up to the rounding
/// noise of the determinant) and has its first
/// nonzero entry in the order (a, b, c, d) positive.
template <typename Scalar>
class Psl2Element {
 public:
  Psl2Element() : m_(Matrix2<Scalar>::Identity()) {}

  explicit Psl2Element(const Matrix2<Scalar>& m) : m_(m) { normalize(); }

  static Psl2Element identity() { return Psl2Element(); }

  const Matrix2<Scalar>& matrix() const { return m_; }
  Scalar a() const { return m_(0, 0); }
  Scalar b() const { return m_(0, 1); }
  Scalar c() const { return m_(1, 0); }
  Scalar d() const { return m_(1, 1); }

  Psl2Element operator*(const Psl2Element& other) const {
    return Psl2Element(Matrix2<Scalar>(m_ * other.m_));
  }

  Psl2Element inverse() const {
    Matrix2<Scalar> inv;
    inv << d(), -b(), -c(), a();
    return Psl2Element(inv);
  }

 private:
  void normalize() {
    using std::abs;
    using std::sqrt;
    const Scalar det = m_.determinant();
    const Scalar noise = determinant_noise(m_);
    if (!(det > Scalar(0)) && noise < Scalar(1)) {
      throw Error(ErrorCode::PreconditionViolated,
                  "Psl2Element requires a positive determinant");
    }
    if (det > Scalar(0) && abs(det - Scalar(1)) > noise) m_ /= sqrt(det);
    for (Eigen::Index k = 0; k < 4; ++k) {
      const Scalar e = m_(k / 2, k % 2);
      if (e != Scalar(0)) {
        if (e < Scalar(0)) m_ = -m_;
        break;
      }
    }
  }

  Matrix2<Scalar> m_;
};

/// Sup-norm distance in PSL2: min over the sign ambiguity.
template <typename Scalar>
Scalar psl2_distance(const Matrix2<Scalar>& a, const Matrix2<Scalar>& b) {
  using std::min;
  return min((a - b).cwiseAbs().maxCoeff(), (a + b).cwiseAbs().maxCoeff());
}

template <typename Scalar>
Scalar psl2_distance(const Psl2Element<Scalar>& a, const Psl2Element<Scalar>& b) {
  return psl2_distance(a.matrix(), b.matrix());
}

template <typename Scalar>
AlgebraElement<Scalar> algebra_bracket(const AlgebraElement<Scalar>& u,
                                       const AlgebraElement<Scalar>& v) {
  const Matrix2<Scalar> U = u.matrix();
  const Matrix2<Scalar> V = v.matrix();
  return AlgebraElement<Scalar>::from_matrix(Matrix2<Scalar>(-(U * V - V * U)));
}

/// Poisson tensor at p: {f, g}(p) = df^T * P(p) * dg.
template <typename Scalar>
Matrix3<Scalar> poisson_tensor(const Covector<Scalar>& p) {
  const Scalar two(2);
  Matrix3<Scalar> P;
  // clang-format off
  P <<  Scalar(0),      p.zeta(),       -two * p.xi(),
       -p.zeta(),       Scalar(0),       two * p.eta(),
        two * p.xi(),  -two * p.eta(),   Scalar(0);
  // clang-format on
  return P;
}

template <typename Scalar>
Scalar lie_poisson_bracket(const Vector3<Scalar>& grad_f, const Vector3<Scalar>& grad_g,
                           const Covector<Scalar>& p) {
  return grad_f.dot(poisson_tensor(p) * grad_g);
}

template <typename Scalar>
Scalar casimir(const Covector<Scalar>& p) {
  return p.zeta() * p.zeta() / Scalar(2) + Scalar(2) * p.xi() * p.eta();
}

template <typename Scalar>
Vector3<Scalar> casimir_gradient(const Covector<Scalar>& p) {
  return {Scalar(2) * p.eta(), Scalar(2) * p.xi(), p.zeta()};
}

/// Sub-Riemannian co-metric xi^2 + eta^2 (X, Y orthonormal).
template <typename Scalar>
Scalar gstar(const Covector<Scalar>& p) {
  return p.xi() * p.xi() + p.eta() * p.eta();
}

template <typename Scalar>
Vector3<Scalar> gstar_gradient(const Covector<Scalar>& p) {
  return {Scalar(2) * p.xi(), Scalar(2) * p.eta(), Scalar(0)};
}

/// Generator of the Casimir flow, A(p) = zeta Z + 2 xi Y + 2 eta X.
/// casimir(p) == -det(A(p)) / 2.
template <typename Scalar>
AlgebraElement<Scalar> a_matrix(const Covector<Scalar>& p) {
  return {Scalar(2) * p.eta(), Scalar(2) * p.xi(), p.zeta()};
}

/// Horizontal velocity xi X + eta Y of the geodesic flow.
template <typename Scalar>
AlgebraElement<Scalar> geodesic_velocity(const Covector<Scalar>& p) {
  return {p.xi(), p.eta(), Scalar(0)};
}

/// exp(t U) as an SL2 matrix, from Cayley-Hamilton: U^2 = -det(U) Id.
template <typename Scalar>
Matrix2<Scalar> exp_traceless_sl2(const AlgebraElement<Scalar>& u, Scalar t) {
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  using std::sqrt;
  using std::abs;
  const Scalar det = u.determinant();
  const Matrix2<Scalar> U = u.matrix();
  const Matrix2<Scalar> I = Matrix2<Scalar>::Identity();
  if (abs(det) < Scalar(1e-14)) {
    return Matrix2<Scalar>(I + t * U - (t * t / Scalar(2)) * det * I);
  }
  if (det < Scalar(0)) {
    const Scalar mu = sqrt(-det);
    return Matrix2<Scalar>(cosh(t * mu) * I + (sinh(t * mu) / mu) * U);
  }
  const Scalar mu = sqrt(det);
  return Matrix2<Scalar>(cos(t * mu) * I + (sin(t * mu) / mu) * U);
}

template <typename Scalar>
Psl2Element<Scalar> exp_traceless(const AlgebraElement<Scalar>& u, Scalar t) {
  return Psl2Element<Scalar>(exp_traceless_sl2(u, t));
}

/// Inverts exp_traceless on the one-parameter subgroup generated by u.
///
/// Hyperbolic generators give a unique real parameter. Elliptic generators
/// give s in [0, pi/mu), the fundamental interval of the subgroup in PSL2.
/// `tol` bounds the sup-norm residual relative to max(1, |h|).
template <typename Scalar>
Scalar log_in_subgroup(const Matrix2<Scalar>& h, const AlgebraElement<Scalar>& u,
                       Scalar tol = Scalar(1e-8)) {
  using std::abs;
  using std::asinh;
  using std::atan2;
  using std::fmod;
  using std::max;
  using std::sqrt;
  const Scalar det = u.determinant();
  if (abs(det) < Scalar(1e-14)) {
    throw Error(ErrorCode::ParabolicGenerator, "log_in_subgroup: det(u) = 0");
  }
  const Matrix2<Scalar> U = u.matrix();
  const Scalar uu = (U.array() * U.array()).sum();
  const Scalar half_trace = h.trace() / Scalar(2);
  Scalar s;
  if (det < Scalar(0)) {
    const Scalar mu = sqrt(-det);
    const Matrix2<Scalar> hs = half_trace < Scalar(0) ? Matrix2<Scalar>(-h) : h;
    const Matrix2<Scalar> traceless =
        hs - (hs.trace() / Scalar(2)) * Matrix2<Scalar>::Identity();
    const Scalar k = (traceless.array() * U.array()).sum() / uu;  // sinh(s mu)/mu
    s = asinh(k * mu) / mu;
  } else {
    const Scalar mu = sqrt(det);
    const Matrix2<Scalar> traceless = h - half_trace * Matrix2<Scalar>::Identity();
    const Scalar sn = (traceless.array() * U.array()).sum() / uu * mu;  // sin(s mu)
    Scalar angle = atan2(sn, half_trace);
    const Scalar pi = std::numbers::pi_v<Scalar>;
    angle = fmod(angle, pi);
    if (angle < Scalar(0)) angle += pi;
    if (angle >= pi) angle -= pi;
    s = angle / mu;
  }
  const Scalar scale = max(Scalar(1), h.cwiseAbs().maxCoeff());
  const Scalar residual = psl2_distance(exp_traceless_sl2(u, s), h);
  if (residual > tol * scale) {
    throw Error(ErrorCode::NotInSubgroup,
                "log_in_subgroup: residual " + num_str(double(residual)));
  }
  return s;
}

template <typename Scalar>
Scalar log_in_subgroup(const Psl2Element<Scalar>& h, const AlgebraElement<Scalar>& u,
                       Scalar tol = Scalar(1e-8)) {
  return log_in_subgroup(h.matrix(), u, tol);
}

using Algebra = AlgebraElement<double>;
using Momentum = Covector<double>;
using Psl2 = Psl2Element<double>;
using Mat2 = Matrix2<double>;
using Vec3 = Vector3<double>;

}  // namespace srgeo
