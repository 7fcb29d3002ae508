#include "srgeo/euler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "srgeo/ode.hpp"
#include "srgeo/quadrature.hpp"

namespace srgeo {

namespace {

constexpr double kCutTol = 1e-12;
constexpr double kPi = std::numbers::pi;

void require_reduced_level(double c) {
  require(c > -1.0 + kCutTol, ErrorCode::OutOfRange,
          "reduced period needs C > -1, got " + num_str(c));
  if (std::abs(c - 1.0) <= kCutTol) {
    throw Error(ErrorCode::Divergence, "reduced period diverges on the separatrix C = 1");
  }
}

}  // namespace

Momentum ReducedState::lift() const { return {std::cos(theta), std::sin(theta), zeta}; }

ReducedVelocity reduced_field(const ReducedState& s) {
  return {-s.zeta, 2.0 * std::cos(2.0 * s.theta)};
}

std::string_view to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::BelowMinimum: return "BelowMinimum";
    case RegimeTag::EllipticEquilibrium: return "EllipticEquilibrium";
    case RegimeTag::DiscreteSeries: return "DiscreteSeries";
    case RegimeTag::Parabolic: return "Parabolic";
    case RegimeTag::ComplementarySeries: return "ComplementarySeries";
    case RegimeTag::Separatrix: return "Separatrix";
    case RegimeTag::PrincipalSeries: return "PrincipalSeries";
  }
  return "Unknown";
}

bool Regime::is_torus_regime() const {
  return tag == RegimeTag::DiscreteSeries || tag == RegimeTag::ComplementarySeries ||
         tag == RegimeTag::PrincipalSeries;
}

bool Regime::has_periodic_orbits() const {
  return tag != RegimeTag::BelowMinimum && tag != RegimeTag::Parabolic;
}

Regime classify_regime(double c) {
  RegimeTag tag;
  if (std::abs(c + 1.0) <= kCutTol) {
    tag = RegimeTag::EllipticEquilibrium;
  } else if (c < -1.0) {
    tag = RegimeTag::BelowMinimum;
  } else if (std::abs(c) <= kCutTol) {
    tag = RegimeTag::Parabolic;
  } else if (c < 0.0) {
    tag = RegimeTag::DiscreteSeries;
  } else if (std::abs(c - 1.0) <= kCutTol) {
    tag = RegimeTag::Separatrix;
  } else if (c < 1.0) {
    tag = RegimeTag::ComplementarySeries;
  } else {
    tag = RegimeTag::PrincipalSeries;
  }
  return {tag, c};
}

Momentum initial_momentum(double c) {
  require(c >= -1.0, ErrorCode::OutOfRange,
          "initial_momentum needs C >= -1, got " + num_str(c));
  const double r = std::numbers::sqrt2 / 2.0;
  return {r, -r, std::sqrt(2.0 * (c + 1.0))};
}

double t_geod_quadrature(double c, double tol) {
  require_reduced_level(c);
  const double rel = std::max(0.1 * tol, 1e-15);
  // With psi = 2 theta + pi/2 the level reads zeta^2 = 2 (C + cos psi), and
  // the period is a complete elliptic integral K(k):
  //   -1 < C < 1:  T = 2 K(k),                    k'^2 = (1 - C) / 2,
  //   C > 1:       T = 4 K(k) / sqrt(2 (C + 1)),  k'^2 = (C - 1) / (C + 1).
  // Substituting tan phi = e^s turns K into
  //   int ds / sqrt((1 + e^-2s)(1 + k'^2 e^2s)),
  // a smooth bump of width about log(1 / k') that stays tame as k' -> 0.
  const double kp2 = c < 1.0 ? 0.5 * (1.0 - c) : (c - 1.0) / (c + 1.0);
  auto f = [kp2](double s) {
    return 1.0 / std::sqrt((1.0 + std::exp(-2.0 * s)) * (1.0 + kp2 * std::exp(2.0 * s)));
  };
  // Tails decay like e^s on the left and e^-s / k' on the right.
  const double lo = -40.0, hi = 40.0 - 0.5 * std::log(kp2);
  const double k = quad::integrate(f, lo, hi, rel).value;
  return c < 1.0 ? 2.0 * k : 4.0 * k / std::sqrt(2.0 * (c + 1.0));
}

double t_geod_ode(double c, double tol) {
  require_reduced_level(c);
  const Momentum p0 = initial_momentum(c);
  const double g0 = gstar(p0);
  auto field = [](double, const Vec3& y) -> Vec3 { return euler_field(Momentum(y)).v; };
  auto post = [g0, c](double, Vec3& y) { y = project_to_level(Momentum(y), g0, c).v; };
  // e = sin(theta + pi/4) decreases through 0 with xi > eta once per period.
  auto event = [](const Vec3& y) { return (y(0) + y(1)) / std::numbers::sqrt2; };

  double t_prev = 0.0;
  Vec3 y_prev = p0.v;
  bool found = false;
  auto observe = [&](double t, const Vec3& y) {
    const double e0 = event(y_prev);
    const double e1 = event(y);
    if (t_prev > 0.0 && e0 > 0.0 && e1 <= 0.0 && y(0) - y(1) > 0.0) {
      found = true;
      return false;
    }
    t_prev = t;
    y_prev = y;
    return true;
  };
  ode::StepControl ctl;
  ctl.rtol = ctl.atol = std::max(tol, 1e-14);
  // Generous horizon: several times the quadrature estimate.
  const double horizon = 4.0 * t_geod_quadrature(c, 1e-8) + 1.0;
  double t_stop = 0.0;
  ode::integrate(field, p0.v, 0.0, horizon, ctl, post, observe, nullptr, &t_stop);
  if (!found) {
    throw Error(ErrorCode::NoPeriodicOrbit, "no reduced return detected for C = " +
                                                num_str(c));
  }
  // Regula falsi (Illinois) on the step length from the last state before
  // the crossing.
  auto e_at = [&](double h) {
    if (h == 0.0) return event(y_prev);
    return event(ode::dp45_step(field, t_prev, y_prev, h).y);
  };
  double a = 0.0, b = t_stop - t_prev;
  double fa = e_at(a), fb = e_at(b);
  if (fb > 0.0) return t_stop;
  int side = 0;
  for (int it = 0; it < 200 && b - a > 1e-16 * std::max(1.0, t_stop); ++it) {
    const double m = (a * fb - b * fa) / (fb - fa);
    const double fm = e_at(m);
    if (fm == 0.0) return t_prev + m;
    if (fm > 0.0) {
      a = m;
      fa = fm;
      if (side == 1) fb *= 0.5;
      side = 1;
    } else {
      b = m;
      fb = fm;
      if (side == -1) fa *= 0.5;
      side = -1;
    }
    if (std::abs(fm) < 1e-17) break;
  }
  return t_prev + (std::abs(fa) < std::abs(fb) ? a : b);
}

double t_geod(double c, double tol, bool cross_check) {
  const double tq = t_geod_quadrature(c, tol);
  if (cross_check) {
    const double to = t_geod_ode(c, tol);
    const double rel = std::abs(tq - to) / tq;
    // Near the minimum the event is crossed at speed zeta0 = sqrt(2 (C + 1)),
    // so the ODE period carries an absolute state error divided by zeta0.
    // Near the separatrix dT/dC ~ 1 / |1 - C| amplifies the level drift.
    const double zeta0 = std::sqrt(2.0 * (c + 1.0));
    const double slack = 1e-12 / zeta0 + 1e-16 / std::abs(1.0 - c);
    if (rel > 10.0 * std::max(tol, 1e-10) + slack) {
      throw Error(ErrorCode::QuadratureMismatch,
                  "quadrature and ODE periods differ by " + num_str(rel) +
                      " at C = " + num_str(c));
    }
  }
  return tq;
}

Momentum project_to_level(const Momentum& p, double g0, double c0) {
  Vec3 x = p.v;
  for (int it = 0; it < 3; ++it) {
    const Momentum q(x);
    const Eigen::Vector2d r(gstar(q) - g0, casimir(q) - c0);
    if (r.cwiseAbs().maxCoeff() < 1e-16 * std::max(1.0, std::abs(c0))) break;
    Eigen::Matrix<double, 2, 3> J;
    J.row(0) = gstar_gradient(q).transpose();
    J.row(1) = casimir_gradient(q).transpose();
    const Eigen::Matrix2d M = J * J.transpose();
    const double scale = M.diagonal().maxCoeff();
    if (std::abs(M.determinant()) <= 1e-14 * scale * scale) {
      // Parallel gradients at the equilibria: correct g* alone.
      const Vec3 g = J.row(0).transpose();
      const double gg = g.squaredNorm();
      if (gg > 0.0) x -= (r(0) / gg) * g;
      continue;
    }
    x -= J.transpose() * M.inverse() * r;
  }
  return Momentum(x);
}

Momentum integrate_momentum(const Momentum& p0, double t, double tol) {
  const double g0 = gstar(p0);
  const double c0 = casimir(p0);
  auto field = [](double, const Vec3& y) -> Vec3 { return euler_field(Momentum(y)).v; };
  auto post = [g0, c0](double, Vec3& y) { y = project_to_level(Momentum(y), g0, c0).v; };
  ode::StepControl ctl;
  ctl.rtol = ctl.atol = std::max(tol, 1e-14);
  return Momentum(ode::integrate(field, p0.v, 0.0, t, ctl, post));
}

}  // namespace srgeo
