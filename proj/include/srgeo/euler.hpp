#pragma once

// Euler equations of the geodesic Hamiltonian on sl2*, the reduced system on
// the unit cylinder xi = cos(theta), eta = sin(theta), and the reduced period.

#include <string_view>

#include "srgeo/sl2.hpp"

namespace srgeo {

inline constexpr double kDefaultTol = 1e-12;

/// p' = {p, (xi^2 + eta^2) / 2} = (eta zeta, -xi zeta, 2 (xi^2 - eta^2)).
template <typename Scalar>
Covector<Scalar> euler_field(const Covector<Scalar>& p) {
  return {p.eta() * p.zeta(), -p.xi() * p.zeta(),
          Scalar(2) * (p.xi() * p.xi() - p.eta() * p.eta())};
}

struct ReducedState {
  double theta = 0.0;
  double zeta = 0.0;

  Momentum lift() const;
};

struct ReducedVelocity {
  double theta_dot = 0.0;
  double zeta_dot = 0.0;
};

ReducedVelocity reduced_field(const ReducedState& s);

enum class RegimeTag {
  BelowMinimum,
  EllipticEquilibrium,
  DiscreteSeries,
  Parabolic,
  ComplementarySeries,
  Separatrix,
  PrincipalSeries,
};

std::string_view to_string(RegimeTag tag);

struct Regime {
  RegimeTag tag = RegimeTag::Parabolic;
  double c_value = 0.0;

  /// Levels carrying invariant tori foliated by periodic Casimir orbits.
  bool is_torus_regime() const;
  /// False only for C = 0 and below the minimum.
  bool has_periodic_orbits() const;
};

/// Cut points -1, 0, 1 are matched with tolerance 1e-12.
Regime classify_regime(double c);

/// Canonical point of the level {Cas = C, g* = 1}: theta = -pi/4, zeta >= 0.
Momentum initial_momentum(double c);

/// Reduced period on the level C, by quadrature.
double t_geod_quadrature(double c, double tol = kDefaultTol);

/// Reduced period on the level C, by integrating the Euler equations from
/// initial_momentum(C) until the first return to theta = -pi/4 (mod 2 pi).
double t_geod_ode(double c, double tol = kDefaultTol);

/// Reduced period; quadrature value checked against the ODE return time.
/// Throws QuadratureMismatch when the two differ by more than 10 tol
/// (relative), OutOfRange for C <= -1, Divergence at the separatrix C = 1.
double t_geod(double c, double tol = kDefaultTol, bool cross_check = true);

/// Minimum-norm Newton projection of p onto {g* = g0, Cas = c0}.
Momentum project_to_level(const Momentum& p, double g0, double c0);

/// Flow of euler_field, projected back to the initial level after each step.
Momentum integrate_momentum(const Momentum& p0, double t, double tol = kDefaultTol);

}  // namespace srgeo
