#pragma once

// Casimir and geodesic flows on PSL2(R) x sl2*, the rotation number of the
// geodesic flow on the invariant tori, and related diagnostics.
//
// Flows act on the group by left multiplication: the geodesic flow solves
// g' = (xi X + eta Y) g and the Casimir flow is g -> exp(t A(p)) g. With this
// pairing the two flows commute.

#include <string_view>
#include <vector>

#include "srgeo/euler.hpp"

namespace srgeo {

struct PhaseState {
  Psl2 g;
  Momentum p;
};

/// Which Casimir period a frequency was normalized by.
enum class PeriodNormalization {
  Hyperbolic,   ///< log(lambda) / sqrt(2C), C > 0.
  Psl2Minimal,  ///< pi / sqrt(-2C), the first return of the elliptic subgroup in PSL2.
};

std::string_view to_string(PeriodNormalization n);

struct FrequencyPoint {
  double c = 0.0;
  double omega_mod1 = 0.0;
  double omega_lift = 0.0;
  double t_cas = 0.0;
  double t_geod = 0.0;
  double holonomy_residual = 0.0;
  double momentum_return = 0.0;  ///< |p(T) - p0| after one reduced period.
  PeriodNormalization normalization = PeriodNormalization::Hyperbolic;
};

PhaseState casimir_flow(const PhaseState& s, double t);

/// Casimir period: log(lambda)/sqrt(2C) for C > 0, 2 pi/sqrt(-2C) for C < 0.
/// Throws NoPeriodicOrbit at C = 0.
double t_cas(double c, double lambda = 0.0);

/// Period of the Casimir flow as used for rotation numbers: equal to t_cas for
/// C > 0, and to the minimal PSL2 return pi/sqrt(-2C) for C < 0.
double t_cas_class(double c, double lambda);

struct CasimirReturn {
  double measured = 0.0;    ///< numerically detected minimal return time
  double formula = 0.0;     ///< t_cas(C, lambda)
  bool half_of_formula = false;  ///< measured equals formula / 2
};

/// First return of the one-parameter subgroup exp(t u). Hyperbolic u: first
/// t with |tr exp(t u)| = lambda + 1/lambda. Elliptic u: first t > 0 with
/// exp(t u) = +-Id (lambda is ignored).
double subgroup_return_time(const Algebra& u, double lambda, double tol = kDefaultTol);

/// Detects the first return of the Casimir flow started from initial_momentum(C).
/// C > 0: first t with |tr exp(t A)| = lambda + 1/lambda (conjugate to the
/// class element). C < 0: first t > 0 with exp(t A) = +-Id.
CasimirReturn casimir_return_time(double c, double lambda, double tol = kDefaultTol);

/// g' = (xi X + eta Y) g coupled with the Euler equations. Requires g* = 1.
/// Throws InvariantDrift if Cas or g* move by more than 10 tol.
PhaseState geodesic_flow(const PhaseState& s, double t, double tol = kDefaultTol);

/// Raw SL2 matrix of the group part after time t from (g0, p0), together with
/// the momentum. Optionally records the momentum after every accepted step.
struct RawFlow {
  Mat2 g;
  Momentum p;
};
RawFlow geodesic_flow_raw(const Mat2& g0, const Momentum& p0, double t, double tol,
                          std::vector<std::pair<double, Momentum>>* samples = nullptr);

FrequencyPoint rotation_number(double c, double lambda, double tol = kDefaultTol);

/// Same as rotation_number, but started from an arbitrary p0 on the unit
/// co-sphere; the Casimir level is casimir(p0).
FrequencyPoint rotation_number_from(const Momentum& p0, double lambda,
                                    double tol = kDefaultTol);

struct ScanOptions {
  double tol = 1e-11;
  unsigned jobs = 1;
  int max_refine = 12;
};

/// Rotation numbers along a sorted grid inside one torus regime, with a
/// continuous lift. Hyperbolic regimes use the continuous holonomy parameter,
/// which tends to 0 at both the C -> infinity and C -> 0+ ends; the elliptic
/// regime is anchored so that the node nearest C = 0 lies in (-1/2, 1/2].
std::vector<FrequencyPoint> omega_lift_scan(const std::vector<double>& c_grid,
                                            double lambda, const ScanOptions& opt = {});

/// Unwraps fractional values along a sequence; consecutive wrapped
/// differences must stay below 1/2. Exposed for testing.
std::vector<double> unwrap_mod1(const std::vector<double>& frac);

/// |cos alpha| = |xi eta| / sqrt(1 + zeta^2 / 4).
double cos_alpha(const Momentum& p);

double commutator_defect(const PhaseState& s, double t, double u, double tol = kDefaultTol);

/// Sup-norm distance of phase states, PSL2 sign ignored. The group part is
/// measured relative to max(1, largest matrix entry).
double phase_distance(const PhaseState& a, const PhaseState& b);

}  // namespace srgeo
