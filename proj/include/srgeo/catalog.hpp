#pragma once

// Closed geodesics on the invariant tori: rational rotation numbers,
// closure verification, lengths and spiraling integers.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "srgeo/phase_flow.hpp"

namespace srgeo {

struct HyperbolicClass {
  double lambda = 0.0;

  explicit HyperbolicClass(double lam);
  double l_gamma() const { return std::log(lambda); }
};

/// Invariant torus label. `hclass` is empty for the identity class (C < 0).
struct TorusDescriptor {
  double c = 0.0;
  Regime regime;
  std::optional<HyperbolicClass> hclass;

  static TorusDescriptor make(double c, std::optional<HyperbolicClass> cls);
};

struct ClosedGeodesicRecord {
  TorusDescriptor torus;
  long p = 0;  ///< numerator of the lifted rotation number p / q
  long q = 1;
  double length = 0.0;
  long spiraling = 0;  ///< |winding|
  long winding = 0;    ///< signed degree of t -> (xi, eta)
  double closure_residual = 0.0;
  bool anomaly = false;  ///< measured spiraling differs from the expected value
  std::optional<double> measured_period;  ///< minimal measured return, if different
  std::string note;
};

struct RationalRoot {
  double c = 0.0;
  long p = 0;  ///< lifted numerator: omega_lift(c) = p / q
  long q = 1;
};

/// Graded grid on [lo, hi] inside one torus regime, denser toward the
/// critical values -1, 0, 1 where the lift is steep.
std::vector<double> regime_grid(double lo, double hi, std::size_t n = 400);

/// Roots of lift(C) = p/q + n for all integers n, bracketed on `grid` and
/// polished by bisection. Roots are sorted by C. `lift` must be continuous
/// and thread-safe.
std::vector<RationalRoot> find_rational_roots(const std::function<double(double)>& lift,
                                              const std::vector<double>& grid, long p,
                                              long q, double tol, unsigned jobs = 1);

struct CatalogOptions {
  double tol = 1e-9;           ///< root and closure tolerance
  double flow_tol = 1e-12;     ///< integrator tolerance
  unsigned jobs = 1;
  std::size_t grid_points = 400;
};

/// Roots of omega_lift(C) = p/q mod 1 on [c_lo, c_hi]. The class supplies
/// lambda for C > 0 and is ignored for C < 0.
std::vector<RationalRoot> find_rational_omega(const std::optional<HyperbolicClass>& cls,
                                              long p, long q, double c_lo, double c_hi,
                                              const CatalogOptions& opt = {});

/// Integrates q reduced periods and checks that the holonomy equals
/// exp(p t_cas A(p0)) up to sign. `antipodal` starts from -initial_momentum.
ClosedGeodesicRecord build_record(const RationalRoot& root,
                                  const std::optional<HyperbolicClass>& cls,
                                  const CatalogOptions& opt = {}, bool antipodal = false);

/// The C = 1 and C = -1 geodesics with frozen momentum.
std::pair<ClosedGeodesicRecord, ClosedGeodesicRecord> critical_geodesics(
    const HyperbolicClass& cls);

/// Signed winding of t -> (xi(t), eta(t)) over a closed sample path.
long spiraling_integer(const std::vector<Momentum>& samples, double closure_tol = 1e-6);

struct CatalogWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// Every record with q <= q_max on the given windows, sorted by (q, p, c).
std::vector<ClosedGeodesicRecord> build_catalog(double lambda, long q_max,
                                                const std::vector<CatalogWindow>& windows,
                                                const CatalogOptions& opt = {});

}  // namespace srgeo
