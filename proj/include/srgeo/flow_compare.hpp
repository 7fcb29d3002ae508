#pragma once

// Comparing a flow phi of V0 + R with the flow phi0 of V0 through the
// conjugator w(t, x), defined by phi_t(x) = phi0_t(w(t, x)) and
//   dw/dt = (D phi0_t(w))^-1 R(phi0_t(w)),  w(0, x) = x.

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "srgeo/error.hpp"

namespace srgeo {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

struct FlowPair {
  int dim = 0;
  std::function<VecX(const VecX&)> base_field;              ///< V0
  std::function<VecX(const VecX&, double)> base_flow;       ///< phi0_t(x)
  /// (D phi0_t(x))^-1 in closed form. When empty, the differential is obtained
  /// from the variational equation, which needs base_jacobian.
  std::function<MatX(const VecX&, double)> base_inverse_differential;
  std::function<MatX(const VecX&)> base_jacobian;           ///< D V0
  std::function<VecX(const VecX&)> perturbation;            ///< R
};

/// Inverse differential of phi0_t at x, from the closed form if present.
MatX inverse_differential(const FlowPair& fp, const VecX& x, double t, double tol = 1e-12);

struct ConjugatorResult {
  VecX w;
  VecX phi_direct;      ///< phi_t(x0) from integrating V0 + R
  VecX phi_conjugated;  ///< phi0_t(w)
  double conjugation_error = 0.0;  ///< |phi_direct - phi_conjugated|
  double min_singular = 0.0;       ///< smallest singular value of D phi0 seen
  double sup_displacement = 0.0;   ///< sup_s |w(s) - x0|
  double sup_rate = 0.0;           ///< sup_s |dw/ds|
};

/// Integrates the conjugator ODE on [0, t]. Throws SingularDifferential when
/// D phi0 has a singular value below 1e-12 along the way.
ConjugatorResult conjugator_ode(const FlowPair& fp, const VecX& x0, double t, double tol = 1e-12);

/// Integrates V0 + R directly.
VecX perturbed_flow(const FlowPair& fp, const VecX& x0, double t, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Model flow near a closed Reeb orbit. State x = (phase, s1, s2, theta, I):
// the Reeb factor is a phase with transverse coordinates s evolved by
// exp(tau K), and
//   G0_t(x) = (phase + I t / 2, exp((I t / 2) K) s, theta + t / I, I).

struct ModelFlow {
  Eigen::Matrix2d k = (Eigen::Matrix2d() << 0.0, -1.0, 1.0, 0.0).finished();
};

struct G0Result {
  VecX state;
  MatX differential;
  MatX inverse;
  /// Inverse with the theta-I coupling t / I^2 removed: the inverse
  /// differential of (sigma, I) -> (R_{It/2}(sigma), I).
  MatX reeb_inverse;
};

G0Result model_flow_g0(const VecX& x, double t, const ModelFlow& model = {});
G0Result model_flow_g0(double phase, double theta, double i, double t,
                       const ModelFlow& model = {});

/// V0 of the model flow.
VecX model_field(const VecX& x, const ModelFlow& model = {});

/// The model flow with perturbation R = I^m e_I.
FlowPair model_flow_pair(int m, const ModelFlow& model = {});

struct ClosenessRow {
  double i0 = 0.0;
  double horizon = 0.0;
  double sup_distance = 0.0;      ///< sup_{t <= horizon} |phi_t(x0) - phi0_t(x0)|
  double sup_displacement = 0.0;  ///< sup |w - x0|
  double sup_rate = 0.0;          ///< sup |dw/dt|
  double conjugation_error = 0.0;
};

struct ClosenessReport {
  int m = 0;
  std::vector<ClosenessRow> rows;
  double distance_exponent = 0.0;  ///< log-log slope of sup_distance in I0
  double rate_exponent = 0.0;      ///< log-log slope of sup_rate in I0
  double expected_exponent = 0.0;  ///< m - 3
};

/// For each I0, starts at (0, 1, 0, 0, I0), integrates to t = 1 / I0 and
/// records the distances; fits the exponents over the grid.
ClosenessReport closeness_report(const std::function<FlowPair(int)>& make_pair,
                                 const std::vector<double>& i0_grid, int m, double tol = 1e-12,
                                 unsigned jobs = 1);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace srgeo
