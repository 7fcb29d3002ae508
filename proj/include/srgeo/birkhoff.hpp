#pragma once

// Normal-form model near a closed Reeb orbit of period T0:
//   F(rho, I) = rho I + sum_{j >= 2} kappa_j I^j rho^(2 - j),
// homogeneous of degree 2. On F = 1 the angle advances at rate dF/dI and the
// Reeb phase at rate (dF/drho) / 2, so one turn around the orbit takes
// T(I) = 2 T0 / (dF/drho) and closure after k turns of the angle reads
// T(I) dF/dI = 2 k pi.

#include <functional>
#include <vector>

#include "srgeo/annulus.hpp"

namespace srgeo {

struct ModelHamiltonian {
  double t0 = 1.0;
  std::vector<double> kappa;  ///< kappa[0] is kappa_2
  double validity_radius = 1.0;

  double value(double rho, double i) const;
  double d_rho(double rho, double i) const;
  double d_i(double rho, double i) const;
  double d_rho_rho(double rho, double i) const;
  double d_rho_i(double rho, double i) const;
  double d_i_i(double rho, double i) const;

  /// rho(I) on the level F = 1 (Newton from 1/I).
  double rho_on_level(double i) const;
  /// Return time T(I) = 2 T0 / F_rho.
  double return_time(double i) const;
  /// Angle advance over one return, T(I) F_I.
  double delta_theta(double i) const;
  /// Derivative of delta_theta in I.
  double delta_theta_prime(double i) const;
};

/// Smallest k whose initial guess sqrt(T0 / (k pi)) lies inside half the
/// validity radius. Always 1 for the integrable model.
int k0(const ModelHamiltonian& h);

/// I_k with delta_theta(I_k) = 2 k pi, by Newton from sqrt(T0 / (k pi)).
/// Converged when |delta_theta - 2 k pi| <= tol * 2 k pi.
double closure_solve(int k, const ModelHamiltonian& h, double tol = 1e-14);

/// l_k = T(I_k): on the unit co-sphere length equals time.
double length_of(int k, const ModelHamiltonian& h, double tol = 1e-14);

struct LengthExpansion {
  std::vector<int> k;
  std::vector<double> i_values;
  std::vector<double> lengths;
  std::vector<double> coefficients;  ///< a_j of l_k - 2 sqrt(pi k T0) ~ sum a_j k^(-j/2)
  std::vector<double> residuals;
  double max_residual = 0.0;
  double condition = 0.0;  ///< condition number of the normal equations
};

/// Least-squares fit of l_k - 2 sqrt(pi k T0), k in [k_min, k_max], in the
/// basis k^(-j/2), j < n_terms.
LengthExpansion expansion_fit(const ModelHamiltonian& h, int k_min, int k_max, int n_terms);

/// Same fit for given samples (k, y_k).
LengthExpansion expansion_fit_samples(const std::vector<int>& k, const std::vector<double>& y,
                                      int n_terms);

// ---------------------------------------------------------------------------
// Poincare section of the Reeb orbit.

struct ReebSectionModel {
  std::function<Vec2(const Vec2&)> pmap;
  Eigen::Matrix2d lin = Eigen::Matrix2d::Identity();
  std::function<double(const Vec2&)> rtime;

  /// pmap(0) = 0 and the finite-difference Jacobian at 0 matches lin to 1e-6.
  bool consistent() const;
  static ReebSectionModel linear(const Eigen::Matrix2d& l, double t0);
};

struct ModelState {
  Vec2 q = Vec2::Zero();
  double theta = 0.0;
  double i = 1.0;
};

/// 1 is not an eigenvalue of L: |det(L - Id)| > 1e-10.
bool check_nondegenerate(const Eigen::Matrix2d& l);

/// (Pi(q), theta + 2 T(q) / I^2 mod 2 pi, I).
ModelState poincare_map_p0(const ModelState& s, const ReebSectionModel& model);

/// Perturbation (dtheta, dJ) of the annulus map.
struct Perturbation {
  std::function<double(double theta, double j)> dtheta;
  std::function<double(double theta, double j)> dj;
};

/// Area-preserving kick of size eps: J' = J + eps sin(theta) followed by the
/// unperturbed twist, written as a perturbation of the shear.
Perturbation kick_perturbation(double eps, double t0);

/// S(theta, J) = (theta + 2 T0 J - 2 k pi + dtheta, J + dJ).
struct SMap {
  int k = 1;
  double t0 = 1.0;
  Perturbation pert;

  double j_star() const;
  /// Image with the perturbation scaled by s.
  Vec2 apply(double theta, double j, double s = 1.0) const;
  Vec2 operator()(double theta, double j) const { return apply(theta, j); }

  /// The map as a twist map of (R/Z) x [-w, w] in x = theta / 2 pi and
  /// y = J - j_star.
  TwistMap twist(double half_width) const;
  PerturbedCircleMap circle_family() const;
};

/// Builds the S-map after checking area preservation of the perturbed map on
/// a sample grid near J = k pi / T0 (NotAreaPreserving beyond 1e-10).
SMap s_map(int k, double t0, const Perturbation& pert);

}  // namespace srgeo
