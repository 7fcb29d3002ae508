#pragma once

// Annulus maps: twist-map verification, a constructive fixed-point finder for
// twist maps, and Newton continuation of invariant graphs over circles and
// cylinders.

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "srgeo/error.hpp"

namespace srgeo {

using Vec2 = Eigen::Vector2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Map of the strip R x [a, b] covering the annulus (R/Z) x [a, b]. `map`
/// returns the lifted image (X, Y); `lift_offset` is added to X.
struct TwistMap {
  std::function<Vec2(double x, double y)> map;
  double a = 0.0;
  double b = 1.0;
  int lift_offset = 0;

  Vec2 operator()(double x, double y) const {
    Vec2 r = map(x, y);
    r(0) += lift_offset;
    return r;
  }
};

struct TwistReport {
  bool pass = false;
  bool twist_ok = false;
  bool area_ok = false;
  bool boundary_ok = false;
  double min_twist = 0.0;      ///< smallest dX/dy on the grid
  double max_area_defect = 0.0;  ///< largest |det DF - 1|
  double worst_boundary = 0.0;   ///< largest violation of X(x,a) < x < X(x,b)
  std::string offender;
};

TwistReport check_twist(const TwistMap& m, int n_grid = 64);

/// Fixed points of a twist map: y(x) solves X(x, y) = x by bisection, sign
/// changes of Y(x, y(x)) - y(x) are polished by regula falsi. Grid nodes where
/// the map already fixes (x, y(x)) to tol are reported as well.
std::vector<Vec2> pb_fixed_point(const TwistMap& m, double tol = 1e-12, int n_grid = 2048);

/// Discretization of the base Y0 of an invariant graph.
struct GraphDomain {
  enum class Kind { Circle, Cylinder };
  Kind kind = Kind::Circle;
  int n_angle = 256;     ///< uniform nodes in the periodic direction
  double period = 2.0 * 3.14159265358979323846;
  int n_radial = 0;      ///< Chebyshev-Lobatto nodes (cylinder only)
  double radial_lo = 0.0;
  double radial_hi = 1.0;

  static GraphDomain circle(int n = 256, double period = 2.0 * 3.14159265358979323846);
  static GraphDomain cylinder(int n_angle, int n_radial, double lo, double hi,
                              double period = 2.0 * 3.14159265358979323846);

  int dim() const { return kind == Kind::Circle ? 1 : 2; }
  int size() const { return kind == Kind::Circle ? n_angle : n_angle * n_radial; }
  /// Coordinates of node i (angle first).
  VecX node(int i) const;
};

/// Graph z = f(y) over the domain nodes. values(i, :) is the normal vector at node i.
struct InvariantGraph {
  GraphDomain domain;
  MatX values;
  double residual = 0.0;
  std::vector<double> history;  ///< residual before each Newton step, then the final one

  static InvariantGraph zero(const GraphDomain& d, int normal_dim);

  /// Spectral interpolant of the graph and its derivative along the base.
  VecX evaluate(const VecX& y) const;
  MatX gradient(const VecX& y) const;  ///< normal_dim x domain_dim
  int normal_dim() const { return int(values.cols()); }
};

/// Family of maps F_eps(y, z) = (A_eps(y, z), B_eps(y, z)) near Y0 x {0}.
struct GraphFamily {
  int normal_dim = 1;
  struct Value {
    VecX a;    ///< new base point
    VecX b;    ///< new normal coordinate
    MatX a_z;  ///< dA/dz
    MatX b_z;  ///< dB/dz
  };
  std::function<Value(double eps, const VecX& y, const VecX& z)> eval;
};

/// sup over nodes of |B(y, f(y)) - f(A(y, f(y)))|.
double graph_residual(const GraphFamily& fam, double eps, const InvariantGraph& g);

struct NewtonOptions {
  double tol = 1e-12;
  int max_iter = 30;
  double gmres_tol = 1e-14;
  int gmres_restart = 60;
  int gmres_max_iter = 600;
};

/// Newton iteration for B(y, f(y)) = f(A(y, f(y))), preconditioned by
/// -(Id - B'_0(y))^-1. Throws DegenerateNormalDirection when B'_0 has an
/// eigenvalue within 1e-8 of 1 at some node, NewtonDivergence on failure.
InvariantGraph invariant_graph_newton(const GraphFamily& fam, double eps,
                                      const InvariantGraph& graph0,
                                      const NewtonOptions& opt = {});

/// Annulus map in (theta, J), theta 2 pi-periodic, with a perturbation scale
/// s in [0, 1]: at s = 0 the circle J = j_star is pointwise fixed, s = 1 is
/// the map of interest.
struct PerturbedCircleMap {
  int k = 1;
  double j_star = 0.0;
  std::function<Vec2(double s, double theta, double j)> map;
};

/// Invariant circle near c_k^0 = {J = j_star} as a graph J = j_star + f(theta).
InvariantGraph invariant_circle_ck(const PerturbedCircleMap& m, const NewtonOptions& opt = {},
                                   int n_nodes = 256);

/// True if the last three residual ratios look quadratic: each new residual
/// is at most a constant times the square of the previous one, or at the
/// tolerance floor.
bool quadratic_tail(const std::vector<double>& history, double floor);

}  // namespace srgeo
