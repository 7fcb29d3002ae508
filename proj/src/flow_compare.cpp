#include "srgeo/flow_compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "srgeo/ode.hpp"
#include "srgeo/parallel.hpp"

namespace srgeo {

namespace {

ode::StepControl control(double tol) {
  ode::StepControl ctl;
  ctl.rtol = tol;
  ctl.atol = tol;
  return ctl;
}

double smallest_singular_of_inverse(const MatX& inv) {
  const Eigen::JacobiSVD<MatX> svd(inv);
  const double largest = svd.singularValues()(0);
  return largest > 0.0 ? 1.0 / largest : std::numeric_limits<double>::infinity();
}

Eigen::Matrix2d rotation_exp(const Eigen::Matrix2d& k, double tau) {
  // exp(tau K) for a 2x2 K via the traceless part.
  const double tr = 0.5 * k.trace();
  const Eigen::Matrix2d n = k - tr * Eigen::Matrix2d::Identity();
  const double d = -n.determinant();  // n^2 = d Id
  double c, s;
  if (d > 0.0) {
    const double r = std::sqrt(d);
    c = std::cosh(tau * r);
    s = std::sinh(tau * r) / r;
  } else if (d < 0.0) {
    const double r = std::sqrt(-d);
    c = std::cos(tau * r);
    s = std::sin(tau * r) / r;
  } else {
    c = 1.0;
    s = tau;
  }
  return std::exp(tau * tr) * (c * Eigen::Matrix2d::Identity() + s * n);
}

}  // namespace

MatX inverse_differential(const FlowPair& fp, const VecX& x, double t, double tol) {
  if (fp.base_inverse_differential) return fp.base_inverse_differential(x, t);
  require(bool(fp.base_jacobian) && bool(fp.base_field), ErrorCode::PreconditionViolated,
          "variational integration needs the field and its Jacobian");
  const int n = fp.dim;
  VecX y(n + n * n);
  y.head(n) = x;
  Eigen::Map<MatX>(y.data() + n, n, n).setIdentity();
  auto rhs = [&](double, const VecX& s) {
    VecX out(s.size());
    const VecX xs = s.head(n);
    out.head(n) = fp.base_field(xs);
    const Eigen::Map<const MatX> m(s.data() + n, n, n);
    Eigen::Map<MatX>(out.data() + n, n, n) = fp.base_jacobian(xs) * m;
    return out;
  };
  const VecX yt = ode::integrate(rhs, y, 0.0, t, control(tol));
  const Eigen::Map<const MatX> m(yt.data() + n, n, n);
  return m.inverse();
}

VecX perturbed_flow(const FlowPair& fp, const VecX& x0, double t, double tol) {
  auto rhs = [&](double, const VecX& x) -> VecX {
    return fp.base_field(x) + fp.perturbation(x);
  };
  return ode::integrate(rhs, x0, 0.0, t, control(tol));
}

ConjugatorResult conjugator_ode(const FlowPair& fp, const VecX& x0, double t, double tol) {
  require(fp.dim == x0.size() && bool(fp.base_flow) && bool(fp.perturbation),
          ErrorCode::PreconditionViolated, "incomplete flow pair");
  ConjugatorResult res;
  res.min_singular = std::numeric_limits<double>::infinity();
  auto velocity = [&](double s, const VecX& w) -> VecX {
    const MatX inv = inverse_differential(fp, w, s, tol);
    const double sv = smallest_singular_of_inverse(inv);
    res.min_singular = std::min(res.min_singular, sv);
    if (sv < 1e-12) {
      throw Error(ErrorCode::SingularDifferential,
                  "smallest singular value " + num_str(sv) + " at t = " +
                      num_str(s));
    }
    return inv * fp.perturbation(fp.base_flow(w, s));
  };
  res.sup_rate = velocity(0.0, x0).norm();
  auto observe = [&](double s, const VecX& w) {
    res.sup_displacement = std::max(res.sup_displacement, (w - x0).norm());
    res.sup_rate = std::max(res.sup_rate, velocity(s, w).norm());
    return true;
  };
  res.w = ode::integrate(velocity, x0, 0.0, t, control(tol), ode::NoPostStep{}, observe);
  res.phi_conjugated = fp.base_flow(res.w, t);
  res.phi_direct = perturbed_flow(fp, x0, t, tol);
  res.conjugation_error = (res.phi_direct - res.phi_conjugated).norm();
  return res;
}

// ---------------------------------------------------------------------------
// Model flow

G0Result model_flow_g0(const VecX& x, double t, const ModelFlow& model) {
  require(x.size() == 5 && x(4) > 0.0, ErrorCode::PreconditionViolated,
          "model state is (phase, s1, s2, theta, I) with I > 0");
  const double i = x(4);
  const double tau = 0.5 * i * t;
  const Eigen::Matrix2d e = rotation_exp(model.k, tau);
  const Eigen::Vector2d s = x.segment<2>(1);
  const Eigen::Vector2d ks = model.k * s;

  G0Result r;
  r.state.resize(5);
  r.state << x(0) + tau, e * s, x(3) + t / i, i;

  r.differential = MatX::Identity(5, 5);
  r.differential.block<2, 2>(1, 1) = e;
  r.differential(0, 4) = 0.5 * t;
  r.differential.block<2, 1>(1, 4) = 0.5 * t * (e * ks);
  r.differential(3, 4) = -t / (i * i);

  r.inverse = MatX::Identity(5, 5);
  r.inverse.block<2, 2>(1, 1) = rotation_exp(model.k, -tau);
  r.inverse(0, 4) = -0.5 * t;
  r.inverse.block<2, 1>(1, 4) = -0.5 * t * ks;
  r.inverse(3, 4) = t / (i * i);

  r.reeb_inverse = r.inverse;
  r.reeb_inverse(3, 4) = 0.0;
  return r;
}

G0Result model_flow_g0(double phase, double theta, double i, double t, const ModelFlow& model) {
  VecX x(5);
  x << phase, 0.0, 0.0, theta, i;
  return model_flow_g0(x, t, model);
}

VecX model_field(const VecX& x, const ModelFlow& model) {
  const double i = x(4);
  VecX v(5);
  v << 0.5 * i, 0.5 * i * (model.k * x.segment<2>(1)), 1.0 / i, 0.0;
  return v;
}

FlowPair model_flow_pair(int m, const ModelFlow& model) {
  FlowPair fp;
  fp.dim = 5;
  fp.base_field = [model](const VecX& x) { return model_field(x, model); };
  fp.base_flow = [model](const VecX& x, double t) { return model_flow_g0(x, t, model).state; };
  fp.base_inverse_differential = [model](const VecX& x, double t) {
    return model_flow_g0(x, t, model).inverse;
  };
  fp.base_jacobian = [model](const VecX& x) {
    MatX j = MatX::Zero(5, 5);
    const double i = x(4);
    j(0, 4) = 0.5;
    j.block<2, 2>(1, 1) = 0.5 * i * model.k;
    j.block<2, 1>(1, 4) = 0.5 * (model.k * x.segment<2>(1));
    j(3, 4) = -1.0 / (i * i);
    return j;
  };
  fp.perturbation = [m](const VecX& x) {
    VecX r = VecX::Zero(5);
    r(4) = std::pow(x(4), m);
    return r;
  };
  return fp;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::PreconditionViolated,
          "slope fit needs two points");
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ClosenessReport closeness_report(const std::function<FlowPair(int)>& make_pair,
                                 const std::vector<double>& i0_grid, int m, double tol,
                                 unsigned jobs) {
  require(i0_grid.size() >= 2, ErrorCode::PreconditionViolated, "need at least two I0 values");
  for (double i0 : i0_grid) {
    require(i0 > 0.0, ErrorCode::PreconditionViolated, "I0 must be positive");
  }
  ClosenessReport rep;
  rep.m = m;
  rep.expected_exponent = m - 3;
  rep.rows = parallel_map<ClosenessRow>(i0_grid.size(), jobs, [&](std::size_t idx) {
    const FlowPair fp = make_pair(m);
    ClosenessRow row;
    row.i0 = i0_grid[idx];
    row.horizon = 1.0 / row.i0;
    VecX x0(5);
    x0 << 0.0, 1.0, 0.0, 0.0, row.i0;
    auto rhs = [&](double, const VecX& x) -> VecX {
      return fp.base_field(x) + fp.perturbation(x);
    };
    auto observe = [&](double t, const VecX& x) {
      row.sup_distance = std::max(row.sup_distance, (x - fp.base_flow(x0, t)).norm());
      return true;
    };
    ode::integrate(rhs, x0, 0.0, row.horizon, control(tol), ode::NoPostStep{}, observe);
    const ConjugatorResult c = conjugator_ode(fp, x0, row.horizon, tol);
    row.sup_displacement = c.sup_displacement;
    row.sup_rate = c.sup_rate;
    row.conjugation_error = c.conjugation_error;
    return row;
  });
  std::vector<double> xs, ds, rs;
  for (const auto& r : rep.rows) {
    xs.push_back(r.i0);
    ds.push_back(r.sup_distance);
    rs.push_back(r.sup_rate);
  }
  rep.distance_exponent = loglog_slope(xs, ds);
  rep.rate_exponent = loglog_slope(xs, rs);
  return rep;
}

}  // namespace srgeo
