#include "srgeo/annulus.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace srgeo {

namespace {

constexpr double kPi = std::numbers::pi;

// Periodic cardinal function on N uniform nodes (N even) and its derivative
// in u, where u is the angle difference scaled to period 2 pi.
void cardinal(int n, double u, double& s, double& ds) {
  const double half = 0.5 * u;
  const double sh = std::sin(half);
  if (std::abs(sh) < 1e-13) {
    s = 1.0;
    ds = 0.0;
    return;
  }
  const double ch = std::cos(half);
  const double sn = std::sin(0.5 * n * u);
  const double cn = std::cos(0.5 * n * u);
  s = sn * ch / (n * sh);
  ds = (0.5 * n * cn * ch / sh - 0.5 * sn / (sh * sh)) / n;
}

struct Weights {
  VecX angle, d_angle;
  VecX radial, d_radial;
};

double radial_node(const GraphDomain& d, int l) {
  const double t = 0.5 * (1.0 - std::cos(kPi * l / (d.n_radial - 1)));
  return d.radial_lo + (d.radial_hi - d.radial_lo) * t;
}

double radial_bary(int l, int m) {
  double w = (l % 2 == 0) ? 1.0 : -1.0;
  if (l == 0 || l == m - 1) w *= 0.5;
  return w;
}

Weights weights_at(const GraphDomain& d, const VecX& y) {
  Weights w;
  const int n = d.n_angle;
  w.angle.resize(n);
  w.d_angle.resize(n);
  const double scale = 2.0 * kPi / d.period;
  for (int j = 0; j < n; ++j) {
    const double u = scale * (y(0) - j * d.period / n);
    double s, ds;
    cardinal(n, u, s, ds);
    w.angle(j) = s;
    w.d_angle(j) = ds * scale;
  }
  if (d.kind == GraphDomain::Kind::Cylinder) {
    const int m = d.n_radial;
    w.radial = VecX::Zero(m);
    w.d_radial = VecX::Zero(m);
    const double x = y(1);
    int hit = -1;
    for (int l = 0; l < m; ++l) {
      if (x == radial_node(d, l)) hit = l;
    }
    if (hit >= 0) {
      w.radial(hit) = 1.0;
      const double wi = radial_bary(hit, m);
      const double xi = radial_node(d, hit);
      double diag = 0.0;
      for (int l = 0; l < m; ++l) {
        if (l == hit) continue;
        const double dij = (radial_bary(l, m) / wi) / (xi - radial_node(d, l));
        w.d_radial(l) = dij;
        diag -= dij;
      }
      w.d_radial(hit) = diag;
    } else {
      VecX c(m);
      double s = 0.0, sp = 0.0;
      for (int l = 0; l < m; ++l) {
        const double dx = x - radial_node(d, l);
        c(l) = radial_bary(l, m) / dx;
        s += c(l);
        sp -= c(l) / dx;
      }
      for (int l = 0; l < m; ++l) {
        const double dx = x - radial_node(d, l);
        w.radial(l) = c(l) / s;
        w.d_radial(l) = (-c(l) / dx * s - c(l) * sp) / (s * s);
      }
    }
  }
  return w;
}

// Interpolated value (and gradient) of node data `v` (nodes x dim) at weights w.
VecX apply_weights(const GraphDomain& d, const Weights& w, const MatX& v) {
  if (d.kind == GraphDomain::Kind::Circle) return v.transpose() * w.angle;
  const int m = d.n_radial;
  VecX out = VecX::Zero(v.cols());
  for (int ia = 0; ia < d.n_angle; ++ia) {
    if (w.angle(ia) == 0.0) continue;
    for (int ir = 0; ir < m; ++ir) {
      out += (w.angle(ia) * w.radial(ir)) * v.row(ia * m + ir).transpose();
    }
  }
  return out;
}

MatX apply_gradient(const GraphDomain& d, const Weights& w, const MatX& v) {
  MatX g(v.cols(), d.dim());
  if (d.kind == GraphDomain::Kind::Circle) {
    g.col(0) = v.transpose() * w.d_angle;
    return g;
  }
  g.setZero();
  const int m = d.n_radial;
  for (int ia = 0; ia < d.n_angle; ++ia) {
    for (int ir = 0; ir < m; ++ir) {
      const auto row = v.row(ia * m + ir).transpose();
      g.col(0) += (w.d_angle(ia) * w.radial(ir)) * row;
      g.col(1) += (w.angle(ia) * w.d_radial(ir)) * row;
    }
  }
  return g;
}

// Restarted GMRES with right preconditioning.
template <typename Op, typename Prec>
VecX gmres(const Op& a, const Prec& m, const VecX& b, double tol, int restart, int max_iter) {
  const Eigen::Index n = b.size();
  VecX x = VecX::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) return x;
  int total = 0;
  while (total < max_iter) {
    const VecX r = b - a(x);
    double beta = r.norm();
    if (beta <= tol * bnorm) break;
    MatX v(n, restart + 1);
    MatX h = MatX::Zero(restart + 1, restart);
    VecX cs = VecX::Zero(restart), sn = VecX::Zero(restart);
    VecX g = VecX::Zero(restart + 1);
    g(0) = beta;
    v.col(0) = r / beta;
    int k = 0;
    for (; k < restart && total < max_iter; ++k, ++total) {
      VecX w = a(m(v.col(k)));
      for (int i = 0; i <= k; ++i) {
        h(i, k) = w.dot(v.col(i));
        w -= h(i, k) * v.col(i);
      }
      h(k + 1, k) = w.norm();
      if (h(k + 1, k) > 0.0) v.col(k + 1) = w / h(k + 1, k);
      for (int i = 0; i < k; ++i) {
        const double t = cs(i) * h(i, k) + sn(i) * h(i + 1, k);
        h(i + 1, k) = -sn(i) * h(i, k) + cs(i) * h(i + 1, k);
        h(i, k) = t;
      }
      const double den = std::hypot(h(k, k), h(k + 1, k));
      cs(k) = h(k, k) / den;
      sn(k) = h(k + 1, k) / den;
      h(k, k) = den;
      h(k + 1, k) = 0.0;
      g(k + 1) = -sn(k) * g(k);
      g(k) *= cs(k);
      if (std::abs(g(k + 1)) <= tol * bnorm) {
        ++k;
        ++total;
        break;
      }
    }
    VecX yk(k);
    for (int i = k - 1; i >= 0; --i) {
      double acc = g(i);
      for (int j = i + 1; j < k; ++j) acc -= h(i, j) * yk(j);
      yk(i) = acc / h(i, i);
    }
    x += m(VecX(v.leftCols(k) * yk));
    if (std::abs(g(k)) <= tol * bnorm) break;
  }
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// Twist maps

TwistReport check_twist(const TwistMap& m, int n_grid) {
  TwistReport rep;
  rep.min_twist = std::numeric_limits<double>::infinity();
  const double hx = 1e-5;
  const double hy = 1e-5 * std::max(1e-3, m.b - m.a);
  for (int i = 0; i < n_grid; ++i) {
    const double x = double(i) / n_grid;
    for (int j = 0; j < n_grid; ++j) {
      const double y = m.a + (m.b - m.a) * j / (n_grid - 1);
      const Vec2 fxp = m(x + hx, y), fxm = m(x - hx, y);
      const Vec2 fyp = m(x, y + hy), fym = m(x, y - hy);
      const Vec2 dx = (fxp - fxm) / (2 * hx);
      const Vec2 dy = (fyp - fym) / (2 * hy);
      if (dy(0) < rep.min_twist) {
        rep.min_twist = dy(0);
        if (dy(0) <= 0.0) {
          rep.offender = "twist dX/dy = " + num_str(dy(0)) + " at (" +
                         num_str(x) + ", " + num_str(y) + ")";
        }
      }
      const double defect = std::abs(dx(0) * dy(1) - dy(0) * dx(1) - 1.0);
      if (defect > rep.max_area_defect) {
        rep.max_area_defect = defect;
        if (defect > 1e-8 && rep.offender.empty()) {
          rep.offender = "area defect " + num_str(defect) + " at (" +
                         num_str(x) + ", " + num_str(y) + ")";
        }
      }
    }
    const double lo = m(x, m.a)(0) - x;
    const double hi = x - m(x, m.b)(0);
    const double viol = std::max(lo, hi);
    if (i == 0 || viol > rep.worst_boundary) rep.worst_boundary = viol;
  }
  rep.twist_ok = rep.min_twist > 0.0;
  rep.area_ok = rep.max_area_defect <= 1e-8;
  rep.boundary_ok = rep.worst_boundary < 0.0;
  if (!rep.boundary_ok && rep.offender.empty()) {
    rep.offender = "boundary drift violated by " + num_str(rep.worst_boundary);
  }
  rep.pass = rep.twist_ok && rep.area_ok && rep.boundary_ok;
  return rep;
}

std::vector<Vec2> pb_fixed_point(const TwistMap& m, double tol, int n_grid) {
  const TwistReport rep = check_twist(m, 32);
  require(rep.pass, ErrorCode::PreconditionViolated, "not a twist map: " + rep.offender);

  // y(x): the unique solution of X(x, y) = x.
  auto y_of = [&](double x) {
    double lo = m.a, hi = m.b;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (m(x, mid)(0) - x < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto g_of = [&](double x) {
    const double y = y_of(x);
    return m(x, y)(1) - y;
  };
  auto residual = [&](double x, double y) {
    const Vec2 f = m(x, y);
    return std::max(std::abs(f(0) - x), std::abs(f(1) - y));
  };

  std::vector<double> g(n_grid + 1);
  for (int i = 0; i <= n_grid; ++i) g[i] = g_of(double(i) / n_grid);

  std::vector<Vec2> out;
  auto add = [&](double x) {
    x -= std::floor(x);
    if (x >= 1.0) x -= 1.0;
    const double y = y_of(x);
    if (residual(x, y) > tol) return;
    for (const Vec2& p : out) {
      const double dx = std::abs(p(0) - x);
      if (std::min(dx, 1.0 - dx) < 1e-9) return;
    }
    out.emplace_back(x, y);
  };
  const double zero_band = 0.1 * tol;
  for (int i = 0; i < n_grid; ++i) {
    const double xa = double(i) / n_grid;
    if (std::abs(g[i]) <= zero_band) {
      add(xa);
      continue;
    }
    if (std::abs(g[i + 1]) <= zero_band || g[i] * g[i + 1] > 0.0) continue;
    double a = xa, b = double(i + 1) / n_grid;
    double fa = g[i], fb = g[i + 1];
    int side = 0;
    double x = a;
    for (int it = 0; it < 200; ++it) {
      x = (a * fb - b * fa) / (fb - fa);
      const double fx = g_of(x);
      if (std::abs(fx) <= zero_band || b - a < 1e-16) break;
      if ((fx < 0.0) == (fa < 0.0)) {
        a = x;
        fa = fx;
        if (side == 1) fb *= 0.5;
        side = 1;
      } else {
        b = x;
        fb = fx;
        if (side == -1) fa *= 0.5;
        side = -1;
      }
    }
    add(x);
  }
  if (out.empty()) {
    const auto [mn, mx] = std::minmax_element(g.begin(), g.end());
    throw Error(ErrorCode::NoSignChange, "Y(x, y(x)) - y(x) ranges over [" +
                                             num_str(*mn) + ", " +
                                             num_str(*mx) + "] without a zero");
  }
  std::sort(out.begin(), out.end(), [](const Vec2& p, const Vec2& q) { return p(0) < q(0); });
  return out;
}

// ---------------------------------------------------------------------------
// Invariant graphs

GraphDomain GraphDomain::circle(int n, double period) {
  require(n >= 4 && n % 2 == 0, ErrorCode::PreconditionViolated,
          "circle domain needs an even node count");
  GraphDomain d;
  d.kind = Kind::Circle;
  d.n_angle = n;
  d.period = period;
  return d;
}

GraphDomain GraphDomain::cylinder(int n_angle, int n_radial, double lo, double hi,
                                  double period) {
  require(n_angle >= 4 && n_angle % 2 == 0 && n_radial >= 2 && lo < hi,
          ErrorCode::PreconditionViolated, "invalid cylinder domain");
  GraphDomain d;
  d.kind = Kind::Cylinder;
  d.n_angle = n_angle;
  d.n_radial = n_radial;
  d.radial_lo = lo;
  d.radial_hi = hi;
  d.period = period;
  return d;
}

VecX GraphDomain::node(int i) const {
  if (kind == Kind::Circle) return VecX::Constant(1, i * period / n_angle);
  VecX y(2);
  y << (i / n_radial) * period / n_angle, radial_node(*this, i % n_radial);
  return y;
}

InvariantGraph InvariantGraph::zero(const GraphDomain& d, int normal_dim) {
  InvariantGraph g;
  g.domain = d;
  g.values = MatX::Zero(d.size(), normal_dim);
  return g;
}

VecX InvariantGraph::evaluate(const VecX& y) const {
  return apply_weights(domain, weights_at(domain, y), values);
}

MatX InvariantGraph::gradient(const VecX& y) const {
  return apply_gradient(domain, weights_at(domain, y), values);
}

double graph_residual(const GraphFamily& fam, double eps, const InvariantGraph& g) {
  double r = 0.0;
  for (int i = 0; i < g.domain.size(); ++i) {
    const VecX y = g.domain.node(i);
    const GraphFamily::Value v = fam.eval(eps, y, g.values.row(i).transpose());
    r = std::max(r, (v.b - g.evaluate(v.a)).cwiseAbs().maxCoeff());
  }
  return r;
}

InvariantGraph invariant_graph_newton(const GraphFamily& fam, double eps,
                                      const InvariantGraph& graph0, const NewtonOptions& opt) {
  const GraphDomain& dom = graph0.domain;
  const int n = dom.size();
  const int d = fam.normal_dim;
  require(graph0.normal_dim() == d && graph0.values.rows() == n,
          ErrorCode::PreconditionViolated, "initial graph does not match the family");

  InvariantGraph g = graph0;
  g.history.clear();
  g.residual = graph_residual(fam, eps, g);
  if (g.residual <= opt.tol) {
    g.history.push_back(g.residual);
    return g;
  }

  // Hypothesis at eps = 0: Y0 pointwise fixed with no unit normal multiplier.
  std::vector<MatX> precond(n);
  for (int i = 0; i < n; ++i) {
    const VecX y = dom.node(i);
    const GraphFamily::Value v0 = fam.eval(0.0, y, VecX::Zero(d));
    const Eigen::EigenSolver<MatX> es(v0.b_z);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      if (std::abs(es.eigenvalues()(k) - std::complex<double>(1.0, 0.0)) < 1e-8) {
        throw Error(ErrorCode::DegenerateNormalDirection,
                    "normal multiplier 1 at node " + num_str(i));
      }
    }
    precond[i] = -(MatX::Identity(d, d) - v0.b_z).inverse();
  }

  const double r0 = g.residual;
  for (int iter = 0; iter <= opt.max_iter; ++iter) {
    std::vector<GraphFamily::Value> vals(n);
    std::vector<Weights> w(n);
    VecX rhs(n * d);
    double r = 0.0;
    for (int i = 0; i < n; ++i) {
      vals[i] = fam.eval(eps, dom.node(i), g.values.row(i).transpose());
      w[i] = weights_at(dom, vals[i].a);
      const VecX gi = vals[i].b - apply_weights(dom, w[i], g.values);
      rhs.segment(i * d, d) = -gi;
      r = std::max(r, gi.cwiseAbs().maxCoeff());
    }
    g.history.push_back(r);
    g.residual = r;
    if (r <= opt.tol) return g;
    if (!std::isfinite(r) || r > 1e8 * std::max(r0, 1e-300) || iter == opt.max_iter) break;

    std::vector<MatX> local(n);
    for (int i = 0; i < n; ++i) {
      const MatX grad = apply_gradient(dom, w[i], g.values);
      local[i] = vals[i].b_z - grad * vals[i].a_z;
    }
    auto apply_j = [&](const VecX& x) {
      const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                           Eigen::RowMajor>>
          xv(x.data(), n, d);
      const MatX xm = xv;
      VecX out(n * d);
      for (int i = 0; i < n; ++i) {
        out.segment(i * d, d) =
            local[i] * xm.row(i).transpose() - apply_weights(dom, w[i], xm);
      }
      return out;
    };
    auto apply_m = [&](const VecX& x) {
      VecX out(n * d);
      for (int i = 0; i < n; ++i) out.segment(i * d, d) = precond[i] * x.segment(i * d, d);
      return out;
    };
    const VecX delta = gmres(apply_j, apply_m, rhs, opt.gmres_tol, opt.gmres_restart,
                             opt.gmres_max_iter);
    for (int i = 0; i < n; ++i) g.values.row(i) += delta.segment(i * d, d).transpose();
  }
  throw Error(ErrorCode::NewtonDivergence,
              "invariant graph Newton stalled at residual " + num_str(g.residual));
}

InvariantGraph invariant_circle_ck(const PerturbedCircleMap& m, const NewtonOptions& opt,
                                   int n_nodes) {
  GraphFamily fam;
  fam.normal_dim = 1;
  const double j_star = m.j_star;
  const auto map = m.map;
  fam.eval = [j_star, map](double s, const VecX& y, const VecX& z) {
    const double h = 1e-6;
    const double theta = y(0);
    const double j = j_star + z(0);
    const Vec2 f = map(s, theta, j);
    const Vec2 fp = map(s, theta, j + h);
    const Vec2 fm = map(s, theta, j - h);
    GraphFamily::Value v;
    v.a = VecX::Constant(1, f(0));
    v.b = VecX::Constant(1, f(1) - j_star);
    v.a_z = MatX::Constant(1, 1, (fp(0) - fm(0)) / (2 * h));
    v.b_z = MatX::Constant(1, 1, (fp(1) - fm(1)) / (2 * h));
    return v;
  };
  return invariant_graph_newton(fam, 1.0, InvariantGraph::zero(GraphDomain::circle(n_nodes), 1),
                                opt);
}

bool quadratic_tail(const std::vector<double>& h, double floor) {
  if (h.size() < 2) return false;
  const std::size_t first = h.size() >= 4 ? h.size() - 4 : 0;
  for (std::size_t k = first; k + 1 < h.size(); ++k) {
    if (h[k] <= floor) continue;
    if (h[k + 1] > std::max(floor, 100.0 * h[k] * h[k])) return false;
  }
  return true;
}

}  // namespace srgeo
