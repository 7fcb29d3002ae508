#include "srgeo/birkhoff.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace srgeo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  if (a >= 2.0 * kPi) a = 0.0;
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// ModelHamiltonian. kappa[n] multiplies I^j rho^(2-j) with j = n + 2.

double ModelHamiltonian::value(double rho, double i) const {
  double f = rho * i;
  for (std::size_t n = 0; n < kappa.size(); ++n) {
    const int j = int(n) + 2;
    f += kappa[n] * std::pow(i, j) * std::pow(rho, 2 - j);
  }
  return f;
}

double ModelHamiltonian::d_rho(double rho, double i) const {
  double f = i;
  for (std::size_t n = 0; n < kappa.size(); ++n) {
    const int j = int(n) + 2;
    f += kappa[n] * (2 - j) * std::pow(i, j) * std::pow(rho, 1 - j);
  }
  return f;
}

double ModelHamiltonian::d_i(double rho, double i) const {
  double f = rho;
  for (std::size_t n = 0; n < kappa.size(); ++n) {
    const int j = int(n) + 2;
    f += kappa[n] * j * std::pow(i, j - 1) * std::pow(rho, 2 - j);
  }
  return f;
}

double ModelHamiltonian::d_rho_rho(double rho, double i) const {
  double f = 0.0;
  for (std::size_t n = 0; n < kappa.size(); ++n) {
    const int j = int(n) + 2;
    f += kappa[n] * (2 - j) * (1 - j) * std::pow(i, j) * std::pow(rho, -j);
  }
  return f;
}

double ModelHamiltonian::d_rho_i(double rho, double i) const {
  double f = 1.0;
  for (std::size_t n = 0; n < kappa.size(); ++n) {
    const int j = int(n) + 2;
    f += kappa[n] * (2 - j) * j * std::pow(i, j - 1) * std::pow(rho, 1 - j);
  }
  return f;
}

double ModelHamiltonian::d_i_i(double rho, double i) const {
  double f = 0.0;
  for (std::size_t n = 0; n < kappa.size(); ++n) {
    const int j = int(n) + 2;
    f += kappa[n] * j * (j - 1) * std::pow(i, j - 2) * std::pow(rho, 2 - j);
  }
  return f;
}

double ModelHamiltonian::rho_on_level(double i) const {
  require(i > 0.0, ErrorCode::PreconditionViolated, "I must be positive");
  double rho = 1.0 / i;
  if (kappa.empty()) return rho;
  for (int it = 0; it < 100; ++it) {
    const double f = value(rho, i) - 1.0;
    const double fr = d_rho(rho, i);
    if (!(fr > 0.0)) {
      throw Error(ErrorCode::InvalidModel,
                  "dF/drho = " + num_str(fr) + " at I = " + num_str(i));
    }
    double step = f / fr;
    while (rho - step <= 0.0) step *= 0.5;
    rho -= step;
    if (std::abs(step) <= 4.0 * kEps * rho) return rho;
  }
  throw Error(ErrorCode::NewtonDivergence, "level F = 1 not reached at I = " + num_str(i));
}

double ModelHamiltonian::return_time(double i) const {
  const double rho = rho_on_level(i);
  const double fr = d_rho(rho, i);
  if (!(fr > 0.0)) throw Error(ErrorCode::InvalidModel, "dF/drho <= 0 on the level set");
  return 2.0 * t0 / fr;
}

double ModelHamiltonian::delta_theta(double i) const {
  const double rho = rho_on_level(i);
  const double fr = d_rho(rho, i);
  if (!(fr > 0.0)) throw Error(ErrorCode::InvalidModel, "dF/drho <= 0 on the level set");
  return 2.0 * t0 * d_i(rho, i) / fr;
}

double ModelHamiltonian::delta_theta_prime(double i) const {
  const double rho = rho_on_level(i);
  const double fr = d_rho(rho, i);
  const double fi = d_i(rho, i);
  const double rp = -fi / fr;
  const double dfi = d_i_i(rho, i) + d_rho_i(rho, i) * rp;
  const double dfr = d_rho_i(rho, i) + d_rho_rho(rho, i) * rp;
  return 2.0 * t0 * (dfi * fr - fi * dfr) / (fr * fr);
}

int k0(const ModelHamiltonian& h) {
  if (h.kappa.empty()) return 1;
  const double limit = 0.5 * h.validity_radius;
  int k = 1;
  while (std::sqrt(h.t0 / (k * kPi)) >= limit) ++k;
  return k;
}

double closure_solve(int k, const ModelHamiltonian& h, double tol) {
  require(k >= 1, ErrorCode::PreconditionViolated, "k must be at least 1");
  require(h.t0 > 0.0, ErrorCode::PreconditionViolated, "T0 must be positive");
  require(k >= k0(h), ErrorCode::PreconditionViolated,
          "k = " + num_str(k) + " is below k0 = " + num_str(k0(h)));
  const double target = 2.0 * k * kPi;
  const double accept = std::max(tol, 8.0 * kEps) * std::max(1.0, target);
  double i = std::sqrt(h.t0 / (k * kPi));
  double best = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 60; ++it) {
    const double r = h.delta_theta(i) - target;
    if (std::abs(r) <= accept) return i;
    best = std::min(best, std::abs(r));
    const double dp = h.delta_theta_prime(i);
    if (!std::isfinite(dp) || dp == 0.0) break;
    double step = r / dp;
    while (i - step <= 0.0) step *= 0.5;
    i -= step;
  }
  throw Error(ErrorCode::NewtonDivergence, "closure equation for k = " + num_str(k) +
                                               " stalled at residual " + num_str(best));
}

double length_of(int k, const ModelHamiltonian& h, double tol) {
  return h.return_time(closure_solve(k, h, tol));
}

LengthExpansion expansion_fit_samples(const std::vector<int>& k, const std::vector<double>& y,
                                      int n_terms) {
  require(n_terms >= 1 && k.size() == y.size() && int(k.size()) >= n_terms,
          ErrorCode::PreconditionViolated, "not enough samples for the fit");
  const int n = int(k.size());
  MatX a(n, n_terms);
  VecX b(n);
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j < n_terms; ++j) a(r, j) = std::pow(double(k[r]), -0.5 * j);
    b(r) = y[r];
  }
  const Eigen::JacobiSVD<MatX> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecX s = svd.singularValues();
  const double cond = s(s.size() - 1) > 0.0
                          ? std::pow(s(0) / s(s.size() - 1), 2)
                          : std::numeric_limits<double>::infinity();
  if (cond > 1e12) {
    throw Error(ErrorCode::IllConditionedFit,
                "normal equations have condition number " + num_str(cond));
  }
  const VecX c = svd.solve(b);
  LengthExpansion out;
  out.k = k;
  out.condition = cond;
  out.coefficients.assign(c.data(), c.data() + c.size());
  const VecX res = b - a * c;
  for (int r = 0; r < n; ++r) {
    out.residuals.push_back(res(r));
    out.max_residual = std::max(out.max_residual, std::abs(res(r)));
  }
  return out;
}

LengthExpansion expansion_fit(const ModelHamiltonian& h, int k_min, int k_max, int n_terms) {
  require(k_min >= 1 && k_max - k_min >= 4 * n_terms, ErrorCode::PreconditionViolated,
          "k range too short for " + num_str(n_terms) + " terms");
  std::vector<int> ks;
  std::vector<double> is, ls, ys;
  for (int k = k_min; k <= k_max; ++k) {
    const double i = closure_solve(k, h);
    const double l = h.return_time(i);
    ks.push_back(k);
    is.push_back(i);
    ls.push_back(l);
    ys.push_back(l - 2.0 * std::sqrt(kPi * k * h.t0));
  }
  LengthExpansion out = expansion_fit_samples(ks, ys, n_terms);
  out.i_values = std::move(is);
  out.lengths = std::move(ls);
  return out;
}

// ---------------------------------------------------------------------------
// Section model

bool ReebSectionModel::consistent() const {
  if (!pmap) return false;
  if (pmap(Vec2::Zero()).norm() > 1e-12) return false;
  const double h = 1e-6;
  Eigen::Matrix2d jac;
  for (int c = 0; c < 2; ++c) {
    const Vec2 e = Vec2::Unit(c) * h;
    jac.col(c) = (pmap(e) - pmap(-e)) / (2 * h);
  }
  return (jac - lin).cwiseAbs().maxCoeff() <= 1e-6;
}

ReebSectionModel ReebSectionModel::linear(const Eigen::Matrix2d& l, double t0) {
  ReebSectionModel m;
  m.lin = l;
  m.pmap = [l](const Vec2& q) -> Vec2 { return l * q; };
  m.rtime = [t0](const Vec2&) { return t0; };
  return m;
}

bool check_nondegenerate(const Eigen::Matrix2d& l) {
  return std::abs((l - Eigen::Matrix2d::Identity()).determinant()) > 1e-10;
}

ModelState poincare_map_p0(const ModelState& s, const ReebSectionModel& model) {
  require(s.i > 0.0, ErrorCode::PreconditionViolated, "I must be positive");
  ModelState out;
  out.q = model.pmap(s.q);
  out.theta = wrap_angle(s.theta + 2.0 * model.rtime(s.q) / (s.i * s.i));
  out.i = s.i;
  return out;
}

// ---------------------------------------------------------------------------
// S-map

Perturbation kick_perturbation(double eps, double t0) {
  Perturbation p;
  p.dj = [eps](double theta, double) { return eps * std::sin(theta); };
  p.dtheta = [eps, t0](double theta, double) { return 2.0 * t0 * eps * std::sin(theta); };
  return p;
}

double SMap::j_star() const { return k * kPi / t0; }

Vec2 SMap::apply(double theta, double j, double s) const {
  const double dth = s == 0.0 ? 0.0 : s * pert.dtheta(theta, j);
  const double dj = s == 0.0 ? 0.0 : s * pert.dj(theta, j);
  return Vec2(theta + 2.0 * t0 * (j - j_star()) + dth, j + dj);
}

TwistMap SMap::twist(double half_width) const {
  TwistMap m;
  m.a = -half_width;
  m.b = half_width;
  const SMap self = *this;
  const double js = j_star();
  m.map = [self, js](double x, double y) {
    const double theta = 2.0 * kPi * x;
    const double j = js + y;
    const double dth = self.pert.dtheta(theta, j);
    const double dj = self.pert.dj(theta, j);
    return Vec2(x + (2.0 * self.t0 * y + dth) / (2.0 * kPi), y + dj);
  };
  return m;
}

PerturbedCircleMap SMap::circle_family() const {
  PerturbedCircleMap c;
  c.k = k;
  c.j_star = j_star();
  const SMap self = *this;
  c.map = [self](double s, double theta, double j) { return self.apply(theta, j, s); };
  return c;
}

SMap s_map(int k, double t0, const Perturbation& pert) {
  require(k >= 1 && t0 > 0.0, ErrorCode::PreconditionViolated, "need k >= 1 and T0 > 0");
  require(bool(pert.dtheta) && bool(pert.dj), ErrorCode::PreconditionViolated,
          "perturbation is incomplete");
  SMap m{k, t0, pert};
  const double js = m.j_star();
  const double w = 0.25 * kPi / t0;
  const double h = 1e-5;
  const int n = 32;
  for (int a = 0; a < n; ++a) {
    const double th = 2.0 * kPi * a / n;
    for (int b = 0; b < n; ++b) {
      const double j = js - w + 2.0 * w * b / (n - 1);
      const double pa = (pert.dtheta(th + h, j) - pert.dtheta(th - h, j)) / (2 * h);
      const double pb = (pert.dtheta(th, j + h) - pert.dtheta(th, j - h)) / (2 * h);
      const double pc = (pert.dj(th + h, j) - pert.dj(th - h, j)) / (2 * h);
      const double pd = (pert.dj(th, j + h) - pert.dj(th, j - h)) / (2 * h);
      const double det = (1.0 + pa) * (1.0 + pd) - pc * (2.0 * t0 + pb);
      if (std::abs(det - 1.0) > 1e-10) {
        throw Error(ErrorCode::NotAreaPreserving,
                    "Jacobian determinant " + num_str(det) + " at theta = " +
                        num_str(th) + ", J = " + num_str(j));
      }
    }
  }
  return m;
}

}  // namespace srgeo
