#include "srgeo/phase_flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "srgeo/ode.hpp"
#include "srgeo/parallel.hpp"

namespace srgeo {

namespace {

using State7 = Eigen::Matrix<double, 7, 1>;

State7 pack(const Mat2& g, const Momentum& p) {
  State7 s;
  s << g(0, 0), g(0, 1), g(1, 0), g(1, 1), p.v;
  return s;
}

Mat2 unpack_g(const State7& s) {
  Mat2 g;
  g << s(0), s(1), s(2), s(3);
  return g;
}

double frac(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f -= 1.0;
  return f;
}

double relative_psl2_distance(const Mat2& a, const Mat2& b) {
  const double scale =
      std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return psl2_distance(a, b) / scale;
}

}  // namespace

std::string_view to_string(PeriodNormalization n) {
  switch (n) {
    case PeriodNormalization::Hyperbolic: return "hyperbolic";
    case PeriodNormalization::Psl2Minimal: return "psl2-minimal";
  }
  return "unknown";
}

PhaseState casimir_flow(const PhaseState& s, double t) {
  return {exp_traceless(a_matrix(s.p), t) * s.g, s.p};
}

double t_cas(double c, double lambda) {
  const Regime r = classify_regime(c);
  if (r.tag == RegimeTag::Parabolic) {
    throw Error(ErrorCode::NoPeriodicOrbit, "no periodic Casimir orbits at C = 0");
  }
  if (c > 0.0) {
    require(lambda > 1.0, ErrorCode::PreconditionViolated,
            "t_cas needs lambda > 1 for C > 0");
    return std::log(lambda) / std::sqrt(2.0 * c);
  }
  return 2.0 * std::numbers::pi / std::sqrt(-2.0 * c);
}

double t_cas_class(double c, double lambda) {
  const double t = t_cas(c, lambda);
  return c > 0.0 ? t : 0.5 * t;
}

double subgroup_return_time(const Algebra& u, double lambda, double tol) {
  const double det = u.determinant();
  if (std::abs(det) < 1e-14) {
    throw Error(ErrorCode::ParabolicGenerator, "parabolic subgroup never returns");
  }
  const double eps = std::max(tol, 1e-15);
  if (det < 0.0) {
    require(lambda > 1.0, ErrorCode::PreconditionViolated,
            "hyperbolic return needs lambda > 1");
    const double target = lambda + 1.0 / lambda;
    auto f = [&](double t) { return std::abs(exp_traceless_sl2(u, t).trace()) - target; };
    double lo = 0.0, hi = 1e-3;
    while (f(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      require(hi < 1e12, ErrorCode::NoPeriodicOrbit, "subgroup return not bracketed");
    }
    while (hi - lo > eps * std::max(1.0, hi)) {
      const double m = 0.5 * (lo + hi);
      (f(m) < 0.0 ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
  }
  // First sign change of the traceless projection onto u: exp(tu) = +-Id.
  const Mat2 U = u.matrix();
  const double uu = (U.array() * U.array()).sum();
  auto k = [&](double t) {
    const Mat2 e = exp_traceless_sl2(u, t);
    const Mat2 tl = e - 0.5 * e.trace() * Mat2::Identity();
    return (tl.array() * U.array()).sum() / uu;
  };
  const double dt = 1e-2;
  double lo = dt, hi = 2 * dt;
  while (k(hi) > 0.0) {
    lo = hi;
    hi += dt;
    require(hi < 1e6, ErrorCode::NoPeriodicOrbit, "subgroup return not bracketed");
  }
  while (hi - lo > eps * std::max(1.0, hi)) {
    const double m = 0.5 * (lo + hi);
    (k(m) > 0.0 ? lo : hi) = m;
  }
  const double t = 0.5 * (lo + hi);
  if (psl2_distance(exp_traceless_sl2(u, t), Mat2(Mat2::Identity())) > 1e-6) {
    throw Error(ErrorCode::NoPeriodicOrbit, "elliptic return is not +-Id");
  }
  return t;
}

CasimirReturn casimir_return_time(double c, double lambda, double tol) {
  CasimirReturn out;
  out.formula = t_cas(c, lambda);
  out.measured = subgroup_return_time(a_matrix(initial_momentum(c)), lambda, tol);
  out.half_of_formula = std::abs(out.measured - 0.5 * out.formula) <= 1e-8 * out.formula;
  return out;
}

RawFlow geodesic_flow_raw(const Mat2& g0, const Momentum& p0, double t, double tol,
                          std::vector<std::pair<double, Momentum>>* samples) {
  const double gs0 = gstar(p0);
  const double c0 = casimir(p0);
  auto field = [](double, const State7& y) -> State7 {
    const Momentum p(Vec3(y.tail<3>()));
    const Mat2 g = unpack_g(y);
    const Mat2 gd = geodesic_velocity(p).matrix() * g;
    State7 d;
    d << gd(0, 0), gd(0, 1), gd(1, 0), gd(1, 1), euler_field(p).v;
    return d;
  };
  auto post = [gs0, c0](double, State7& y) {
    Mat2 g = unpack_g(y);
    const double det = g.determinant();
    if (det > 0.0 && std::abs(det - 1.0) > determinant_noise(g)) g /= std::sqrt(det);
    y = pack(g, project_to_level(Momentum(Vec3(y.tail<3>())), gs0, c0));
  };
  if (samples) samples->emplace_back(0.0, p0);
  auto observe = [samples](double tt, const State7& y) {
    if (samples) samples->emplace_back(tt, Momentum(Vec3(y.tail<3>())));
    return true;
  };
  ode::StepControl ctl;
  ctl.rtol = ctl.atol = std::max(tol, 1e-14);
  // The flow acts by left multiplication, so g(t) = M(t) g0 with M(0) = Id.
  // Integrating M keeps the determinant check well conditioned when g0 is far
  // from the identity.
  const State7 y = ode::integrate(field, pack(Mat2::Identity(), p0), 0.0, t, ctl, post, observe);
  return {unpack_g(y) * g0, Momentum(Vec3(y.tail<3>()))};
}

PhaseState geodesic_flow(const PhaseState& s, double t, double tol) {
  require(std::abs(gstar(s.p) - 1.0) <= 1e-9, ErrorCode::PreconditionViolated,
          "geodesic_flow needs g*(p) = 1");
  const RawFlow r = geodesic_flow_raw(s.g.matrix(), s.p, t, tol);
  const double drift = std::max(std::abs(casimir(r.p) - casimir(s.p)),
                                std::abs(gstar(r.p) - gstar(s.p)));
  if (drift > 10.0 * std::max(tol, 1e-14) * std::max(1.0, std::abs(casimir(s.p)))) {
    throw Error(ErrorCode::InvariantDrift,
                "geodesic_flow invariant drift " + num_str(drift));
  }
  return {Psl2(r.g), r.p};
}

FrequencyPoint rotation_number_from(const Momentum& p0, double lambda, double tol) {
  const double c = casimir(p0);
  const Regime reg = classify_regime(c);
  require(reg.is_torus_regime(), ErrorCode::OutOfRange,
          "rotation_number needs C in (-1, 0) or (0, 1) or (1, inf), got " +
              num_str(c));
  require(std::abs(gstar(p0) - 1.0) <= 1e-9, ErrorCode::PreconditionViolated,
          "rotation_number needs g*(p0) = 1");
  FrequencyPoint fp;
  fp.c = c;
  fp.t_geod = t_geod(c, std::max(tol, 1e-14), false);
  fp.t_cas = t_cas_class(c, lambda);
  fp.normalization =
      c > 0.0 ? PeriodNormalization::Hyperbolic : PeriodNormalization::Psl2Minimal;

  const RawFlow r = geodesic_flow_raw(Mat2::Identity(), p0, fp.t_geod, tol);
  fp.momentum_return = (r.p.v - p0.v).cwiseAbs().maxCoeff();
  const Algebra a = a_matrix(p0);
  // Holonomy of one reduced period lies on the subgroup exp(s A(p0)).
  const double s = log_in_subgroup(r.g, a, 1e-5);
  fp.holonomy_residual = relative_psl2_distance(exp_traceless_sl2(a, s), r.g);
  fp.omega_lift = s / fp.t_cas;
  fp.omega_mod1 = frac(fp.omega_lift);
  return fp;
}

FrequencyPoint rotation_number(double c, double lambda, double tol) {
  return rotation_number_from(initial_momentum(c), lambda, tol);
}

std::vector<double> unwrap_mod1(const std::vector<double>& f) {
  std::vector<double> out(f.size());
  if (f.empty()) return out;
  out[0] = f[0];
  for (std::size_t i = 1; i < f.size(); ++i) {
    double d = f[i] - f[i - 1];
    d -= std::round(d);
    out[i] = out[i - 1] + d;
  }
  return out;
}

std::vector<FrequencyPoint> omega_lift_scan(const std::vector<double>& grid, double lambda,
                                            const ScanOptions& opt) {
  if (grid.empty()) return {};
  require(std::is_sorted(grid.begin(), grid.end()), ErrorCode::PreconditionViolated,
          "omega_lift_scan grid must be sorted");
  const RegimeTag tag = classify_regime(grid.front()).tag;
  for (double c : grid) {
    const Regime r = classify_regime(c);
    require(r.is_torus_regime() && r.tag == tag, ErrorCode::PreconditionViolated,
            "omega_lift_scan grid must lie inside one torus regime");
    for (double cut : {-1.0, 0.0, 1.0}) {
      require(std::abs(c - cut) >= 1e-9, ErrorCode::PreconditionViolated,
              "omega_lift_scan grid too close to a critical value");
    }
  }

  std::vector<FrequencyPoint> pts = parallel_map<FrequencyPoint>(
      grid.size(), opt.jobs, [&](std::size_t i) { return rotation_number(grid[i], lambda, opt.tol); });

  // Dense sequence for unwrapping: refine where neighbours jump by > 1/4.
  std::vector<double> dense_frac;
  std::vector<std::size_t> node_index;
  auto wrapped = [](double a, double b) {
    double d = b - a;
    return std::abs(d - std::round(d));
  };
  auto refine = [&](auto&& self, const FrequencyPoint& a, const FrequencyPoint& b,
                    int depth) -> void {
    if (wrapped(a.omega_mod1, b.omega_mod1) <= 0.25) return;
    if (depth >= opt.max_refine) {
      if (wrapped(a.omega_mod1, b.omega_mod1) > 0.45) {
        throw Error(ErrorCode::UnwrapAmbiguity,
                    "rotation number jumps between C = " + num_str(a.c) +
                        " and C = " + num_str(b.c));
      }
      return;
    }
    const FrequencyPoint m = rotation_number(0.5 * (a.c + b.c), lambda, opt.tol);
    self(self, a, m, depth + 1);
    dense_frac.push_back(m.omega_mod1);
    self(self, m, b, depth + 1);
  };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0) refine(refine, pts[i - 1], pts[i], 0);
    node_index.push_back(dense_frac.size());
    dense_frac.push_back(pts[i].omega_mod1);
  }
  const std::vector<double> dense = unwrap_mod1(dense_frac);

  if (tag == RegimeTag::DiscreteSeries) {
    const double last = dense[node_index.back()];
    const double shift = -std::ceil(last - 0.5);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      pts[i].omega_lift = dense[node_index[i]] + shift;
    }
  } else {
    // The holonomy parameter is already continuous; check the unwrap agrees.
    const double offset = pts[0].omega_lift - dense[node_index[0]];
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = pts[i].omega_lift - dense[node_index[i]] - offset;
      if (std::abs(d) > 1e-6) {
        throw Error(ErrorCode::UnwrapAmbiguity,
                    "unwrapped rotation number disagrees with the holonomy lift at C = " +
                        num_str(pts[i].c));
      }
    }
  }
  return pts;
}

double cos_alpha(const Momentum& p) {
  return std::abs(p.xi() * p.eta()) / std::sqrt(1.0 + 0.25 * p.zeta() * p.zeta());
}

double phase_distance(const PhaseState& a, const PhaseState& b) {
  return std::max(relative_psl2_distance(a.g.matrix(), b.g.matrix()),
                  (a.p.v - b.p.v).cwiseAbs().maxCoeff());
}

double commutator_defect(const PhaseState& s, double t, double u, double tol) {
  const PhaseState a = geodesic_flow(casimir_flow(s, u), t, tol);
  const PhaseState b = casimir_flow(geodesic_flow(s, t, tol), u);
  return phase_distance(a, b);
}

}  // namespace srgeo
