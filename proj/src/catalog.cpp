#include "srgeo/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <tuple>

#include "srgeo/parallel.hpp"

namespace srgeo {

namespace {

constexpr double kCutClearance = 1e-9;

void require_window(double lo, double hi) {
  require(lo < hi, ErrorCode::PreconditionViolated, "empty Casimir interval");
  const Regime a = classify_regime(lo);
  const Regime b = classify_regime(hi);
  require(a.is_torus_regime() && a.tag == b.tag, ErrorCode::PreconditionViolated,
          "Casimir interval must lie inside one torus regime");
  for (double cut : {-1.0, 0.0, 1.0}) {
    require(std::abs(lo - cut) >= kCutClearance && std::abs(hi - cut) >= kCutClearance,
            ErrorCode::PreconditionViolated, "Casimir interval touches a critical value");
  }
}

std::vector<double> log_spaced(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  const double la = std::log(a), lb = std::log(b);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(la + (lb - la) * double(i) / double(n - 1));
  }
  out.front() = a;
  out.back() = b;
  return out;
}

double distance(const Mat2& a, const Mat2& b) {
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return psl2_distance(a, b) / scale;
}

/// Continuous rotation-number lift on a window, anchored by a grid scan.
struct WindowLift {
  std::vector<double> grid;
  std::vector<double> lifts;
  double lambda = 0.0;
  double tol = 1e-12;

  double reference(double c) const {
    auto it = std::upper_bound(grid.begin(), grid.end(), c);
    if (it == grid.begin()) return lifts.front();
    if (it == grid.end()) return lifts.back();
    const std::size_t j = std::size_t(it - grid.begin());
    const double w = (c - grid[j - 1]) / (grid[j] - grid[j - 1]);
    return (1.0 - w) * lifts[j - 1] + w * lifts[j];
  }

  double operator()(double c) const {
    const FrequencyPoint fp = rotation_number(c, lambda, tol);
    return fp.omega_mod1 + std::round(reference(c) - fp.omega_mod1);
  }
};

WindowLift scan_window(double lo, double hi, double lambda, const CatalogOptions& opt) {
  WindowLift w;
  w.grid = regime_grid(lo, hi, opt.grid_points);
  w.lambda = lambda;
  w.tol = opt.flow_tol;
  ScanOptions so;
  so.tol = opt.flow_tol;
  so.jobs = opt.jobs;
  for (const FrequencyPoint& fp : omega_lift_scan(w.grid, lambda, so)) {
    w.lifts.push_back(fp.omega_lift);
  }
  return w;
}

std::vector<RationalRoot> roots_from_values(const std::function<double(double)>& lift,
                                            const std::vector<double>& grid,
                                            const std::vector<double>& values, long p,
                                            long q, double tol) {
  require(q >= 1, ErrorCode::PreconditionViolated, "q must be positive");
  require(std::gcd(p, q) == 1, ErrorCode::PreconditionViolated, "p and q must be coprime");
  std::vector<RationalRoot> roots;
  if (grid.size() < 2) return roots;
  const auto [vmin, vmax] = std::minmax_element(values.begin(), values.end());
  const double r = double(p) / double(q);
  const long nlo = long(std::ceil(*vmin - r - 1e-15));
  const long nhi = long(std::floor(*vmax - r + 1e-15));
  for (long n = nlo; n <= nhi; ++n) {
    const long pn = p + n * q;
    const double target = double(pn) / double(q);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      double fa = values[i] - target;
      double fb = values[i + 1] - target;
      if (fa == 0.0) {
        roots.push_back({grid[i], pn, q});
        continue;
      }
      if (fa * fb > 0.0 || fb == 0.0) {
        if (fb == 0.0 && i + 2 == grid.size()) roots.push_back({grid[i + 1], pn, q});
        continue;
      }
      double a = grid[i], b = grid[i + 1];
      double fm = fa;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        fm = lift(m) - target;
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
          fb = fm;
        }
        if (b - a <= 1e-3 * tol * std::max(1.0, std::abs(a)) && std::abs(fm) <= 1e-3 * tol) break;
      }
      const double c = std::abs(fa) <= std::abs(fb) ? a : b;
      const double resid = std::min(std::abs(fa), std::abs(fb));
      if (resid > 10.0 * tol) {
        throw Error(ErrorCode::UnresolvedRoot,
                    "bracket collapsed without a root near C = " + num_str(c));
      }
      roots.push_back({c, pn, q});
    }
  }
  std::sort(roots.begin(), roots.end(),
            [](const RationalRoot& x, const RationalRoot& y) { return x.c < y.c; });
  return roots;
}

}  // namespace

HyperbolicClass::HyperbolicClass(double lam) : lambda(lam) {
  require(lam > 1.0, ErrorCode::PreconditionViolated, "hyperbolic class needs lambda > 1");
}

TorusDescriptor TorusDescriptor::make(double c, std::optional<HyperbolicClass> cls) {
  TorusDescriptor t;
  t.c = c;
  t.regime = classify_regime(c);
  if (c > 0.0) {
    require(cls.has_value(), ErrorCode::PreconditionViolated,
            "tori with C > 0 carry a hyperbolic class");
    t.hclass = cls;
  }
  return t;
}

std::vector<double> regime_grid(double lo, double hi, std::size_t n) {
  require_window(lo, hi);
  require(n >= 4, ErrorCode::PreconditionViolated, "grid needs at least 4 points");
  if (lo > 1.0) {
    std::vector<double> out = log_spaced(lo - 1.0, hi - 1.0, n);
    for (double& x : out) x += 1.0;
    out.front() = lo;
    out.back() = hi;
    return out;
  }
  // Bounded regimes: log-graded toward both critical ends.
  const double left = lo < 0.0 ? -1.0 : 0.0;
  const double right = lo < 0.0 ? 0.0 : 1.0;
  const double mid = 0.5 * (lo + hi);
  const std::size_t nl = n / 2 + 1;
  const std::size_t nr = n - nl + 1;
  std::vector<double> out;
  for (double d : log_spaced(lo - left, mid - left, nl)) out.push_back(left + d);
  const std::vector<double> rd = log_spaced(right - hi, right - mid, nr);
  for (std::size_t i = rd.size() - 1; i-- > 0;) out.push_back(right - rd[i]);
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<RationalRoot> find_rational_roots(const std::function<double(double)>& lift,
                                              const std::vector<double>& grid, long p,
                                              long q, double tol, unsigned jobs) {
  const std::vector<double> values =
      parallel_map<double>(grid.size(), jobs, [&](std::size_t i) { return lift(grid[i]); });
  return roots_from_values(lift, grid, values, p, q, tol);
}

std::vector<RationalRoot> find_rational_omega(const std::optional<HyperbolicClass>& cls,
                                              long p, long q, double c_lo, double c_hi,
                                              const CatalogOptions& opt) {
  require_window(c_lo, c_hi);
  const double lambda = cls ? cls->lambda : std::numbers::e;
  require(c_lo < 0.0 || cls.has_value(), ErrorCode::PreconditionViolated,
          "C > 0 needs a hyperbolic class");
  const WindowLift w = scan_window(c_lo, c_hi, lambda, opt);
  auto roots = roots_from_values(w, w.grid, w.lifts, p, q, opt.tol);
  for (const RationalRoot& r : roots) {
    const double err = std::abs(w(r.c) - double(r.p) / double(r.q));
    if (err > 10.0 * opt.tol) {
      throw Error(ErrorCode::UnresolvedRoot,
                  "root at C = " + num_str(r.c) + " re-evaluates off target");
    }
  }
  return roots;
}

long spiraling_integer(const std::vector<Momentum>& samples, double closure_tol) {
  require(samples.size() >= 2, ErrorCode::PreconditionViolated,
          "spiraling_integer needs at least two samples");
  const Momentum& first = samples.front();
  const Momentum& last = samples.back();
  const double gap = std::max(std::abs(first.xi() - last.xi()), std::abs(first.eta() - last.eta()));
  if (gap > closure_tol) {
    throw Error(ErrorCode::NotClosed, "sample path is not closed (gap " +
                                          num_str(gap) + ")");
  }
  double total = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const Momentum& a = samples[i - 1];
    const Momentum& b = samples[i];
    const double d = std::atan2(a.xi() * b.eta() - a.eta() * b.xi(),
                                a.xi() * b.xi() + a.eta() * b.eta());
    if (std::abs(d) >= 0.5 * std::numbers::pi) {
      throw Error(ErrorCode::UndersampledPath,
                  "angular step " + num_str(d) + " at sample " + num_str(i));
    }
    total += d;
  }
  const double turns = total / (2.0 * std::numbers::pi);
  const double n = std::round(turns);
  if (std::abs(turns - n) >= 0.01) {
    throw Error(ErrorCode::NotClosed, "winding is not an integer: " + num_str(turns));
  }
  return long(n);
}

ClosedGeodesicRecord build_record(const RationalRoot& root,
                                  const std::optional<HyperbolicClass>& cls,
                                  const CatalogOptions& opt, bool antipodal) {
  ClosedGeodesicRecord rec;
  rec.torus = TorusDescriptor::make(root.c, cls);
  require(rec.torus.regime.is_torus_regime(), ErrorCode::PreconditionViolated,
          "closed geodesic records need a torus regime");
  rec.p = root.p;
  rec.q = root.q;

  Momentum p0 = initial_momentum(root.c);
  if (antipodal) p0 = -p0;
  const double period = t_geod(root.c, opt.flow_tol, false);
  rec.length = double(root.q) * period;

  std::vector<std::pair<double, Momentum>> samples;
  const RawFlow flow = geodesic_flow_raw(Mat2::Identity(), p0, rec.length, opt.flow_tol, &samples);

  const double lambda = cls ? cls->lambda : 0.0;
  const double t_class = t_cas_class(root.c, lambda);
  const Algebra a = a_matrix(p0);
  const double s = double(root.p) * t_class;
  // The momentum is T-periodic, so the q-period holonomy is h1^q. Integrating
  // the group over q periods instead loses digits to entries of size e^s.
  const Mat2 h1 = geodesic_flow_raw(Mat2::Identity(), p0, period, opt.flow_tol).g;
  Mat2 hq = Mat2::Identity();
  for (long i = 0; i < root.q; ++i) hq = hq * h1;
  const double group_res = std::min(distance(hq, exp_traceless_sl2(a, s)),
                                    distance(hq, exp_traceless_sl2(a, -s)));
  const double momentum_res = (flow.p.v - p0.v).cwiseAbs().maxCoeff();
  rec.closure_residual = std::max(group_res, momentum_res);
  if (rec.closure_residual > 100.0 * opt.tol) {
    throw Error(ErrorCode::ClosureFailure,
                "orbit at C = " + num_str(root.c) + " does not close (residual " +
                    num_str(rec.closure_residual) + ")");
  }

  std::vector<Momentum> path;
  path.reserve(samples.size());
  for (const auto& [t, p] : samples) path.push_back(p);
  rec.winding = spiraling_integer(path, std::max(1e-6, 100.0 * opt.tol));
  rec.spiraling = std::abs(rec.winding);
  const long expected = rec.torus.regime.tag == RegimeTag::PrincipalSeries ? root.q : 0;
  if (rec.spiraling != expected) {
    rec.anomaly = true;
    rec.note = "spiraling " + num_str(rec.spiraling) + " differs from expected " +
               num_str(expected);
  }
  return rec;
}

std::pair<ClosedGeodesicRecord, ClosedGeodesicRecord> critical_geodesics(
    const HyperbolicClass& cls) {
  const double r = std::numbers::sqrt2 / 2.0;

  ClosedGeodesicRecord saddle;
  saddle.torus.c = 1.0;
  saddle.torus.regime = classify_regime(1.0);
  saddle.torus.hclass = cls;
  {
    const Algebra v = geodesic_velocity(Momentum(r, r, 0.0));
    saddle.length = subgroup_return_time(v, cls.lambda);
    const double tr = std::abs(exp_traceless_sl2(v, saddle.length).trace());
    const double target = cls.lambda + 1.0 / cls.lambda;
    saddle.closure_residual = std::abs(tr - target) / target;
  }

  ClosedGeodesicRecord fiber;
  fiber.torus.c = -1.0;
  fiber.torus.regime = classify_regime(-1.0);
  {
    const Algebra v = geodesic_velocity(Momentum(r, -r, 0.0));
    const double measured = subgroup_return_time(v, 0.0);
    fiber.length = 2.0 * std::numbers::sqrt2 * std::numbers::pi;
    fiber.measured_period = measured;
    fiber.closure_residual =
        psl2_distance(exp_traceless_sl2(v, measured), Mat2(Mat2::Identity()));
    fiber.note = "length is the SL2 period; the minimal PSL2 return is half of it";
  }
  return {saddle, fiber};
}

std::vector<ClosedGeodesicRecord> build_catalog(double lambda, long q_max,
                                                const std::vector<CatalogWindow>& windows,
                                                const CatalogOptions& opt) {
  require(q_max >= 1, ErrorCode::PreconditionViolated, "q_max must be positive");
  const HyperbolicClass cls(lambda);
  struct Job {
    RationalRoot root;
    bool negative;
  };
  std::vector<Job> jobs;
  for (const CatalogWindow& win : windows) {
    require_window(win.lo, win.hi);
    const WindowLift w = scan_window(win.lo, win.hi, lambda, opt);
    for (long q = 1; q <= q_max; ++q) {
      for (long p = 0; p < q; ++p) {
        if (std::gcd(p, q) != 1) continue;
        for (const RationalRoot& r : roots_from_values(w, w.grid, w.lifts, p, q, opt.tol)) {
          jobs.push_back({r, win.lo < 0.0});
        }
      }
    }
  }
  std::vector<ClosedGeodesicRecord> records = parallel_map<ClosedGeodesicRecord>(
      jobs.size(), opt.jobs, [&](std::size_t i) {
        const std::optional<HyperbolicClass> c =
            jobs[i].negative ? std::nullopt : std::optional<HyperbolicClass>(cls);
        return build_record(jobs[i].root, c, opt);
      });
  std::sort(records.begin(), records.end(),
            [](const ClosedGeodesicRecord& a, const ClosedGeodesicRecord& b) {
              return std::tie(a.q, a.p, a.torus.c) < std::tie(b.q, b.p, b.torus.c);
            });
  return records;
}

}  // namespace srgeo
