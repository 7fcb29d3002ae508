#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "srgeo/catalog.hpp"

using namespace srgeo;

namespace {

const double kPi = std::numbers::pi;
const double kE = std::numbers::e;

double frac_distance(double a, double b) {
  double d = std::abs(a - b);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

}  // namespace

TEST_CASE("find_rational_roots on a synthetic lift") {
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(0.1 * std::pow(100.0, i / 400.0));
  const auto roots = find_rational_roots([](double c) { return 1.0 / c; }, grid, 1, 2, 1e-12);
  bool found = false;
  for (const auto& r : roots) {
    CHECK(std::abs(1.0 / r.c - double(r.p) / r.q) < 1e-10);
    if (std::abs(r.c - 2.0) < 1e-10) found = true;
  }
  CHECK(found);
  CHECK(roots.size() == 10);  // 1/C = 1/2, 3/2, ..., 19/2 on [0.1, 10]
}

TEST_CASE("find_rational_omega roots re-evaluate to p/q") {
  const HyperbolicClass cls(kE);
  CatalogOptions opt;
  for (long q = 1; q <= 5; ++q) {
    for (long p = 0; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      for (const auto& r : find_rational_omega(cls, p, q, 1.01, 20.0, opt)) {
        const FrequencyPoint f = rotation_number(r.c, kE, opt.flow_tol);
        CHECK_MESSAGE(frac_distance(f.omega_mod1, double(p) / q) <= 10 * opt.tol,
                      "C = " << r.c << " p/q = " << p << "/" << q);
      }
    }
  }
  CHECK_THROWS_AS(find_rational_omega(cls, 1, 2, 0.5, 1.5, opt), Error);
}

TEST_CASE("build_record spiraling by regime") {
  const HyperbolicClass cls(kE);
  const auto principal = find_rational_omega(cls, 1, 3, 1.01, 20.0);
  REQUIRE_FALSE(principal.empty());
  const auto rec = build_record(principal.front(), cls);
  CHECK(rec.torus.regime.tag == RegimeTag::PrincipalSeries);
  CHECK(rec.spiraling == rec.q);
  CHECK(rec.closure_residual <= 1e-6);
  CHECK(std::abs(rec.length - rec.q * t_geod(rec.torus.c)) <= 1e-8 * rec.length);

  const auto comp = find_rational_omega(cls, 1, 2, 0.05, 0.95);
  REQUIRE_FALSE(comp.empty());
  const auto rc = build_record(comp.front(), cls);
  CHECK(rc.torus.regime.tag == RegimeTag::ComplementarySeries);
  CHECK(rc.spiraling == 0);

  const auto disc = find_rational_omega(std::nullopt, 1, 4, -0.95, -0.05);
  REQUIRE_FALSE(disc.empty());
  const auto rd = build_record(disc.front(), std::nullopt);
  CHECK(rd.torus.regime.tag == RegimeTag::DiscreteSeries);
  CHECK_FALSE(rd.torus.hclass.has_value());
  CHECK(rd.spiraling == 0);
  CHECK(rd.closure_residual <= 1e-6);
}

TEST_CASE("antipodal start flips the winding") {
  const HyperbolicClass cls(kE);
  const auto roots = find_rational_omega(cls, 1, 2, 1.01, 20.0);
  REQUIRE_FALSE(roots.empty());
  const auto a = build_record(roots.front(), cls, {}, false);
  const auto b = build_record(roots.front(), cls, {}, true);
  CHECK(a.length == doctest::Approx(b.length).epsilon(1e-12));
  CHECK(a.winding == -b.winding);
  CHECK(a.winding != 0);
}

TEST_CASE("critical geodesics") {
  const auto [sep, bottom] = critical_geodesics(HyperbolicClass(kE));
  CHECK(sep.length == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(bottom.length == doctest::Approx(2 * std::sqrt(2.0) * kPi).epsilon(1e-12));
  REQUIRE(bottom.measured_period.has_value());
  CHECK(*bottom.measured_period == doctest::Approx(std::sqrt(2.0) * kPi).epsilon(1e-9));
  const auto [sep2, bottom2] = critical_geodesics(HyperbolicClass(kE * kE));
  CHECK(sep2.length == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(bottom2.length == bottom.length);
}

TEST_CASE("spiraling_integer") {
  std::vector<Momentum> constant(50, Momentum(0.6, 0.8, 1.0));
  CHECK(spiraling_integer(constant) == 0);
  std::vector<Momentum> circle;
  for (int i = 0; i <= 1000; ++i) {
    const double t = i / 1000.0;
    circle.emplace_back(std::cos(2 * kPi * t), std::sin(2 * kPi * t), 0.0);
  }
  CHECK(spiraling_integer(circle) == 1);

  std::vector<std::pair<double, Momentum>> samples;
  const double c = 0.5;
  geodesic_flow_raw(Mat2::Identity(), initial_momentum(c), t_geod(c), 1e-12, &samples);
  std::vector<Momentum> lib{initial_momentum(c)};
  for (const auto& s : samples) lib.push_back(s.second);
  CHECK(spiraling_integer(lib) == 0);

  std::vector<Momentum> open{Momentum(1, 0, 0), Momentum(0, 1, 0)};
  CHECK_THROWS_AS(spiraling_integer(open), Error);
}

TEST_CASE("catalog records grow with q (density evidence)") {
  CatalogOptions opt;
  opt.jobs = 4;
  std::size_t previous = 0;
  for (long qmax = 1; qmax <= 6; ++qmax) {
    const auto recs = build_catalog(kE, qmax, {{1.01, 20.0}}, opt);
    CHECK(recs.size() > previous);
    previous = recs.size();
    for (std::size_t i = 1; i < recs.size(); ++i) {
      const auto& a = recs[i - 1];
      const auto& b = recs[i];
      CHECK(std::tie(a.q, a.p, a.torus.c) <= std::tie(b.q, b.p, b.torus.c));
    }
  }
}
