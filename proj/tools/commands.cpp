#include "commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>

#include "srgeo/annulus.hpp"
#include "srgeo/birkhoff.hpp"
#include "srgeo/catalog.hpp"
#include "srgeo/flow_compare.hpp"
#include "srgeo/io.hpp"
#include "srgeo/parallel.hpp"
#include "svg.hpp"

namespace srgeo::cli {

namespace {

using nlohmann::json;
using io::Cell;
using io::Table;

constexpr double kE = std::numbers::e;

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::PreconditionViolated, what);
}

double number(const json& p, const std::string& key, double fallback) {
  if (!p.contains(key)) return fallback;
  const json& v = p.at(key);
  if (!v.is_number()) bad("parameter '" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad("parameter '" + key + "' must be finite");
  return x;
}

long integer(const json& p, const std::string& key, long fallback) {
  if (!p.contains(key)) return fallback;
  const json& v = p.at(key);
  if (!v.is_number_integer()) bad("parameter '" + key + "' must be an integer");
  return v.get<long>();
}

std::vector<double> numbers(const json& p, const std::string& key,
                            const std::vector<double>& fallback) {
  if (!p.contains(key)) return fallback;
  const json& v = p.at(key);
  if (!v.is_array()) bad("parameter '" + key + "' must be a list of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) bad("parameter '" + key + "' must be a list of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::string text(const json& p, const std::string& key, const std::string& fallback) {
  if (!p.contains(key)) return fallback;
  if (!p.at(key).is_string()) bad("parameter '" + key + "' must be a string");
  return p.at(key).get<std::string>();
}

double tolerance(const RunConfig& cfg, double fallback) {
  return cfg.tol > 0.0 ? cfg.tol : fallback;
}

double lambda_of(const json& p) {
  const double lam = number(p, "lambda", kE);
  if (!(lam > 1.0)) bad("lambda must exceed 1");
  return lam;
}

/// C values from c_list, or n points between c_min and c_max (log spaced when
/// both ends have the same sign).
std::vector<double> c_values(const json& p, const std::vector<double>& fallback) {
  if (p.contains("c_list")) {
    std::vector<double> c = numbers(p, "c_list", {});
    if (c.empty()) bad("c_list is empty");
    return c;
  }
  if (p.contains("c_min") || p.contains("c_max")) {
    const double lo = number(p, "c_min", 0.0), hi = number(p, "c_max", 0.0);
    const long n = integer(p, "n", 20);
    if (!(lo < hi) || n < 2) bad("need c_min < c_max and n >= 2");
    std::vector<double> c(n);
    const bool geometric = lo * hi > 0.0;
    for (long k = 0; k < n; ++k) {
      const double s = double(k) / double(n - 1);
      c[k] = geometric ? std::copysign(std::exp(std::log(std::abs(lo)) +
                                                s * (std::log(std::abs(hi)) -
                                                     std::log(std::abs(lo)))),
                                       lo)
                       : lo + s * (hi - lo);
    }
    if (lo < 0.0 && hi < 0.0) std::reverse(c.begin(), c.end());
    c.front() = lo;
    c.back() = hi;
    return c;
  }
  return fallback;
}

std::string render(const Table& t, const RunConfig& cfg) {
  if (cfg.format == "csv") return t.csv();
  if (cfg.format == "json") return t.json();
  bad("command '" + cfg.command + "' does not support format " + cfg.format);
}

// ---------------------------------------------------------------------------

std::string cmd_regimes(const RunConfig& cfg, std::string& stage) {
  const json& p = cfg.params;
  if (cfg.format == "svg") {
    LevelPlot plot;
    plot.levels = numbers(p, "levels", plot.levels);
    plot.zeta_max = number(p, "zeta_max", plot.zeta_max);
    if (plot.levels.empty() || !(plot.zeta_max > 0.0)) bad("invalid plot parameters");
    stage = "level_set_svg";
    return level_set_svg(plot);
  }
  const std::vector<double> cs = c_values(p, {-1.0, -0.5, 0.0, 0.5, 1.0, 5.0});
  Table t;
  t.columns = {"c", "regime", "torus_regime", "periodic_orbits", "critical_value"};
  stage = "classify_regime";
  for (const double c : cs) {
    const Regime r = classify_regime(c);
    const bool critical =
        r.tag == RegimeTag::EllipticEquilibrium || r.tag == RegimeTag::Separatrix;
    t.add({Cell::number(c), Cell::string(std::string(to_string(r.tag))),
           Cell::boolean(r.is_torus_regime()), Cell::boolean(r.has_periodic_orbits()),
           Cell::boolean(critical)});
  }
  return render(t, cfg);
}

std::string cmd_periods(const RunConfig& cfg, std::string& stage) {
  const json& p = cfg.params;
  const std::vector<double> cs = c_values(p, {-0.9, -0.5, 0.2, 0.5, 2.0, 5.0});
  const double lam = lambda_of(p);
  const double tol = tolerance(cfg, 1e-12);
  for (double c : cs) {
    if (!(c > -1.0) || c == 1.0) bad("reduced periods need -1 < C and C != 1");
  }
  struct Row {
    double quad = 0, ode = 0, tcas = 0, measured = 0;
    bool half = false;
  };
  stage = "t_geod_quadrature / t_geod_ode / casimir_return_time";
  const auto rows = parallel_map<Row>(cs.size(), cfg.jobs, [&](std::size_t i) {
    Row r;
    const double c = cs[i];
    r.quad = t_geod_quadrature(c, tol);
    r.ode = t_geod_ode(c, tol);
    if (c != 0.0) {
      const CasimirReturn cr = casimir_return_time(c, lam, tol);
      r.tcas = cr.formula;
      r.measured = cr.measured;
      r.half = cr.half_of_formula;
    }
    return r;
  });
  Table t;
  t.columns = {"c", "regime", "t_geod", "t_geod_ode", "relative_difference",
               "t_cas", "t_cas_measured", "half_period"};
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const Row& r = rows[i];
    const bool has_cas = cs[i] != 0.0;
    t.add({Cell::number(cs[i]), Cell::string(std::string(to_string(classify_regime(cs[i]).tag))),
           Cell::number(r.quad), Cell::number(r.ode),
           Cell::number(std::abs(r.quad - r.ode) / std::abs(r.quad)),
           has_cas ? Cell::number(r.tcas) : Cell::null(),
           has_cas ? Cell::number(r.measured) : Cell::null(), Cell::boolean(r.half)});
  }
  return render(t, cfg);
}

std::string cmd_omega(const RunConfig& cfg, std::string& stage) {
  const json& p = cfg.params;
  const double lo = number(p, "c_min", 1.001), hi = number(p, "c_max", 100.0);
  const long n = integer(p, "n", 40);
  if (!(lo < hi) || n < 2) bad("need c_min < c_max and n >= 2");
  ScanOptions opt;
  opt.tol = tolerance(cfg, opt.tol);
  opt.jobs = cfg.jobs;
  stage = "omega_lift_scan";
  const auto pts = omega_lift_scan(regime_grid(lo, hi, std::size_t(n)), lambda_of(p), opt);
  Table t;
  t.columns = {"c", "omega_lift", "omega_mod1", "t_cas", "t_geod", "holonomy_residual",
               "normalization"};
  for (const auto& f : pts) {
    t.add({Cell::number(f.c), Cell::number(f.omega_lift), Cell::number(f.omega_mod1),
           Cell::number(f.t_cas), Cell::number(f.t_geod), Cell::number(f.holonomy_residual),
           Cell::string(std::string(to_string(f.normalization)))});
  }
  return render(t, cfg);
}

std::string cmd_catalog(const RunConfig& cfg, std::string& stage) {
  const json& p = cfg.params;
  const double lam = lambda_of(p);
  const long q_max = integer(p, "q_max", 3);
  if (q_max < 1 || q_max > 64) bad("q_max must lie in [1, 64]");
  std::vector<CatalogWindow> windows{{1.01, 20.0}, {0.05, 0.95}, {-0.95, -0.05}};
  if (p.contains("windows")) {
    windows.clear();
    if (!p.at("windows").is_array()) bad("windows must be a list of [lo, hi] pairs");
    for (const auto& w : p.at("windows")) {
      if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
        bad("windows must be a list of [lo, hi] pairs");
      }
      windows.push_back({w[0].get<double>(), w[1].get<double>()});
      if (!(windows.back().lo < windows.back().hi)) bad("empty catalog window");
    }
  }
  CatalogOptions opt;
  opt.tol = tolerance(cfg, opt.tol);
  opt.jobs = cfg.jobs;
  stage = "build_catalog";
  const Table t = io::catalog_table(build_catalog(lam, q_max, windows, opt));
  return render(t, cfg);
}

std::string cmd_birkhoff(const RunConfig& cfg, std::string& stage) {
  const json& p = cfg.params;
  ModelHamiltonian h;
  h.t0 = number(p, "T0", 1.0);
  h.kappa = numbers(p, "kappa", {});
  h.validity_radius = number(p, "validity_radius", 1.0);
  if (!(h.t0 > 0.0) || !(h.validity_radius > 0.0)) bad("T0 and validity_radius must be positive");
  const long k_min = integer(p, "k_min", std::max<long>(1, k0(h)));
  const long k_max = integer(p, "k_max", 100);
  if (k_min < 1 || k_max < k_min) bad("need 1 <= k_min <= k_max");
  const double tol = tolerance(cfg, 1e-14);
  struct Row {
    double i = 0, l = 0, res = 0;
  };
  stage = "closure_solve / length_of";
  const auto rows = parallel_map<Row>(std::size_t(k_max - k_min + 1), cfg.jobs,
                                      [&](std::size_t n) {
                                        const int k = int(k_min + long(n));
                                        Row r;
                                        r.i = closure_solve(k, h, tol);
                                        r.l = h.return_time(r.i);
                                        r.res = h.delta_theta(r.i) - 2.0 * k * std::numbers::pi;
                                        return r;
                                      });
  Table t;
  t.columns = {"k", "I_k", "l_k", "l_k_minus_leading", "delta_theta_residual"};
  for (std::size_t n = 0; n < rows.size(); ++n) {
    const long k = k_min + long(n);
    t.add({Cell::integer(k), Cell::number(rows[n].i), Cell::number(rows[n].l),
           Cell::number(rows[n].l - 2.0 * std::sqrt(std::numbers::pi * double(k) * h.t0)),
           Cell::number(rows[n].res)});
  }
  return render(t, cfg);
}

SMap smap_from(const json& p, double default_eps) {
  const long k = integer(p, "k", 5);
  const double t0 = number(p, "T0", 1.0);
  const double eps = number(p, "eps", default_eps);
  if (k < 1 || !(t0 > 0.0)) bad("need k >= 1 and T0 > 0");
  return s_map(int(k), t0, kick_perturbation(eps, t0));
}

std::string cmd_twist(const RunConfig& cfg, std::string& stage) {
  const json& p = cfg.params;
  const std::string kind = text(p, "map", "smap");
  const double tol = tolerance(cfg, 1e-12);
  TwistMap m;
  double j_star = 0.0;
  if (kind == "smap") {
    stage = "s_map";
    const SMap s = smap_from(p, 1e-6);
    j_star = s.j_star();
    m = s.twist(number(p, "half_width", 0.25));
  } else if (kind == "standard") {
    const double eps = number(p, "eps", 0.05);
    m.a = 0.0;
    m.b = 1.0;
    m.map = [eps](double x, double y) {
      const double y1 = y + eps * std::sin(2.0 * std::numbers::pi * x);
      return Vec2(x + y1 - 0.5, y1);
    };
  } else {
    bad("map must be 'smap' or 'standard'");
  }
  stage = "pb_fixed_point";
  const auto pts = pb_fixed_point(m, tol, int(integer(p, "n_grid", 2048)));
  Table t;
  t.columns = {"x", "y", "theta", "J", "residual"};
  for (const Vec2& q : pts) {
    const Vec2 f = m(q(0), q(1));
    const double res = std::max(std::abs(f(0) - q(0)), std::abs(f(1) - q(1)));
    const bool s = kind == "smap";
    t.add({Cell::number(q(0)), Cell::number(q(1)),
           s ? Cell::number(2.0 * std::numbers::pi * q(0)) : Cell::null(),
           s ? Cell::number(j_star + q(1)) : Cell::null(), Cell::number(res)});
  }
  return render(t, cfg);
}

std::string cmd_flowcmp(const RunConfig& cfg, std::string& stage) {
  const json& p = cfg.params;
  const long m = integer(p, "m", 5);
  const std::vector<double> grid = numbers(p, "i0", {0.2, 0.1, 0.05});
  if (m < 0 || grid.size() < 2) bad("need m >= 0 and at least two I0 values");
  stage = "closeness_report";
  const ClosenessReport rep = closeness_report([](int mm) { return model_flow_pair(mm); }, grid,
                                               int(m), tolerance(cfg, 1e-12), cfg.jobs);
  Table t;
  t.columns = {"I0", "horizon", "sup_distance", "fitted_exponent", "sup_rate", "rate_exponent",
               "expected_exponent"};
  for (const auto& r : rep.rows) {
    t.add({Cell::number(r.i0), Cell::number(r.horizon), Cell::number(r.sup_distance),
           Cell::number(rep.distance_exponent), Cell::number(r.sup_rate),
           Cell::number(rep.rate_exponent), Cell::number(rep.expected_exponent)});
  }
  return render(t, cfg);
}

std::string cmd_invariant_circle(const RunConfig& cfg, std::string& stage) {
  const json& p = cfg.params;
  stage = "s_map";
  const SMap s = smap_from(p, 1e-4);
  NewtonOptions opt;
  opt.tol = tolerance(cfg, 1e-12);
  const long nodes = integer(p, "nodes", 256);
  if (nodes < 4 || nodes % 2) bad("nodes must be an even number >= 4");
  stage = "invariant_circle_ck";
  const InvariantGraph g = invariant_circle_ck(s.circle_family(), opt, int(nodes));
  Table t;
  t.columns = {"theta", "J", "f"};
  for (int i = 0; i < g.domain.size(); ++i) {
    const double f = g.values(i, 0);
    t.add({Cell::number(g.domain.node(i)(0)), Cell::number(s.j_star() + f), Cell::number(f)});
  }
  return render(t, cfg);
}

using Command = std::function<std::string(const RunConfig&, std::string&)>;

const std::map<std::string, Command>& registry() {
  static const std::map<std::string, Command> r{
      {"regimes", cmd_regimes},   {"periods", cmd_periods}, {"omega", cmd_omega},
      {"catalog", cmd_catalog},   {"birkhoff", cmd_birkhoff}, {"twist", cmd_twist},
      {"flowcmp", cmd_flowcmp},   {"invariant-circle", cmd_invariant_circle},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : registry()) n.push_back(k);
    return n;
  }();
  return names;
}

std::string run_command(const RunConfig& cfg, std::string& stage) {
  const auto it = registry().find(cfg.command);
  if (it == registry().end()) bad("unknown command '" + cfg.command + "'");
  if (cfg.format != "csv" && cfg.format != "json" && cfg.format != "svg") {
    bad("format must be csv, json or svg");
  }
  if (!(cfg.tol == 0.0 || (cfg.tol > 0.0 && cfg.tol <= 1e-2))) bad("tol must lie in (0, 1e-2]");
  if (cfg.jobs < 1) bad("jobs must be at least 1");
  return it->second(cfg, stage);
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Periodic sub-Riemannian geodesics on quotients of PSL2(R)"};
  std::string command, config_path, out_path, format;
  double tol = 0.0;
  long jobs = 0;
  std::vector<std::string> sets;
  std::string names;
  for (const auto& n : command_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("command", command, "one of: " + names)->required();
  app.add_option("--config", config_path, "flat JSON file with parameters");
  app.add_option("--out", out_path, "output file (stdout when omitted)");
  app.add_option("--format", format, "csv, json or svg");
  app.add_option("--tol", tol, "tolerance in (0, 1e-2]");
  app.add_option("--jobs", jobs, "worker threads");
  app.add_option("--set", sets, "parameter override key=value (value parsed as JSON)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kValidation;
  }

  RunConfig cfg;
  std::string stage = "configuration";
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) bad("cannot read config file " + config_path);
      json j;
      try {
        j = json::parse(f);
      } catch (const json::exception& e) {
        bad(std::string("config is not valid JSON: ") + e.what());
      }
      if (!j.is_object()) bad("config must be a flat JSON object");
      for (auto& [k, v] : j.items()) {
        if (k == "format") cfg.format = text(j, k, cfg.format);
        else if (k == "out") cfg.out = text(j, k, cfg.out);
        else if (k == "tol") cfg.tol = number(j, k, 0.0);
        else if (k == "jobs") cfg.jobs = unsigned(std::max<long>(0, integer(j, k, 1)));
        else if (k == "command") {
          if (text(j, k, command) != command) bad("config is for command " + v.dump());
        } else cfg.params[k] = v;
      }
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) bad("--set expects key=value, got '" + s + "'");
      const std::string key = s.substr(0, eq), value = s.substr(eq + 1);
      json v = json::parse(value, nullptr, false);
      cfg.params[key] = v.is_discarded() ? json(value) : v;
    }
    cfg.command = command;
    if (!format.empty()) cfg.format = format;
    if (!out_path.empty()) cfg.out = out_path;
    if (app.count("--tol")) {
      if (!(tol > 0.0)) bad("tol must lie in (0, 1e-2]");
      cfg.tol = tol;
    }
    if (app.count("--jobs")) {
      if (jobs < 1) bad("jobs must be at least 1");
      cfg.jobs = unsigned(jobs);
    }
    const std::string result = run_command(cfg, stage);
    stage = "write output";
    if (cfg.out.empty()) {
      out << result;
    } else {
      io::atomic_write(cfg.out, result);
    }
    return kOk;
  } catch (const Error& e) {
    err << cfg.command << ": " << stage << ": " << e.what() << "\n";
    return is_validation(e.code()) ? kValidation : kNumerical;
  } catch (const std::exception& e) {
    err << cfg.command << ": " << stage << ": " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace srgeo::cli
