#include "svg.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "srgeo/io.hpp"

namespace srgeo::cli {

namespace {

std::string fixed3(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
  std::string s(buf, r.ptr);
  return s == "-0.000" ? "0.000" : s;
}

double level_function(double theta, double zeta) {
  return 0.5 * zeta * zeta + std::sin(2.0 * theta);
}

}  // namespace

std::string level_set_svg(const LevelPlot& plot) {
  const double two_pi = 2.0 * std::numbers::pi;
  const int nx = plot.n_theta, ny = plot.n_zeta;
  auto px = [&](double theta) { return theta / two_pi * plot.width; };
  auto py = [&](double zeta) {
    return (plot.zeta_max - zeta) / (2.0 * plot.zeta_max) * plot.height;
  };
  auto theta_at = [&](double i) { return two_pi * i / nx; };
  auto zeta_at = [&](double j) { return -plot.zeta_max + 2.0 * plot.zeta_max * j / ny; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(plot.width) +
         "\" height=\"" + std::to_string(plot.height) + "\" viewBox=\"0 0 " +
         std::to_string(plot.width) + " " + std::to_string(plot.height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<line x1=\"0\" y1=\"" + fixed3(py(0.0)) + "\" x2=\"" + std::to_string(plot.width) +
         "\" y2=\"" + fixed3(py(0.0)) + "\" stroke=\"#bbbbbb\" stroke-width=\"0.5\"/>\n";

  for (const double level : plot.levels) {
    std::string d;
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) {
        // Corners counterclockwise from (i, j); values shifted by the level.
        const double x[4] = {double(i), double(i + 1), double(i + 1), double(i)};
        const double y[4] = {double(j), double(j), double(j + 1), double(j + 1)};
        double v[4];
        for (int c = 0; c < 4; ++c) v[c] = level_function(theta_at(x[c]), zeta_at(y[c])) - level;
        double ex[4], ey[4];
        int n = 0;
        for (int e = 0; e < 4; ++e) {
          const int a = e, b = (e + 1) % 4;
          if ((v[a] < 0.0) == (v[b] < 0.0)) continue;
          const double s = v[a] / (v[a] - v[b]);
          ex[n] = x[a] + s * (x[b] - x[a]);
          ey[n] = y[a] + s * (y[b] - y[a]);
          ++n;
        }
        for (int k = 0; k + 1 < n; k += 2) {
          d += "M" + fixed3(px(theta_at(ex[k]))) + " " + fixed3(py(zeta_at(ey[k]))) + "L" +
               fixed3(px(theta_at(ex[k + 1]))) + " " + fixed3(py(zeta_at(ey[k + 1])));
        }
      }
    }
    const bool separatrix = level == 1.0;
    out += "<path id=\"level-" + io::format_double(level) + "\" fill=\"none\" stroke=\"" +
           (separatrix ? std::string("#c0392b") : std::string("#2c3e50")) +
           "\" stroke-width=\"" + (separatrix ? "1.5" : "0.8") + "\" d=\"" + d + "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace srgeo::cli
