#pragma once

#include <string>
#include <vector>

namespace srgeo::cli {

struct LevelPlot {
  std::vector<double> levels{-0.5, 0.0, 0.5, 1.0, 2.0, 4.0};
  double zeta_max = 3.0;
  int n_theta = 240;
  int n_zeta = 160;
  int width = 720;
  int height = 480;
};

/// Contours of 1/2 zeta^2 + sin(2 theta) on [0, 2 pi) x [-zeta_max, zeta_max]
/// by marching squares. Each level is one <path> with id "level-<value>".
std::string level_set_svg(const LevelPlot& plot);

}  // namespace srgeo::cli
