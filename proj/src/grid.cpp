#include "benard/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "benard/error.hpp"

namespace benard {

namespace {
constexpr const char* kCellKeys[3] = {"nx", "ny", "nz"};
constexpr const char* kLengthKeys[3] = {"lx", "ly", "lz"};
}  // namespace

double Grid::min_spacing() const {
  double h = spacing_[0];
  for (int a = 1; a < dim_; ++a) h = std::min(h, spacing_[a]);
  return h;
}

Grid build_grid(const GridSettings& settings) {
  if (settings.dim != 2 && settings.dim != 3)
    throw ConfigError("dim: must be 2 or 3, got " + std::to_string(settings.dim));
  Grid g;
  g.dim_ = settings.dim;
  double d2 = 0.0;
  double volume = 1.0;
  for (int a = 0; a < 3; ++a) {
    if (a >= settings.dim) {
      g.cells_[a] = 1;
      g.lengths_[a] = 1.0;
      g.spacing_[a] = 1.0;
      continue;
    }
    if (settings.cells[a] <= 0)
      throw ConfigError(std::string(kCellKeys[a]) + ": cell count must be positive");
    if (settings.cells[a] < 4)
      throw ConfigError(std::string(kCellKeys[a]) + ": at least 4 cells required");
    if (!(settings.lengths[a] > 0.0) || !std::isfinite(settings.lengths[a]))
      throw ConfigError(std::string(kLengthKeys[a]) + ": box length must be positive");
    g.cells_[a] = settings.cells[a];
    g.lengths_[a] = settings.lengths[a];
    g.spacing_[a] = settings.lengths[a] / settings.cells[a];
    d2 += settings.lengths[a] * settings.lengths[a];
    volume *= g.spacing_[a];
  }
  g.diameter_ = std::sqrt(d2);
  g.cell_volume_ = volume;
  return g;
}

}  // namespace benard
