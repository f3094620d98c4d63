#pragma once

#include <array>
#include <cstdint>

namespace benard {

using Index = std::int64_t;

/// Shape of a structured sample array; axis 0 varies fastest.
struct Extents {
  std::array<int, 3> n{1, 1, 1};

  Index size() const { return Index(n[0]) * n[1] * n[2]; }
  Index operator()(int i, int j, int k) const {
    return i + Index(n[0]) * (j + Index(n[1]) * k);
  }
  Index operator()(const std::array<int, 3>& c) const { return (*this)(c[0], c[1], c[2]); }
  /// Stride of one step along `axis`.
  Index stride(int axis) const {
    return axis == 0 ? 1 : (axis == 1 ? Index(n[0]) : Index(n[0]) * n[1]);
  }
  bool operator==(const Extents&) const = default;
};

struct GridSettings {
  int dim = 2;
  std::array<int, 3> cells{0, 0, 1};
  std::array<double, 3> lengths{1.0, 1.0, 1.0};
};

/// Uniform staggered grid of the box [0, L0] x [0, L1] (x [0, L2]).
///
/// Scalars live at cell centers, velocity component `a` on the faces normal to
/// axis `a`, shear strains on the edges shared by two face families (the cell
/// corners in 2D). In 2D the third axis has one cell and is never
/// differentiated.
class Grid {
 public:
  Grid() = default;

  int dim() const { return dim_; }
  int cells(int axis) const { return cells_[axis]; }
  double length(int axis) const { return lengths_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  double diameter() const { return diameter_; }
  double cell_volume() const { return cell_volume_; }
  double min_spacing() const;
  /// Index of the axis carrying the buoyancy direction e3.
  int vertical_axis() const { return dim_ - 1; }

  Extents cell_extents() const { return Extents{cells_}; }
  Extents face_extents(int axis) const {
    Extents e{cells_};
    ++e.n[axis];
    return e;
  }
  /// Samples staggered along both `a` and `b`.
  Extents edge_extents(int a, int b) const {
    Extents e{cells_};
    ++e.n[a];
    ++e.n[b];
    return e;
  }

  bool operator==(const Grid&) const = default;

 private:
  friend Grid build_grid(const GridSettings& settings);

  int dim_ = 2;
  std::array<int, 3> cells_{1, 1, 1};
  std::array<double, 3> lengths_{1.0, 1.0, 1.0};
  std::array<double, 3> spacing_{1.0, 1.0, 1.0};
  double diameter_ = 0.0;
  double cell_volume_ = 0.0;
};

/// Validates settings and derives spacing and diameter. Throws ConfigError
/// naming the offending key (nx, ny, nz, lx, ly, lz, dim).
Grid build_grid(const GridSettings& settings);

}  // namespace benard
