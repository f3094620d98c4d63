#pragma once

#include <Eigen/Core>
#include <array>

#include "benard/error.hpp"
#include "benard/grid.hpp"

namespace benard {

/// Boundary metadata of a cell-centered scalar. `None` is used for the density
/// and everything derived from it, which carry no boundary condition.
enum class BoundaryKind { None, DirichletZero, DirichletValue };

/// Boundary metadata of a face-centered vector field.
enum class VelocityBoundary { NoSlip, None };

template <typename Scalar>
using SampleArray = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

/// Cell-centered scalar field.
template <typename Scalar>
class ScalarFieldT {
 public:
  using Array = SampleArray<Scalar>;

  ScalarFieldT() = default;
  explicit ScalarFieldT(const Grid& grid, BoundaryKind kind = BoundaryKind::None,
                        Scalar boundary_value = Scalar(0))
      : grid_(grid),
        kind_(kind),
        boundary_value_(boundary_value),
        values_(Array::Zero(grid.cell_extents().size())) {}

  const Grid& grid() const { return grid_; }
  Extents extents() const { return grid_.cell_extents(); }
  BoundaryKind boundary() const { return kind_; }
  void set_boundary(BoundaryKind kind, Scalar value = Scalar(0)) {
    kind_ = kind;
    boundary_value_ = value;
  }
  /// Wall value implied by the boundary kind.
  Scalar boundary_value() const {
    return kind_ == BoundaryKind::DirichletValue ? boundary_value_ : Scalar(0);
  }

  Array& values() { return values_; }
  const Array& values() const { return values_; }
  Scalar& operator()(int i, int j, int k = 0) { return values_[extents()(i, j, k)]; }
  Scalar operator()(int i, int j, int k = 0) const { return values_[extents()(i, j, k)]; }

  /// Center of cell (i, j, k) along `axis`.
  double center(int axis, int index) const { return (index + 0.5) * grid_.spacing(axis); }

 private:
  Grid grid_;
  BoundaryKind kind_ = BoundaryKind::None;
  Scalar boundary_value_ = Scalar(0);
  Array values_;
};

/// Face-centered vector field: component `a` holds one extra sample along `a`.
template <typename Scalar>
class VectorFieldT {
 public:
  using Array = SampleArray<Scalar>;

  VectorFieldT() = default;
  explicit VectorFieldT(const Grid& grid, VelocityBoundary kind = VelocityBoundary::NoSlip)
      : grid_(grid), kind_(kind) {
    for (int a = 0; a < grid.dim(); ++a)
      components_[a] = Array::Zero(grid.face_extents(a).size());
  }

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  VelocityBoundary boundary() const { return kind_; }
  void set_boundary(VelocityBoundary kind) { kind_ = kind; }
  Extents extents(int axis) const { return grid_.face_extents(axis); }

  Array& component(int axis) { return components_[axis]; }
  const Array& component(int axis) const { return components_[axis]; }

  /// Zeroes the normal component on every wall face.
  void enforce_no_slip() {
    for (int a = 0; a < dim(); ++a) {
      const Extents e = extents(a);
      for (int k = 0; k < e.n[2]; ++k)
        for (int j = 0; j < e.n[1]; ++j)
          for (int i = 0; i < e.n[0]; ++i) {
            const std::array<int, 3> c{i, j, k};
            if (c[a] == 0 || c[a] == e.n[a] - 1) components_[a][e(c)] = Scalar(0);
          }
    }
  }

 private:
  Grid grid_;
  VelocityBoundary kind_ = VelocityBoundary::NoSlip;
  std::array<Array, 3> components_;
};

using ScalarField = ScalarFieldT<double>;
using VectorField = VectorFieldT<double>;

template <typename A, typename B>
void require_same_grid(const A& a, const B& b, const char* what) {
  if (!(a.grid() == b.grid())) throw StructuralError(std::string(what) + ": fields live on different grids");
}

}  // namespace benard
