#pragma once

#include <cmath>
#include <numbers>

#include "benard/fields.hpp"
#include "benard/grid.hpp"
#include "benard/operators.hpp"

namespace testing {

using namespace benard;

inline constexpr double pi = std::numbers::pi;

inline Grid unit_square(int n) { return build_grid({2, {n, n, 1}, {1.0, 1.0, 1.0}}); }

/// f sampled at cell centers.
template <class Fn>
ScalarField cells(const Grid& g, Fn&& fn, BoundaryKind kind = BoundaryKind::None) {
  ScalarField f(g, kind);
  detail::for_each_sample(g.cell_extents(), [&](const std::array<int, 3>& c, Index idx) {
    f.values()[idx] = fn((c[0] + 0.5) * g.spacing(0), (c[1] + 0.5) * g.spacing(1));
  });
  return f;
}

/// fn(axis, x, y) sampled at face centers.
template <class Fn>
VectorField faces(const Grid& g, Fn&& fn, VelocityBoundary kind = VelocityBoundary::None) {
  VectorField u(g, kind);
  for (int a = 0; a < g.dim(); ++a)
    detail::for_each_sample(g.face_extents(a), [&](const std::array<int, 3>& c, Index idx) {
      const double x = a == 0 ? c[0] * g.spacing(0) : (c[0] + 0.5) * g.spacing(0);
      const double y = a == 1 ? c[1] * g.spacing(1) : (c[1] + 0.5) * g.spacing(1);
      u.component(a)[idx] = fn(a, x, y);
    });
  return u;
}

inline ScalarField eigenmode(const Grid& g) {
  return cells(g, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); },
               BoundaryKind::DirichletZero);
}

}  // namespace testing
