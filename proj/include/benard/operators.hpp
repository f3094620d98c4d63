#pragma once

// Discrete differential operators and midpoint-rule norms on the staggered grid.
//
// Quadrature: every sample carries the volume of its dual cell clipped to the
// box, i.e. h^d times 1/2 for each axis along which the sample sits on a wall.
// Vector- and tensor-valued Lp norms are entrywise over the native staggered
// samples (for p = 2 this is the Euclidean/Frobenius norm).

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "benard/error.hpp"
#include "benard/fields.hpp"
#include "benard/grid.hpp"

namespace benard {

enum class MuAverage { Arithmetic, Harmonic };

namespace detail {

using Stagger = std::array<bool, 3>;

template <class Fn>
void for_each_sample(const Extents& e, Fn&& fn) {
  Index idx = 0;
  for (int k = 0; k < e.n[2]; ++k)
    for (int j = 0; j < e.n[1]; ++j)
      for (int i = 0; i < e.n[0]; ++i, ++idx) fn(std::array<int, 3>{i, j, k}, idx);
}

inline double sample_weight(const std::array<int, 3>& c, const Extents& e, const Stagger& s,
                            double volume) {
  double w = volume;
  for (int a = 0; a < 3; ++a)
    if (s[a] && (c[a] == 0 || c[a] == e.n[a] - 1)) w *= 0.5;
  return w;
}

inline Stagger face_stagger(int axis) {
  Stagger s{false, false, false};
  s[axis] = true;
  return s;
}

inline Stagger edge_stagger(int a, int b) {
  Stagger s{false, false, false};
  s[a] = true;
  s[b] = true;
  return s;
}

/// Accumulates sum(w |v|^p) or max |v| (p = inf) over one sample array.
template <typename Scalar>
void accumulate_power(const SampleArray<Scalar>& v, const Extents& e, const Stagger& s,
                      double volume, double p, Scalar& acc) {
  using std::abs;
  using std::pow;
  const bool inf = std::isinf(p);
  for_each_sample(e, [&](const std::array<int, 3>& c, Index idx) {
    const Scalar m = abs(v[idx]);
    if (inf) {
      if (m > acc) acc = m;
    } else if (p == 2.0) {
      acc += Scalar(sample_weight(c, e, s, volume)) * m * m;
    } else if (p == 1.0) {
      acc += Scalar(sample_weight(c, e, s, volume)) * m;
    } else {
      acc += Scalar(sample_weight(c, e, s, volume)) * Scalar(pow(m, Scalar(p)));
    }
  });
}

template <typename Scalar>
Scalar finish_power(Scalar acc, double p) {
  using std::pow;
  using std::sqrt;
  if (std::isinf(p) || p == 1.0) return acc;
  if (p == 2.0) return sqrt(acc);
  return Scalar(pow(acc, Scalar(1.0 / p)));
}

inline void check_exponent(double p) {
  if (!(p >= 1.0)) throw DomainError("lp_norm: exponent must satisfy p >= 1, got " + std::to_string(p));
}

template <typename Scalar>
Scalar average(Scalar a, Scalar b, MuAverage mode) {
  return mode == MuAverage::Arithmetic ? Scalar(0.5) * (a + b) : Scalar(2) * a * b / (a + b);
}

}  // namespace detail

/// L^p norm of a cell-centered field by the midpoint rule; p = +inf gives max |f|.
template <typename Scalar>
Scalar lp_norm(const ScalarFieldT<Scalar>& f, double p) {
  detail::check_exponent(p);
  Scalar acc(0);
  detail::accumulate_power(f.values(), f.extents(), detail::Stagger{}, f.grid().cell_volume(), p, acc);
  return detail::finish_power(acc, p);
}

/// Entrywise L^p norm of a face-centered field.
template <typename Scalar>
Scalar lp_norm(const VectorFieldT<Scalar>& u, double p) {
  detail::check_exponent(p);
  Scalar acc(0);
  for (int a = 0; a < u.dim(); ++a)
    detail::accumulate_power(u.component(a), u.extents(a), detail::face_stagger(a),
                             u.grid().cell_volume(), p, acc);
  return detail::finish_power(acc, p);
}

/// Gradient of a cell-centered field, sampled on faces.
///
/// Interior faces use the two-point central difference. Wall faces use the
/// ghost value 2b - f for Dirichlet kinds and copy the neighbouring interior
/// face for `None` (exact on linear data).
template <typename Scalar>
VectorFieldT<Scalar> gradient(const ScalarFieldT<Scalar>& f) {
  const Grid& g = f.grid();
  const Extents ce = g.cell_extents();
  VectorFieldT<Scalar> out(g, VelocityBoundary::None);
  const Scalar b = f.boundary_value();
  for (int a = 0; a < g.dim(); ++a) {
    const Extents fe = g.face_extents(a);
    const int n = g.cells(a);
    const Scalar inv_h = Scalar(1.0 / g.spacing(a));
    const Index stride = ce.stride(a);
    auto& comp = out.component(a);
    detail::for_each_sample(fe, [&](std::array<int, 3> c, Index idx) {
      const int i = c[a];
      if (i > 0 && i < n) {
        const Index hi = ce(c);
        comp[idx] = (f.values()[hi] - f.values()[hi - stride]) * inv_h;
        return;
      }
      if (f.boundary() == BoundaryKind::None) {
        c[a] = (i == 0) ? 1 : n - 1;
        const Index hi = ce(c);
        comp[idx] = (f.values()[hi] - f.values()[hi - stride]) * inv_h;
      } else if (i == 0) {
        c[a] = 0;
        comp[idx] = Scalar(2) * (f.values()[ce(c)] - b) * inv_h;
      } else {
        c[a] = n - 1;
        comp[idx] = Scalar(2) * (b - f.values()[ce(c)]) * inv_h;
      }
    });
  }
  return out;
}

/// Cell-centered divergence of a face-centered field.
template <typename Scalar>
ScalarFieldT<Scalar> divergence(const VectorFieldT<Scalar>& u) {
  const Grid& g = u.grid();
  ScalarFieldT<Scalar> out(g);
  const Extents ce = g.cell_extents();
  for (int a = 0; a < g.dim(); ++a) {
    const Extents fe = g.face_extents(a);
    const Index stride = fe.stride(a);
    const Scalar inv_h = Scalar(1.0 / g.spacing(a));
    const auto& comp = u.component(a);
    detail::for_each_sample(ce, [&](const std::array<int, 3>& c, Index idx) {
      const Index lo = fe(c);
      out.values()[idx] += (comp[lo + stride] - comp[lo]) * inv_h;
    });
  }
  return out;
}

/// divergence(gradient(f)): the standard (2d+1)-point stencil with the same
/// wall treatment as `gradient`.
template <typename Scalar>
ScalarFieldT<Scalar> laplacian(const ScalarFieldT<Scalar>& f) {
  auto out = divergence(gradient(f));
  out.set_boundary(BoundaryKind::None);
  return out;
}

/// Entrywise L^p norm of the face-centered gradient of a scalar.
template <typename Scalar>
Scalar gradient_lp_norm(const ScalarFieldT<Scalar>& f, double p) {
  return lp_norm(gradient(f), p);
}

/// Velocity gradient on the staggered layout: entry (a, c) is d u_c / d x_a.
/// Diagonal entries live at cell centers, off-diagonal ones on edge(a, c).
template <typename Scalar>
struct VelocityGradientT {
  Grid grid;
  std::array<std::array<SampleArray<Scalar>, 3>, 3> d;

  Extents extents(int a, int c) const {
    return a == c ? grid.cell_extents() : grid.edge_extents(a, c);
  }
  detail::Stagger stagger(int a, int c) const {
    return a == c ? detail::Stagger{} : detail::edge_stagger(a, c);
  }
};

using VelocityGradient = VelocityGradientT<double>;

/// Off-diagonal derivatives at walls use the no-slip ghost (-u) for
/// `VelocityBoundary::NoSlip` and copy the nearest interior edge otherwise.
template <typename Scalar>
VelocityGradientT<Scalar> velocity_gradient(const VectorFieldT<Scalar>& u) {
  const Grid& g = u.grid();
  VelocityGradientT<Scalar> out{g, {}};
  const int dim = g.dim();
  for (int c = 0; c < dim; ++c) {
    const Extents fe = g.face_extents(c);
    const auto& uc = u.component(c);
    for (int a = 0; a < dim; ++a) {
      const Scalar inv_h = Scalar(1.0 / g.spacing(a));
      const Extents ee = out.extents(a, c);
      auto& dst = out.d[a][c];
      dst.resize(ee.size());
      const Index stride = fe.stride(a);
      if (a == c) {
        detail::for_each_sample(ee, [&](const std::array<int, 3>& cc, Index idx) {
          const Index lo = fe(cc);
          dst[idx] = (uc[lo + stride] - uc[lo]) * inv_h;
        });
        continue;
      }
      const int n = g.cells(a);
      detail::for_each_sample(ee, [&](std::array<int, 3> cc, Index idx) {
        const int i = cc[a];
        if (i > 0 && i < n) {
          const Index hi = fe(cc);
          dst[idx] = (uc[hi] - uc[hi - stride]) * inv_h;
          return;
        }
        if (u.boundary() == VelocityBoundary::None) {
          cc[a] = (i == 0) ? 1 : n - 1;
          const Index hi = fe(cc);
          dst[idx] = (uc[hi] - uc[hi - stride]) * inv_h;
        } else if (i == 0) {
          cc[a] = 0;
          dst[idx] = Scalar(2) * uc[fe(cc)] * inv_h;
        } else {
          cc[a] = n - 1;
          dst[idx] = Scalar(-2) * uc[fe(cc)] * inv_h;
        }
      });
    }
  }
  return out;
}

/// Entrywise L^p norm of a velocity gradient (p = 2: Frobenius; p = inf: max entry).
template <typename Scalar>
Scalar lp_norm(const VelocityGradientT<Scalar>& du, double p) {
  detail::check_exponent(p);
  Scalar acc(0);
  const int dim = du.grid.dim();
  for (int a = 0; a < dim; ++a)
    for (int c = 0; c < dim; ++c)
      detail::accumulate_power(du.d[a][c], du.extents(a, c), du.stagger(a, c),
                               du.grid.cell_volume(), p, acc);
  return detail::finish_power(acc, p);
}

/// Density-like cell field averaged onto the faces normal to `axis`; a wall
/// face takes its only neighbour.
template <typename Scalar>
SampleArray<Scalar> face_average(const ScalarFieldT<Scalar>& f, int axis) {
  const Grid& g = f.grid();
  const Extents ce = g.cell_extents();
  const Extents fe = g.face_extents(axis);
  const int n = g.cells(axis);
  SampleArray<Scalar> out(fe.size());
  const Index stride = ce.stride(axis);
  detail::for_each_sample(fe, [&](std::array<int, 3> c, Index idx) {
    const int i = c[axis];
    if (i == 0) {
      out[idx] = f.values()[ce(c)];
    } else if (i == n) {
      c[axis] = n - 1;
      out[idx] = f.values()[ce(c)];
    } else {
      const Index hi = ce(c);
      out[idx] = Scalar(0.5) * (f.values()[hi] + f.values()[hi - stride]);
    }
  });
  return out;
}

/// Face component `axis` interpolated to cell centers.
template <typename Scalar>
SampleArray<Scalar> cell_average(const VectorFieldT<Scalar>& u, int axis) {
  const Grid& g = u.grid();
  const Extents ce = g.cell_extents();
  const Extents fe = g.face_extents(axis);
  const Index stride = fe.stride(axis);
  SampleArray<Scalar> out(ce.size());
  const auto& comp = u.component(axis);
  detail::for_each_sample(ce, [&](const std::array<int, 3>& c, Index idx) {
    const Index lo = fe(c);
    out[idx] = Scalar(0.5) * (comp[lo] + comp[lo + stride]);
  });
  return out;
}

/// Viscosity averaged from the (up to four) cells sharing edge(a, b).
template <typename Scalar>
SampleArray<Scalar> edge_average(const ScalarFieldT<Scalar>& mu, int a, int b, MuAverage mode) {
  const Grid& g = mu.grid();
  const Extents ce = g.cell_extents();
  const Extents ee = g.edge_extents(a, b);
  SampleArray<Scalar> out(ee.size());
  detail::for_each_sample(ee, [&](const std::array<int, 3>& c, Index idx) {
    Scalar sum(0);
    int count = 0;
    for (int da = -1; da <= 0; ++da) {
      for (int db = -1; db <= 0; ++db) {
        std::array<int, 3> cc = c;
        cc[a] += da;
        cc[b] += db;
        if (cc[a] < 0 || cc[a] >= g.cells(a) || cc[b] < 0 || cc[b] >= g.cells(b)) continue;
        const Scalar m = mu.values()[ce(cc)];
        sum += mode == MuAverage::Arithmetic ? m : Scalar(1) / m;
        ++count;
      }
    }
    out[idx] = mode == MuAverage::Arithmetic ? sum / Scalar(count) : Scalar(count) / sum;
  });
  return out;
}

/// Discrete dissipation integral of 2 mu |D(u)|^2, D(u) the symmetric part of
/// the velocity gradient. For no-slip fields this is exactly u . A u of the
/// assembled viscous operator.
template <typename Scalar>
Scalar deformation_dissipation(const VectorFieldT<Scalar>& u, const ScalarFieldT<Scalar>& mu,
                               MuAverage mode = MuAverage::Arithmetic) {
  require_same_grid(u, mu, "deformation_dissipation");
  if (!(mu.values().minCoeff() > Scalar(0)))
    throw ViscosityBoundError("deformation_dissipation: viscosity must be positive everywhere");
  const Grid& g = u.grid();
  const auto du = velocity_gradient(u);
  const double vol = g.cell_volume();
  Scalar total(0);
  for (int c = 0; c < g.dim(); ++c)
    total += Scalar(2 * vol) * (mu.values() * du.d[c][c].square()).sum();
  for (int a = 0; a < g.dim(); ++a) {
    for (int b = a + 1; b < g.dim(); ++b) {
      const Extents ee = g.edge_extents(a, b);
      const auto mu_e = edge_average(mu, a, b, mode);
      const auto st = detail::edge_stagger(a, b);
      detail::for_each_sample(ee, [&](const std::array<int, 3>& c, Index idx) {
        const Scalar s = du.d[a][b][idx] + du.d[b][a][idx];
        // 2 mu * 2 * (s/2)^2
        total += Scalar(detail::sample_weight(c, ee, st, vol)) * mu_e[idx] * s * s;
      });
    }
  }
  return total;
}

/// Norm pieces of the discrete H^2 probe.
struct H2Parts {
  double l2 = 0.0;
  double grad_l2 = 0.0;
  double hess_l2 = 0.0;
  double total() const { return l2 + grad_l2 + hess_l2; }
};

namespace detail {

/// First derivative along `axis` on a raw sample array: central inside,
/// second-order one-sided at both ends.
template <typename Scalar>
SampleArray<Scalar> diff1(const SampleArray<Scalar>& v, const Extents& e, int axis, double h) {
  SampleArray<Scalar> out(v.size());
  const Index s = e.stride(axis);
  const int n = e.n[axis];
  for_each_sample(e, [&](const std::array<int, 3>& c, Index idx) {
    const int i = c[axis];
    if (i == 0)
      out[idx] = (Scalar(-3) * v[idx] + Scalar(4) * v[idx + s] - v[idx + 2 * s]) / Scalar(2 * h);
    else if (i == n - 1)
      out[idx] = (Scalar(3) * v[idx] - Scalar(4) * v[idx - s] + v[idx - 2 * s]) / Scalar(2 * h);
    else
      out[idx] = (v[idx + s] - v[idx - s]) / Scalar(2 * h);
  });
  return out;
}

/// Second derivative along `axis`; end samples reuse the nearest interior stencil.
template <typename Scalar>
SampleArray<Scalar> diff2(const SampleArray<Scalar>& v, const Extents& e, int axis, double h) {
  SampleArray<Scalar> out(v.size());
  const Index s = e.stride(axis);
  const int n = e.n[axis];
  for_each_sample(e, [&](const std::array<int, 3>& c, Index idx) {
    const int i = c[axis];
    const Index mid = i == 0 ? idx + s : (i == n - 1 ? idx - s : idx);
    out[idx] = (v[mid + s] - Scalar(2) * v[mid] + v[mid - s]) / Scalar(h * h);
  });
  return out;
}

template <typename Scalar>
void accumulate_h2(const SampleArray<Scalar>& v, const Extents& e, const Stagger& st,
                   const Grid& g, H2Parts& acc2) {
  const double vol = g.cell_volume();
  Scalar s0(0), s1(0), s2(0);
  accumulate_power(v, e, st, vol, 2.0, s0);
  std::array<SampleArray<Scalar>, 3> d1;
  for (int a = 0; a < g.dim(); ++a) {
    d1[a] = diff1(v, e, a, g.spacing(a));
    accumulate_power(d1[a], e, st, vol, 2.0, s1);
  }
  for (int a = 0; a < g.dim(); ++a) {
    accumulate_power(diff2(v, e, a, g.spacing(a)), e, st, vol, 2.0, s2);
    for (int b = a + 1; b < g.dim(); ++b) {
      Scalar mixed(0);
      accumulate_power(diff1(d1[a], e, b, g.spacing(b)), e, st, vol, 2.0, mixed);
      s2 += Scalar(2) * mixed;
    }
  }
  acc2.l2 += double(s0);
  acc2.grad_l2 += double(s1);
  acc2.hess_l2 += double(s2);
}

inline H2Parts finish_h2(H2Parts sq) {
  return H2Parts{std::sqrt(sq.l2), std::sqrt(sq.grad_l2), std::sqrt(sq.hess_l2)};
}

}  // namespace detail

/// Discrete H^2 pieces ||f||, ||grad f||, ||grad^2 f|| of a cell-centered field.
template <typename Scalar>
H2Parts h2_parts(const ScalarFieldT<Scalar>& f) {
  H2Parts sq;
  detail::accumulate_h2(f.values(), f.extents(), detail::Stagger{}, f.grid(), sq);
  return detail::finish_h2(sq);
}

template <typename Scalar>
H2Parts h2_parts(const VectorFieldT<Scalar>& u) {
  H2Parts sq;
  for (int a = 0; a < u.dim(); ++a)
    detail::accumulate_h2(u.component(a), u.extents(a), detail::face_stagger(a), u.grid(), sq);
  return detail::finish_h2(sq);
}

template <typename Field>
double h2_norm(const Field& f) {
  return h2_parts(f).total();
}

/// H^1 norm ||f|| + ||grad f|| using the one-sided sample differences.
template <typename Scalar>
double h1_norm(const ScalarFieldT<Scalar>& f) {
  const auto p = h2_parts(f);
  return p.l2 + p.grad_l2;
}

}  // namespace benard
