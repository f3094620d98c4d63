#pragma once

#include <array>
#include <cstdint>
#include <functional>

#include "benard/config.hpp"
#include "benard/fields.hpp"
#include "benard/stepper.hpp"

namespace benard {

using Point = std::array<double, 3>;

/// background + (height - background) * (1 - tanh((|x - c| - radius) / edge)) / 2.
ScalarField density_blob(const Grid& grid, const Point& center, double radius, double height,
                         double background, double edge);

/// Velocity in the (e1, e3) plane from a stream function sampled at grid
/// nodes: u_1 = d psi / d x_3, u_3 = -d psi / d x_1 by node differences, so
/// the discrete divergence vanishes identically. psi must be constant on the
/// walls for the result to be no-slip.
VectorField stream_velocity(const Grid& grid, const std::function<double(const Point&)>& psi);

/// psi = amplitude sin^2(pi x / Lx) sin^2(pi z / Lz), times sin(pi y / Ly) in 3D.
VectorField cellular_velocity(const Grid& grid, double amplitude);

/// Seeded low sine modes rescaled to max |theta| = amplitude (Dirichlet zero).
ScalarField temperature_modes(const Grid& grid, double amplitude, int max_mode, std::uint64_t seed);

/// t = 0 state of a configured run.
FluidState initial_state(const SimConfig& config);

}  // namespace benard
