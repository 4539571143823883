// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "taudnn/network.hpp"

namespace taudnn {

using Point3 = std::array<double, 3>;

// Manufactured divergence-free solution on the cylinder
// Omega = {x1^2 + x2^2 <= 1} x [0, 1]:
//   u(x)   = I_1(r) e_theta,           r = sqrt(x1^2 + x2^2),
//   phi(x) = (x1^2 + x2^2 + 1) / 2,
//   f(x)   = -(r I_0(r) + phi(x) I_1(r)) e_theta,
// where e_theta = (-x2, x1, 0)/r. All three vanish smoothly at r = 0.
Point3 exact_u(const Point3& x);
double exact_phi(const Point3& x);
Point3 exact_f(const Point3& x);

// n uniform points in the cylinder: (x1,x2) by rejection from [-1,1]^2,
// x3 uniform in [0,1). Deterministic per seed.
std::vector<Point3> sample_cylinder(std::size_t n, std::uint64_t seed);

// Rows (x1,x2,x3,f1,f2,f3,phi) -> (u1,u2,u3) for the given points.
Dataset assemble_dataset(const std::vector<Point3>& points);

struct MaxwellSplit {
    Dataset train;
    Dataset test;
};

// Samples n points and splits them floor(n * train_fraction) / rest.
MaxwellSplit gen_dataset(std::size_t n, std::uint64_t seed, double train_fraction = 0.8);

// resolution^2 points of a regular grid on (-1,1)^2 at x3 = 0.5, endpoints
// included, x2 varying fastest.
std::vector<Point3> extrapolation_grid(std::size_t resolution);

}  // namespace taudnn
