// SPDX-License-Identifier: Apache-2.0
#include "taudnn/maxwell.hpp"

#include <cmath>
#include <stdexcept>

#include "taudnn/rng.hpp"
#include "taudnn/special.hpp"

namespace taudnn {

Point3 exact_u(const Point3& x) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
    if (r == 0.0) return {0.0, 0.0, 0.0};
    const double s = bessel_i(1, r) / r;  // bounded near 0: I_1(r)/r -> 1/2
    return {-s * x[1], s * x[0], 0.0};
}

double exact_phi(const Point3& x) {
    return 0.5 * (x[0] * x[0] + x[1] * x[1] + 1.0);
}

Point3 exact_f(const Point3& x) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
    if (r == 0.0) return {0.0, 0.0, 0.0};
    const double mag = r * bessel_i(0, r) + exact_phi(x) * bessel_i(1, r);
    const double s = -mag / r;
    return {-s * x[1], s * x[0], 0.0};
}

std::vector<Point3> sample_cylinder(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<Point3> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x1, x2;
        do {
            x1 = rng.uniform(-1.0, 1.0);
            x2 = rng.uniform(-1.0, 1.0);
        } while (x1 * x1 + x2 * x2 > 1.0);
        pts.push_back({x1, x2, rng.uniform(0.0, 1.0)});
    }
    return pts;
}

Dataset assemble_dataset(const std::vector<Point3>& points) {
    Dataset d;
    d.inputs = Matrix(points.size(), 7);
    d.targets = Matrix(points.size(), 3);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Point3& x = points[i];
        const Point3 f = exact_f(x);
        const Point3 u = exact_u(x);
        d.inputs(i, 0) = x[0];
        d.inputs(i, 1) = x[1];
        d.inputs(i, 2) = x[2];
        d.inputs(i, 3) = f[0];
        d.inputs(i, 4) = f[1];
        d.inputs(i, 5) = f[2];
        d.inputs(i, 6) = exact_phi(x);
        d.targets(i, 0) = u[0];
        d.targets(i, 1) = u[1];
        d.targets(i, 2) = u[2];
    }
    return d;
}

MaxwellSplit gen_dataset(std::size_t n, std::uint64_t seed, double train_fraction) {
    if (n == 0)
        throw std::invalid_argument("gen_dataset: n must be positive");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("gen_dataset: train_fraction must lie in (0,1)");
    const std::size_t n_train =
        static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction));
    if (n_train == 0 || n_train == n)
        throw std::invalid_argument("gen_dataset: split leaves an empty part");
    const std::vector<Point3> pts = sample_cylinder(n, seed);
    const std::vector<Point3> head(pts.begin(), pts.begin() + n_train);
    const std::vector<Point3> tail(pts.begin() + n_train, pts.end());
    return {assemble_dataset(head), assemble_dataset(tail)};
}

std::vector<Point3> extrapolation_grid(std::size_t resolution) {
    if (resolution < 2)
        throw std::invalid_argument("extrapolation_grid: resolution must be >= 2");
    std::vector<Point3> pts;
    pts.reserve(resolution * resolution);
    const double step = 2.0 / static_cast<double>(resolution - 1);
    for (std::size_t i = 0; i < resolution; ++i) {
        const double x1 = -1.0 + step * static_cast<double>(i);
        for (std::size_t j = 0; j < resolution; ++j) {
            const double x2 = -1.0 + step * static_cast<double>(j);
            pts.push_back({x1, x2, 0.5});
        }
    }
    return pts;
}

}  // namespace taudnn
