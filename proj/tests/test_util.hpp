// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "taudnn/adjoint.hpp"
#include "taudnn/network.hpp"
#include "taudnn/rng.hpp"

namespace testutil {

using namespace taudnn;

inline Theta random_theta(const NetworkSpec& spec, SplitMix64& rng,
                          double w_scale = 0.7, double b_scale = 0.3,
                          double tau_lo = 0.3, double tau_hi = 1.2) {
    Theta th = theta_zeros(spec);
    for (Matrix& W : th.weights)
        for (std::size_t i = 0; i < W.size(); ++i)
            W.data()[i] = rng.uniform(-w_scale, w_scale);
    for (Vector& b : th.biases)
        for (double& v : b) v = rng.uniform(-b_scale, b_scale);
    for (double& t : th.taus) t = rng.uniform(tau_lo, tau_hi);
    return th;
}

inline Dataset random_dataset(const NetworkSpec& spec, std::size_t n,
                              SplitMix64& rng) {
    Dataset d{Matrix(n, spec.widths.front()), Matrix(n, spec.widths.back())};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < spec.widths.front(); ++j)
            d.inputs(i, j) = rng.uniform(-1.0, 1.0);
        for (std::size_t j = 0; j < spec.widths.back(); ++j)
            d.targets(i, j) = rng.uniform(-1.0, 1.0);
    }
    return d;
}

struct BlockErrors {
    double W = 0.0, b = 0.0, tau = 0.0;
    double max() const { return std::max(W, std::max(b, tau)); }
};

// Relative l-infinity error per parameter block: ||g - ref||_inf / ||ref||_inf
// (absolute when the reference block vanishes).
inline BlockErrors block_errors(const Gradient& g, const Gradient& ref) {
    auto rel = [](double diff, double den) { return den > 0.0 ? diff / den : diff; };
    double nW = 0.0, dW = 0.0, nb = 0.0, db = 0.0, nt = 0.0, dt = 0.0;
    for (std::size_t l = 0; l < g.dW.size(); ++l)
        for (std::size_t i = 0; i < g.dW[l].size(); ++i) {
            nW = std::max(nW, std::fabs(g.dW[l].data()[i] - ref.dW[l].data()[i]));
            dW = std::max(dW, std::fabs(ref.dW[l].data()[i]));
        }
    for (std::size_t l = 0; l < g.db.size(); ++l)
        for (std::size_t i = 0; i < g.db[l].size(); ++i) {
            nb = std::max(nb, std::fabs(g.db[l][i] - ref.db[l][i]));
            db = std::max(db, std::fabs(ref.db[l][i]));
        }
    for (std::size_t l = 0; l < g.dtau.size(); ++l) {
        nt = std::max(nt, std::fabs(g.dtau[l] - ref.dtau[l]));
        dt = std::max(dt, std::fabs(ref.dtau[l]));
    }
    return {rel(nW, dW), rel(nb, db), rel(nt, dt)};
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
    return m;
}

inline double max_abs(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a.data()[i]));
    return m;
}

}  // namespace testutil
