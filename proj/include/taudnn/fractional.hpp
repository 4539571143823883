// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

namespace taudnn {

// Positive step-size grid tau^[0..M-1] for the non-uniform L1 discretization.
// Node times are the cumulative sums t_0 = 0, t_{j+1} = t_j + tau^[j].
// Steps below kMinTau are rejected to keep the 1/tau^[j] factors bounded.
class TauGrid {
public:
    static constexpr double kMinTau = 1e-10;

    explicit TauGrid(std::vector<double> taus);

    std::size_t size() const { return taus_.size(); }
    double operator[](std::size_t i) const { return taus_[i]; }
    const std::vector<double>& values() const { return taus_; }

    // sum_{i=a}^{b} tau^[i], inclusive; exactly 0 when a > b (empty sum).
    double span(std::size_t a, std::size_t b) const;

private:
    std::vector<double> taus_;
    std::vector<double> prefix_;  // prefix_[k] = sum of taus_[0..k-1]
};

// History weight of the left-sided L1 scheme,
//   a_{l,j} = (tau^[l])^gamma / tau^[j]
//             * [ span(j,l)^{1-gamma} - span(j+1,l)^{1-gamma} ],
// with a_{l,l} = 1 exactly. Requires j <= l < len(grid), gamma in (0,1).
double coeff_a(const TauGrid& grid, std::size_t l, std::size_t j, double gamma);

// Right-sided counterpart,
//   b_{j,l} = (tau^[l])^gamma / tau^[j]
//             * [ span(l,j)^{1-gamma} - span(l,j-1)^{1-gamma} ],
// with b_{l,l} = 1 exactly. Requires l <= j < len(grid).
double coeff_b(const TauGrid& grid, std::size_t j, std::size_t l, double gamma);

// d a_{k,j} / d tau^[l]. Zero when l lies outside [j,k] or when j = k
// (a_{k,k} is the constant 1). Requires j <= k < len(grid), l < len(grid).
double dcoeff_a_dtau(const TauGrid& grid, std::size_t k, std::size_t j,
                     std::size_t l, double gamma);

enum class CaputoSide { Left, Right };

// Non-uniform L1 approximation of the Caputo derivative of order
// gamma in (0,1). values holds y(t_0..t_M) with len(values) == len(grid)+1.
// side=Left returns approximations at t_1..t_M, side=Right at t_0..t_{M-1};
// both results have length M. Exact for piecewise-linear y.
std::vector<double> caputo_l1(const std::vector<double>& values,
                              const TauGrid& grid, double gamma,
                              CaputoSide side);

// Dense lower-triangular table of a_{l,j} for one grid, computed once per
// parameter vector and shared across samples.
class L1Coefficients {
public:
    L1Coefficients() = default;
    L1Coefficients(const TauGrid& grid, double gamma);

    std::size_t size() const { return m_; }
    double a(std::size_t l, std::size_t j) const { return a_[l * (l + 1) / 2 + j]; }

private:
    std::size_t m_ = 0;
    std::vector<double> a_;
};

}  // namespace taudnn
