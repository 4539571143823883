// SPDX-License-Identifier: Apache-2.0
#include "taudnn/fractional.hpp"

#include <cmath>
#include <stdexcept>

#include "taudnn/special.hpp"

namespace taudnn {

namespace {

void check_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::domain_error("fractional: gamma must lie in (0,1)");
}

}  // namespace

TauGrid::TauGrid(std::vector<double> taus) : taus_(std::move(taus)) {
    if (taus_.empty())
        throw std::invalid_argument("TauGrid: empty grid");
    for (double t : taus_)
        if (!(t >= kMinTau))
            throw std::invalid_argument("TauGrid: step below minimum admissible value");
    prefix_.resize(taus_.size() + 1);
    prefix_[0] = 0.0;
    for (std::size_t i = 0; i < taus_.size(); ++i) prefix_[i + 1] = prefix_[i] + taus_[i];
}

double TauGrid::span(std::size_t a, std::size_t b) const {
    if (a > b) return 0.0;
    if (b >= taus_.size())
        throw std::out_of_range("TauGrid::span: index out of range");
    return prefix_[b + 1] - prefix_[a];
}

double coeff_a(const TauGrid& grid, std::size_t l, std::size_t j, double gamma) {
    check_gamma(gamma);
    if (j > l || l >= grid.size())
        throw std::out_of_range("coeff_a: requires j <= l < len(grid)");
    if (j == l) return 1.0;
    const double e = 1.0 - gamma;
    const double head = std::pow(grid.span(j, l), e);
    const double tail = std::pow(grid.span(j + 1, l), e);
    return std::pow(grid[l], gamma) / grid[j] * (head - tail);
}

double coeff_b(const TauGrid& grid, std::size_t j, std::size_t l, double gamma) {
    check_gamma(gamma);
    if (l > j || j >= grid.size())
        throw std::out_of_range("coeff_b: requires l <= j < len(grid)");
    if (j == l) return 1.0;
    const double e = 1.0 - gamma;
    const double head = std::pow(grid.span(l, j), e);
    const double tail = std::pow(grid.span(l, j - 1), e);
    return std::pow(grid[l], gamma) / grid[j] * (head - tail);
}

double dcoeff_a_dtau(const TauGrid& grid, std::size_t k, std::size_t j,
                     std::size_t l, double gamma) {
    check_gamma(gamma);
    if (j > k || k >= grid.size() || l >= grid.size())
        throw std::out_of_range("dcoeff_a_dtau: index out of range");
    if (l < j || l > k || j == k) return 0.0;

    const double e = 1.0 - gamma;
    const double A = grid.span(j, k);      // contains tau^[l]
    const double B = grid.span(j + 1, k);  // contains tau^[l] iff l > j
    if (l == k) {
        // d/d tau^[k] hits both the prefactor (tau^[k])^gamma and both spans.
        return e * std::pow(grid[k], gamma) / grid[j] *
                   (std::pow(A, -gamma) - std::pow(B, -gamma)) +
               gamma * std::pow(grid[k], gamma - 1.0) / grid[j] *
                   (std::pow(A, e) - std::pow(B, e));
    }
    if (l == j) {
        // d/d tau^[j] hits the 1/tau^[j] factor and the leading span only.
        return std::pow(grid[k], gamma) / (grid[j] * grid[j]) *
                   (std::pow(B, e) - std::pow(A, e)) +
               e * std::pow(grid[k], gamma) / grid[j] * std::pow(A, -gamma);
    }
    // j < l < k: only the spans depend on tau^[l], both with unit slope.
    return e * std::pow(grid[k], gamma) / grid[j] *
           (std::pow(A, -gamma) - std::pow(B, -gamma));
}

std::vector<double> caputo_l1(const std::vector<double>& values,
                              const TauGrid& grid, double gamma,
                              CaputoSide side) {
    check_gamma(gamma);
    const std::size_t m = grid.size();
    if (values.size() != m + 1)
        throw std::invalid_argument("caputo_l1: len(values) must equal len(grid)+1");
    const double c = 1.0 / gamma_fn(2.0 - gamma);
    const double e = 1.0 - gamma;
    std::vector<double> out(m, 0.0);
    if (side == CaputoSide::Left) {
        for (std::size_t l = 0; l < m; ++l) {
            double s = 0.0;
            for (std::size_t j = 0; j <= l; ++j) {
                const double w =
                    (std::pow(grid.span(j, l), e) - std::pow(grid.span(j + 1, l), e)) / grid[j];
                s += w * (values[j + 1] - values[j]);
            }
            out[l] = c * s;  // value at t_{l+1}
        }
    } else {
        for (std::size_t l = 0; l < m; ++l) {
            double s = 0.0;
            for (std::size_t j = l; j < m; ++j) {
                const double head = std::pow(grid.span(l, j), e);
                const double tail = (j == 0) ? 0.0 : std::pow(grid.span(l, j - 1), e);
                s += (head - tail) / grid[j] * (values[j + 1] - values[j]);
            }
            out[l] = -c * s;  // value at t_l
        }
    }
    return out;
}

L1Coefficients::L1Coefficients(const TauGrid& grid, double gamma) : m_(grid.size()) {
    a_.resize(m_ * (m_ + 1) / 2);
    for (std::size_t l = 0; l < m_; ++l)
        for (std::size_t j = 0; j <= l; ++j)
            a_[l * (l + 1) / 2 + j] = coeff_a(grid, l, j, gamma);
}

}  // namespace taudnn
