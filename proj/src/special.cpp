// SPDX-License-Identifier: Apache-2.0
#include "taudnn/special.hpp"

#include <cmath>
#include <stdexcept>

namespace taudnn {

namespace {

// Lanczos coefficients for g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

double lanczos_core(double x) {
    // Valid for x >= 0.5.
    const double z = x - 1.0;
    double acc = kLanczos[0];
    for (int k = 1; k < 9; ++k) acc += kLanczos[k] / (z + k);
    const double t = z + kLanczosG + 0.5;
    const double sqrt_two_pi = 2.5066282746310002;
    return sqrt_two_pi * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

}  // namespace

double gamma_fn(double x) {
    if (!(x > 0.0))
        throw std::domain_error("gamma_fn: requires x > 0");
    if (x < 0.5) {
        // Reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x)).
        const double pi = 3.141592653589793238462643383279502884;
        return pi / (std::sin(pi * x) * lanczos_core(1.0 - x));
    }
    return lanczos_core(x);
}

double bessel_i(int order, double x) {
    if (order != 0 && order != 1)
        throw std::invalid_argument("bessel_i: order must be 0 or 1");
    if (x < 0.0)
        throw std::domain_error("bessel_i: requires x >= 0");
    const double q = 0.25 * x * x;  // (x/2)^2
    // term_k = (x/2)^(2k + order) / (k! (k + order)!)
    double term = (order == 0) ? 1.0 : 0.5 * x;
    double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * (k + order));
        sum += term;
        if (term < 1e-16 * sum) break;
    }
    return sum;
}

}  // namespace taudnn
