// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace taudnn {

// Euler Gamma function for x > 0 (Lanczos approximation, g = 7). The code
// only ever needs arguments in (0, 3): Gamma(2 - gamma) and Gamma(3 - gamma)
// for gamma in (0, 1). Throws std::domain_error for x <= 0.
double gamma_fn(double x);

// Modified Bessel function of the first kind, order 0 or 1, by power series.
// Terms are accumulated until the next term falls below 1e-16 of the partial
// sum; intended domain is x in [0, 4]. Throws std::invalid_argument for
// orders other than 0/1 and std::domain_error for x < 0.
double bessel_i(int order, double x);

}  // namespace taudnn
