// SPDX-License-Identifier: Apache-2.0
#include "taudnn/activation.hpp"

#include <stdexcept>

namespace taudnn {

double smooth_relu(double y, double eta) {
    if (!(eta > 0.0))
        throw std::invalid_argument("smooth_relu: eta must be > 0");
    if (y > eta) return y;
    if (y < -eta) return 0.0;
    return y * y / (4.0 * eta) + 0.5 * y + 0.25 * eta;
}

double smooth_relu_prime(double y, double eta) {
    if (!(eta > 0.0))
        throw std::invalid_argument("smooth_relu_prime: eta must be > 0");
    if (y > eta) return 1.0;
    if (y < -eta) return 0.0;
    return y / (2.0 * eta) + 0.5;
}

}  // namespace taudnn
