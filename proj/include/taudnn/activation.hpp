// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace taudnn {

// C^1 smoothing of max(0, y): identical to ReLU outside [-eta, eta], a
// quadratic blend y^2/(4 eta) + y/2 + eta/4 inside. eta must be > 0.
double smooth_relu(double y, double eta);

// Derivative of smooth_relu; takes values in [0, 1].
double smooth_relu_prime(double y, double eta);

}  // namespace taudnn
