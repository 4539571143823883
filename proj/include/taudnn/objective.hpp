// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>

#include "taudnn/adjoint.hpp"
#include "taudnn/network.hpp"

namespace taudnn {

// Regularization and penalty settings of the training objective
//   J = mse + elastic(W, b; lambda1) + elastic(tau; lambda2)
//       + bias ordering penalty (beta, if enabled).
struct ObjectiveConfig {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double beta = 10.0;
    bool bias_ordering = false;
};

// (1 / 2N) sum_i ||pred_i - target_i||^2 over matching N x n matrices.
double mse(const Matrix& preds, const Matrix& targets);

// Elastic-net term (lambda1/2) sum_l (||W^[l]||_2^2 + ||W^[l]||_1)
// + same for biases + (lambda2/2) sum_l (tau_l^2 + |tau_l|), together with
// its subgradient using sign(0) = 0.
std::pair<double, Gradient> elastic_reg(const NetworkSpec& spec, const Theta& theta,
                                        double lambda1, double lambda2);

// Quadratic hinge on decreasing bias pairs:
// (beta/2) sum_l sum_j max(0, b_j - b_{j+1})^2 within each bias vector.
std::pair<double, Gradient> bias_order_penalty(const NetworkSpec& spec,
                                               const Theta& theta, double beta);

struct ObjectiveValue {
    double total = 0.0;
    double mse = 0.0;
};

// Value-only evaluation (used by the line search); works for every
// architecture including DenseNet.
ObjectiveValue objective_value(const NetworkSpec& spec, const Theta& theta,
                               const Dataset& data, const ObjectiveConfig& cfg);

struct ObjectiveEval {
    double total = 0.0;
    double mse = 0.0;
    Gradient grad;
};

// Value and full gradient via one adjoint sweep per sample. DenseNet has no
// adjoint system and is rejected. The per-sample reduction order is fixed,
// so results are bit-reproducible.
ObjectiveEval objective_with_gradient(const NetworkSpec& spec, const Theta& theta,
                                      const Dataset& data, const ObjectiveConfig& cfg,
                                      FracAdjointKind kind = FracAdjointKind::Dto);

// Convenience wrapper returning (J, grad).
std::pair<double, Gradient> total_objective(const NetworkSpec& spec, const Theta& theta,
                                            const Dataset& data, const ObjectiveConfig& cfg);

struct RelativeError {
    // ||preds - targets||_2 / ||targets||_2 over the flattened matrices.
    double global = 0.0;
    // Mean over rows of ||pred_i - target_i|| / ||target_i|| (rows with a
    // zero target are skipped).
    double per_sample_mean = 0.0;
};

RelativeError relative_error(const Matrix& preds, const Matrix& targets);

}  // namespace taudnn
