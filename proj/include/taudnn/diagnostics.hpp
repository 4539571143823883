// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "taudnn/network.hpp"

namespace taudnn {

// Jacobian of the hidden state y^[l] with respect to the flattened
// parameters of layer j, th^[j] = (W^[j] row-major, b^[j], tau^[j]), of
// shape n_l x (n_{j+1} n_j + n_{j+1} + 1). Built by the architecture's
// layer-to-layer derivative recursion; width changes are handled by
// truncation/padding like the forward skips. Requires j < l <= L-1.
Matrix layer_derivative(const NetworkSpec& spec, const Theta& theta,
                        const Vector& u, std::size_t j, std::size_t l);

// Direct evaluation of the closed-form expression of d y^[3] / d th^[0]
// (no recursion), defined for L >= 4. Non-feedforward kinds require
// n_1 = n_2 = n_3 since the closed forms add identity blocks.
Matrix example65_closed_form(const NetworkSpec& spec, const Theta& theta,
                             const Vector& u);

struct GradFlowRow {
    std::size_t layer = 0;
    double norm = 0.0;
    std::string classification;  // "ok", "vanishing", "exploding"
};

struct GradFlowReport {
    std::vector<GradFlowRow> rows;  // one per parameterized layer 0..L-2
    double eps_vanish = 1e-8;
    double eps_explode = 1e8;
};

// Spectral norms of d y^[L-1] / d th^[j], averaged over the sample inputs,
// classified against the thresholds.
GradFlowReport gradflow_report(const NetworkSpec& spec, const Theta& theta,
                               const std::vector<Vector>& samples,
                               double eps_vanish = 1e-8, double eps_explode = 1e8);

struct PruneResult {
    NetworkSpec spec;
    Theta theta;
    std::vector<std::size_t> removed;  // hidden layer indices, ascending
};

// Removes hidden layers whose incoming step size is below threshold
// (tau^[l-1] < threshold for hidden layer l). Exact for ResNet with equal
// hidden widths and tau = 0; approximate for FractionalDnn. Hidden layer 1
// is never deleted: its skip connection is the zero map, so a small tau^[0]
// does not make it an identity, and it carries the lift from the input
// width. If the tau criterion marks every hidden layer (including layer 1),
// pruning would leave nothing and an error is raised.
PruneResult prune(const NetworkSpec& spec, const Theta& theta, double threshold);

}  // namespace taudnn
