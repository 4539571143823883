// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "taudnn/fractional.hpp"
#include "taudnn/linalg.hpp"

namespace taudnn {

enum class ArchKind { FeedForward, ResNet, DenseNet, FractionalDnn };

std::string arch_name(ArchKind kind);
ArchKind arch_from_string(const std::string& name);

// Layer widths n_0..n_L plus the scalar hyperparameters shared by all
// architectures. L = widths.size() - 1 >= 2: at least one hidden layer, a
// network input and a linear output layer.
struct NetworkSpec {
    ArchKind kind = ArchKind::ResNet;
    std::vector<std::size_t> widths;
    double gamma = 0.5;  // fractional order, used only by FractionalDnn
    double eta = 1e-4;   // activation smoothing half-width

    std::size_t depth() const { return widths.size() - 1; }
    void validate() const;  // throws std::invalid_argument
};

// Trainable parameters. weights[l] is W^[l] of shape n_{l+1} x n_l for
// l = 0..L-1 (the last one is the linear output map); biases[l] and taus[l]
// exist for the hidden updates l = 0..L-2 only.
struct Theta {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
    std::vector<double> taus;
};

Theta theta_zeros(const NetworkSpec& spec);
void validate_theta(const NetworkSpec& spec, const Theta& theta);

// Forward states y^[0..L].
struct Trajectory {
    std::vector<Vector> states;
};

// Forward state plus the cached hidden pre-activations z^[l] = W^[l]y^[l] +
// b^[l] and sigma(z), sigma'(z) for l = 0..L-2, reused by the adjoint pass.
// Buffers are reusable across samples without reallocation.
struct ForwardCache {
    std::vector<Vector> states;  // y^[0..L]
    std::vector<Vector> pre;     // z^[0..L-2]
    std::vector<Vector> act;     // sigma(z^[0..L-2])
    std::vector<Vector> dact;    // sigma'(z^[0..L-2])
};

// Core forward evaluation. frac must point at the L1 coefficient table built
// from theta.taus when spec.kind == FractionalDnn and is ignored otherwise.
void forward_cached(const NetworkSpec& spec, const Theta& theta,
                    const L1Coefficients* frac, const Vector& u,
                    ForwardCache& cache);

Trajectory forward_feedforward(const NetworkSpec& spec, const Theta& theta, const Vector& u);
Trajectory forward_resnet(const NetworkSpec& spec, const Theta& theta, const Vector& u);
Trajectory forward_densenet(const NetworkSpec& spec, const Theta& theta, const Vector& u);
Trajectory forward_fracdnn(const NetworkSpec& spec, const Theta& theta, const Vector& u);

// Dispatch on spec.kind.
Trajectory forward(const NetworkSpec& spec, const Theta& theta, const Vector& u);

// Paired input/target rows for N samples.
struct Dataset {
    Matrix inputs;   // N x n_0
    Matrix targets;  // N x n_L
    std::size_t size() const { return inputs.rows(); }
};

Vector dataset_input(const Dataset& d, std::size_t i);
Vector dataset_target(const Dataset& d, std::size_t i);

// Network outputs y^[L] for every input row.
Matrix predict(const NetworkSpec& spec, const Theta& theta, const Matrix& inputs);

// First floor(size * fraction) rows / remaining rows. Both parts must be
// nonempty.
std::pair<Dataset, Dataset> split_dataset(const Dataset& d, double fraction);

}  // namespace taudnn
