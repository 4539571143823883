// SPDX-License-Identifier: Apache-2.0
#include "taudnn/network.hpp"

#include <cmath>
#include <stdexcept>

#include "taudnn/activation.hpp"
#include "taudnn/special.hpp"

namespace taudnn {

std::string arch_name(ArchKind kind) {
    switch (kind) {
        case ArchKind::FeedForward: return "feedforward";
        case ArchKind::ResNet: return "resnet";
        case ArchKind::DenseNet: return "densenet";
        case ArchKind::FractionalDnn: return "fracdnn";
    }
    throw std::invalid_argument("arch_name: unknown kind");
}

ArchKind arch_from_string(const std::string& name) {
    if (name == "feedforward") return ArchKind::FeedForward;
    if (name == "resnet") return ArchKind::ResNet;
    if (name == "densenet") return ArchKind::DenseNet;
    if (name == "fracdnn") return ArchKind::FractionalDnn;
    throw std::invalid_argument("unknown architecture '" + name + "'");
}

void NetworkSpec::validate() const {
    if (widths.size() < 3)
        throw std::invalid_argument("NetworkSpec: need widths n_0..n_L with L >= 2");
    for (std::size_t w : widths)
        if (w == 0)
            throw std::invalid_argument("NetworkSpec: zero layer width");
    if (!(eta > 0.0))
        throw std::invalid_argument("NetworkSpec: eta must be > 0");
    if (kind == ArchKind::FractionalDnn && !(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("NetworkSpec: gamma must lie in (0,1)");
}

Theta theta_zeros(const NetworkSpec& spec) {
    spec.validate();
    const std::size_t L = spec.depth();
    Theta th;
    th.weights.reserve(L);
    for (std::size_t l = 0; l < L; ++l)
        th.weights.emplace_back(spec.widths[l + 1], spec.widths[l]);
    th.biases.assign(L - 1, Vector());
    for (std::size_t l = 0; l + 1 < L; ++l) th.biases[l].assign(spec.widths[l + 1], 0.0);
    th.taus.assign(L - 1, 0.0);
    return th;
}

void validate_theta(const NetworkSpec& spec, const Theta& theta) {
    const std::size_t L = spec.depth();
    if (theta.weights.size() != L || theta.biases.size() != L - 1 ||
        theta.taus.size() != L - 1)
        throw std::invalid_argument("Theta: wrong number of parameter blocks");
    for (std::size_t l = 0; l < L; ++l)
        if (theta.weights[l].rows() != spec.widths[l + 1] ||
            theta.weights[l].cols() != spec.widths[l])
            throw std::invalid_argument("Theta: weight shape mismatch");
    for (std::size_t l = 0; l + 1 < L; ++l)
        if (theta.biases[l].size() != spec.widths[l + 1])
            throw std::invalid_argument("Theta: bias length mismatch");
}

void forward_cached(const NetworkSpec& spec, const Theta& theta,
                    const L1Coefficients* frac, const Vector& u,
                    ForwardCache& cache) {
    validate_theta(spec, theta);
    const std::size_t L = spec.depth();
    if (u.size() != spec.widths[0])
        throw std::invalid_argument("forward: input width mismatch");

    const bool is_frac = spec.kind == ArchKind::FractionalDnn;
    double frac_scale = 0.0;
    if (is_frac) {
        if (frac == nullptr || frac->size() != L - 1)
            throw std::invalid_argument("forward: missing L1 coefficient table");
        for (double t : theta.taus)
            if (!(t > 0.0))
                throw std::invalid_argument("forward: FractionalDnn requires tau > 0");
        frac_scale = gamma_fn(2.0 - spec.gamma);
    }

    cache.states.resize(L + 1);
    cache.pre.resize(L - 1);
    cache.act.resize(L - 1);
    cache.dact.resize(L - 1);
    cache.states[0] = u;

    for (std::size_t l = 1; l <= L - 1; ++l) {
        const std::size_t n = spec.widths[l];
        const Matrix& W = theta.weights[l - 1];
        const Vector& b = theta.biases[l - 1];
        const double tau = theta.taus[l - 1];

        Vector& z = cache.pre[l - 1];
        matvec_into(W, cache.states[l - 1], z);
        for (std::size_t i = 0; i < n; ++i) z[i] += b[i];

        Vector& a = cache.act[l - 1];
        Vector& da = cache.dact[l - 1];
        a.resize(n);
        da.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = smooth_relu(z[i], spec.eta);
            da[i] = smooth_relu_prime(z[i], spec.eta);
        }

        Vector& y = cache.states[l];
        y.assign(n, 0.0);
        switch (spec.kind) {
            case ArchKind::FeedForward:
                for (std::size_t i = 0; i < n; ++i) y[i] = tau * a[i];
                break;
            case ArchKind::ResNet:
                // The skip into the first hidden layer is the zero map (the
                // input lift has no residual path).
                if (l > 1) add_projected(1.0, cache.states[l - 1], y);
                for (std::size_t i = 0; i < n; ++i) y[i] += tau * a[i];
                break;
            case ArchKind::DenseNet:
                for (std::size_t k = 0; k < l; ++k) add_projected(1.0, cache.states[k], y);
                for (std::size_t i = 0; i < n; ++i) y[i] += tau * a[i];
                break;
            case ArchKind::FractionalDnn: {
                add_projected(1.0, cache.states[l - 1], y);
                for (std::size_t j = 0; j + 2 <= l; ++j) {
                    const double c = frac->a(l - 1, j);
                    add_projected(-c, cache.states[j + 1], y);
                    add_projected(c, cache.states[j], y);
                }
                const double s = std::pow(tau, spec.gamma) * frac_scale;
                for (std::size_t i = 0; i < n; ++i) y[i] += s * a[i];
                break;
            }
        }
    }
    matvec_into(theta.weights[L - 1], cache.states[L - 1], cache.states[L]);
}

namespace {

Trajectory run_forward(const NetworkSpec& spec, const Theta& theta, const Vector& u) {
    spec.validate();
    ForwardCache cache;
    if (spec.kind == ArchKind::FractionalDnn) {
        TauGrid grid(theta.taus);
        L1Coefficients coeffs(grid, spec.gamma);
        forward_cached(spec, theta, &coeffs, u, cache);
    } else {
        forward_cached(spec, theta, nullptr, u, cache);
    }
    return Trajectory{std::move(cache.states)};
}

NetworkSpec with_kind(const NetworkSpec& spec, ArchKind kind) {
    NetworkSpec s = spec;
    s.kind = kind;
    return s;
}

}  // namespace

Trajectory forward_feedforward(const NetworkSpec& spec, const Theta& theta, const Vector& u) {
    return run_forward(with_kind(spec, ArchKind::FeedForward), theta, u);
}

Trajectory forward_resnet(const NetworkSpec& spec, const Theta& theta, const Vector& u) {
    return run_forward(with_kind(spec, ArchKind::ResNet), theta, u);
}

Trajectory forward_densenet(const NetworkSpec& spec, const Theta& theta, const Vector& u) {
    return run_forward(with_kind(spec, ArchKind::DenseNet), theta, u);
}

Trajectory forward_fracdnn(const NetworkSpec& spec, const Theta& theta, const Vector& u) {
    return run_forward(with_kind(spec, ArchKind::FractionalDnn), theta, u);
}

Trajectory forward(const NetworkSpec& spec, const Theta& theta, const Vector& u) {
    return run_forward(spec, theta, u);
}

Vector dataset_input(const Dataset& d, std::size_t i) {
    Vector v(d.inputs.cols());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = d.inputs(i, j);
    return v;
}

Vector dataset_target(const Dataset& d, std::size_t i) {
    Vector v(d.targets.cols());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = d.targets(i, j);
    return v;
}

Matrix predict(const NetworkSpec& spec, const Theta& theta, const Matrix& inputs) {
    spec.validate();
    validate_theta(spec, theta);
    if (inputs.cols() != spec.widths.front())
        throw std::invalid_argument("predict: input width does not match network");
    Matrix out(inputs.rows(), spec.widths.back());
    Vector x(inputs.cols());
    for (std::size_t i = 0; i < inputs.rows(); ++i) {
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = inputs(i, j);
        const Vector y = forward(spec, theta, x).states.back();
        for (std::size_t j = 0; j < y.size(); ++j) out(i, j) = y[j];
    }
    return out;
}

namespace {

Matrix take_rows(const Matrix& m, std::size_t begin, std::size_t end) {
    Matrix out(end - begin, m.cols());
    for (std::size_t i = begin; i < end; ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i - begin, j) = m(i, j);
    return out;
}

}  // namespace

std::pair<Dataset, Dataset> split_dataset(const Dataset& d, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("split_dataset: fraction must lie in (0,1)");
    const std::size_t n = d.size();
    const std::size_t n_first = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * fraction));
    if (n_first == 0 || n_first == n)
        throw std::invalid_argument("split_dataset: a part would be empty");
    Dataset first{take_rows(d.inputs, 0, n_first), take_rows(d.targets, 0, n_first)};
    Dataset second{take_rows(d.inputs, n_first, n), take_rows(d.targets, n_first, n)};
    return {std::move(first), std::move(second)};
}

}  // namespace taudnn
