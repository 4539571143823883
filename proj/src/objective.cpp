// SPDX-License-Identifier: Apache-2.0
#include "taudnn/objective.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "taudnn/parallel.hpp"

namespace taudnn {

namespace {

double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

double mse(const Matrix& preds, const Matrix& targets) {
    if (preds.rows() != targets.rows() || preds.cols() != targets.cols())
        throw std::invalid_argument("mse: shape mismatch");
    if (preds.rows() == 0)
        throw std::invalid_argument("mse: empty matrices");
    double s = 0.0;
    const double* p = preds.data();
    const double* t = targets.data();
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double d = p[i] - t[i];
        s += d * d;
    }
    return s / (2.0 * static_cast<double>(preds.rows()));
}

std::pair<double, Gradient> elastic_reg(const NetworkSpec& spec, const Theta& theta,
                                        double lambda1, double lambda2) {
    Gradient g = gradient_zeros(spec);
    double value = 0.0;
    for (std::size_t l = 0; l < theta.weights.size(); ++l) {
        const double* w = theta.weights[l].data();
        double* dw = g.dW[l].data();
        for (std::size_t i = 0; i < theta.weights[l].size(); ++i) {
            value += 0.5 * lambda1 * (w[i] * w[i] + std::fabs(w[i]));
            dw[i] = lambda1 * (w[i] + 0.5 * sign0(w[i]));
        }
    }
    for (std::size_t l = 0; l < theta.biases.size(); ++l)
        for (std::size_t i = 0; i < theta.biases[l].size(); ++i) {
            const double b = theta.biases[l][i];
            value += 0.5 * lambda1 * (b * b + std::fabs(b));
            g.db[l][i] = lambda1 * (b + 0.5 * sign0(b));
        }
    for (std::size_t l = 0; l < theta.taus.size(); ++l) {
        const double t = theta.taus[l];
        value += 0.5 * lambda2 * (t * t + std::fabs(t));
        g.dtau[l] = lambda2 * (t + 0.5 * sign0(t));
    }
    return {value, std::move(g)};
}

std::pair<double, Gradient> bias_order_penalty(const NetworkSpec& spec,
                                               const Theta& theta, double beta) {
    Gradient g = gradient_zeros(spec);
    double value = 0.0;
    for (std::size_t l = 0; l < theta.biases.size(); ++l) {
        const Vector& b = theta.biases[l];
        for (std::size_t j = 0; j + 1 < b.size(); ++j) {
            const double v = b[j] - b[j + 1];
            if (v > 0.0) {
                value += 0.5 * beta * v * v;
                g.db[l][j] += beta * v;
                g.db[l][j + 1] -= beta * v;
            }
        }
    }
    return {value, std::move(g)};
}

namespace {

// Data-term pass over the batch: sum of squared residuals, and optionally
// the summed per-sample gradients (before the 1/N scaling). Chunk partials
// are reduced in fixed chunk order.
struct DataTerm {
    double ssq = 0.0;
    Gradient grad;
    bool has_grad = false;
};

DataTerm data_term(const NetworkSpec& spec, const Theta& theta, const Dataset& data,
                   bool want_grad, FracAdjointKind kind) {
    spec.validate();
    validate_theta(spec, theta);
    if (data.size() == 0)
        throw std::invalid_argument("objective: empty dataset");
    if (data.inputs.cols() != spec.widths.front() ||
        data.targets.cols() != spec.widths.back())
        throw std::invalid_argument("objective: dataset width mismatch");
    if (want_grad && spec.kind == ArchKind::DenseNet)
        throw std::invalid_argument("objective: DenseNet is not trainable (no adjoint)");

    const bool is_frac = spec.kind == ArchKind::FractionalDnn;
    FracContext ctx;
    if (is_frac) ctx = make_frac_context(spec, theta);
    const FracContext* fctx = is_frac ? &ctx : nullptr;

    const std::size_t n = data.size();
    const std::size_t chunks = chunk_count(n);
    std::vector<double> ssq(chunks, 0.0);
    std::vector<Gradient> partial;
    if (want_grad) partial.assign(chunks, gradient_zeros(spec));

    for_each_chunk(n, [&](std::size_t c, std::size_t begin, std::size_t end) {
        ForwardCache cache;
        std::vector<Vector> phis;
        Vector u, target, residual;
        double local = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            u.resize(data.inputs.cols());
            for (std::size_t j = 0; j < u.size(); ++j) u[j] = data.inputs(i, j);
            forward_cached(spec, theta, is_frac ? &fctx->coeffs : nullptr, u, cache);
            const Vector& out = cache.states.back();
            residual.resize(out.size());
            for (std::size_t j = 0; j < out.size(); ++j)
                residual[j] = out[j] - data.targets(i, j);
            local += norm2_sq(residual);
            if (want_grad) {
                adjoint_cached(spec, theta, fctx, kind, cache, residual, phis);
                accumulate_grads_cached(spec, theta, fctx, cache, phis, partial[c]);
            }
        }
        ssq[c] = local;
    });

    DataTerm out;
    for (double s : ssq) out.ssq += s;
    if (want_grad) {
        out.grad = gradient_zeros(spec);
        for (const Gradient& p : partial) gradient_axpy(1.0, p, out.grad);
        out.has_grad = true;
    }
    return out;
}

}  // namespace

ObjectiveValue objective_value(const NetworkSpec& spec, const Theta& theta,
                               const Dataset& data, const ObjectiveConfig& cfg) {
    const DataTerm dt = data_term(spec, theta, data, false, FracAdjointKind::Dto);
    ObjectiveValue v;
    v.mse = dt.ssq / (2.0 * static_cast<double>(data.size()));
    v.total = v.mse + elastic_reg(spec, theta, cfg.lambda1, cfg.lambda2).first;
    if (cfg.bias_ordering) v.total += bias_order_penalty(spec, theta, cfg.beta).first;
    return v;
}

ObjectiveEval objective_with_gradient(const NetworkSpec& spec, const Theta& theta,
                                      const Dataset& data, const ObjectiveConfig& cfg,
                                      FracAdjointKind kind) {
    DataTerm dt = data_term(spec, theta, data, true, kind);
    const double inv_n = 1.0 / static_cast<double>(data.size());
    ObjectiveEval ev;
    ev.mse = 0.5 * dt.ssq * inv_n;
    ev.grad = std::move(dt.grad);
    gradient_scale(ev.grad, inv_n);
    ev.total = ev.mse;

    auto reg = elastic_reg(spec, theta, cfg.lambda1, cfg.lambda2);
    ev.total += reg.first;
    gradient_axpy(1.0, reg.second, ev.grad);
    if (cfg.bias_ordering) {
        auto pen = bias_order_penalty(spec, theta, cfg.beta);
        ev.total += pen.first;
        gradient_axpy(1.0, pen.second, ev.grad);
    }
    return ev;
}

std::pair<double, Gradient> total_objective(const NetworkSpec& spec, const Theta& theta,
                                            const Dataset& data, const ObjectiveConfig& cfg) {
    ObjectiveEval ev = objective_with_gradient(spec, theta, data, cfg);
    return {ev.total, std::move(ev.grad)};
}

RelativeError relative_error(const Matrix& preds, const Matrix& targets) {
    if (preds.rows() != targets.rows() || preds.cols() != targets.cols())
        throw std::invalid_argument("relative_error: shape mismatch");
    if (preds.rows() == 0) throw std::invalid_argument("relative_error: empty data");
    double num = 0.0, den = 0.0, mean = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < preds.rows(); ++i) {
        double ni = 0.0, di = 0.0;
        for (std::size_t j = 0; j < preds.cols(); ++j) {
            const double e = preds(i, j) - targets(i, j);
            ni += e * e;
            di += targets(i, j) * targets(i, j);
        }
        num += ni;
        den += di;
        if (di > 0.0) {
            mean += std::sqrt(ni / di);
            ++counted;
        }
    }
    if (den == 0.0) throw std::invalid_argument("relative_error: zero targets");
    RelativeError out;
    out.global = std::sqrt(num / den);
    out.per_sample_mean = counted ? mean / static_cast<double>(counted) : 0.0;
    return out;
}

}  // namespace taudnn
