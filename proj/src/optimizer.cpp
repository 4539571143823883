// SPDX-License-Identifier: Apache-2.0
#include "taudnn/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "taudnn/rng.hpp"

namespace taudnn {

namespace {

constexpr int kMaxHalvings = 60;

void clip_taus(Theta& theta, double tau_min, double tau_max) {
    for (double& t : theta.taus) t = std::clamp(t, tau_min, tau_max);
}

void apply_step(const Theta& theta, const Gradient& g, double alpha,
                double tau_min, double tau_max, Theta& out) {
    out = theta;
    for (std::size_t l = 0; l < out.weights.size(); ++l) {
        double* w = out.weights[l].data();
        const double* dw = g.dW[l].data();
        for (std::size_t i = 0; i < out.weights[l].size(); ++i) w[i] -= alpha * dw[i];
    }
    for (std::size_t l = 0; l < out.biases.size(); ++l)
        axpy(-alpha, g.db[l], out.biases[l]);
    for (std::size_t l = 0; l < out.taus.size(); ++l) out.taus[l] -= alpha * g.dtau[l];
    clip_taus(out, tau_min, tau_max);
}

}  // namespace

double resolved_tau_min(const TrainConfig& cfg, ArchKind kind) {
    if (cfg.tau_min) return *cfg.tau_min;
    return kind == ArchKind::FractionalDnn ? 1e-6 : 0.0;
}

Theta init_theta(const NetworkSpec& spec, const TrainConfig& cfg) {
    spec.validate();
    Theta theta = theta_zeros(spec);
    SplitMix64 rng(cfg.seed);
    for (Matrix& W : theta.weights) {
        const double s = std::sqrt(2.0 / static_cast<double>(W.cols()));
        double* p = W.data();
        for (std::size_t i = 0; i < W.size(); ++i) p[i] = rng.uniform(-s, s);
    }
    for (double& t : theta.taus) t = 1.0;
    return theta;
}

StepOutcome line_search_step(const NetworkSpec& spec, const Theta& theta,
                             const Dataset& data, const TrainConfig& cfg,
                             const ObjectiveConfig& ocfg, double J0,
                             const Gradient& grad, double alpha0) {
    const double gsq = gradient_sq_norm(grad);
    if (gsq == 0.0) {
        StepOutcome out;
        out.theta = theta;
        out.alpha = cfg.init_step;
        out.J = J0;
        const ObjectiveValue v = objective_value(spec, theta, data, ocfg);
        out.mse = v.mse;
        return out;
    }
    const double tau_min = resolved_tau_min(cfg, spec.kind);
    double alpha = alpha0;
    Theta trial;
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
        apply_step(theta, grad, alpha, tau_min, cfg.tau_max, trial);
        const ObjectiveValue v = objective_value(spec, trial, data, ocfg);
        // Strict inequality: once alpha is tiny the sufficient-decrease bound
        // rounds to J0 itself, and a fully clipped (no-move) trial must not
        // be accepted as progress.
        if (std::isfinite(v.total) && v.total < J0 - cfg.armijo_c * alpha * gsq) {
            StepOutcome out;
            out.theta = std::move(trial);
            out.alpha = alpha;
            out.J = v.total;
            out.mse = v.mse;
            return out;
        }
        alpha *= cfg.shrink;
    }
    throw StagnationError("line search stagnated after 60 halvings", theta);
}

StepOutcome descent_step(const NetworkSpec& spec, const Theta& theta,
                         const Dataset& data, const TrainConfig& cfg,
                         const ObjectiveConfig& ocfg) {
    ObjectiveEval ev = objective_with_gradient(spec, theta, data, ocfg);
    if (!std::isfinite(ev.total))
        throw std::runtime_error("descent_step: non-finite objective");
    if (!cfg.train_taus)
        for (double& t : ev.grad.dtau) t = 0.0;
    return line_search_step(spec, theta, data, cfg, ocfg, ev.total, ev.grad,
                            cfg.init_step);
}

TrainResult train(const NetworkSpec& spec, const Dataset& data,
                  const TrainConfig& cfg, const ObjectiveConfig& ocfg) {
    spec.validate();
    TrainResult res;
    res.theta = init_theta(spec, cfg);

    ObjectiveEval ev = objective_with_gradient(spec, res.theta, data, ocfg);
    if (!std::isfinite(ev.total))
        throw std::runtime_error("train: non-finite objective at initialization");
    if (!cfg.train_taus)
        for (double& t : ev.grad.dtau) t = 0.0;
    res.final_J = ev.total;
    res.final_mse = ev.mse;
    res.record.reserve(cfg.max_steps);

    double alpha_prev = cfg.init_step;
    for (std::size_t k = 1; k <= cfg.max_steps; ++k) {
        if (gradient_sq_norm(ev.grad) == 0.0) break;
        const double alpha0 =
            (k == 1) ? cfg.init_step : std::min(cfg.alpha_max, 2.0 * alpha_prev);
        StepOutcome step;
        try {
            step = line_search_step(spec, res.theta, data, cfg, ocfg, ev.total,
                                    ev.grad, alpha0);
        } catch (const StagnationError&) {
            res.stagnated = true;
            break;
        }
        res.theta = std::move(step.theta);
        alpha_prev = step.alpha;

        ev = objective_with_gradient(spec, res.theta, data, ocfg);
        if (!cfg.train_taus)
            for (double& t : ev.grad.dtau) t = 0.0;
        res.final_J = ev.total;
        res.final_mse = ev.mse;

        StepRecord rec;
        rec.step = k;
        rec.J = ev.total;
        rec.mse = ev.mse;
        rec.alpha = step.alpha;
        rec.taus = res.theta.taus;
        rec.gnorm_W = gradient_block_norm_W(ev.grad);
        rec.gnorm_b = gradient_block_norm_b(ev.grad);
        rec.gnorm_tau = gradient_block_norm_tau(ev.grad);
        res.record.push_back(std::move(rec));
    }
    return res;
}

}  // namespace taudnn
