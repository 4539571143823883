// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "taudnn/objective.hpp"

namespace taudnn {

struct TrainConfig {
    std::size_t max_steps = 1000;
    double armijo_c = 1e-4;
    double shrink = 0.5;
    double init_step = 1.0;
    double alpha_max = 1024.0;  // warm-start cap used by train()
    std::optional<double> tau_min;  // default: 1e-6 for FractionalDnn, 0 otherwise
    double tau_max = 10.0;
    bool train_taus = true;
    std::uint64_t seed = 0;
};

double resolved_tau_min(const TrainConfig& cfg, ArchKind kind);

// Thrown when Armijo backtracking fails to find sufficient decrease within
// 60 halvings; carries the iterate the search was stuck at.
class StagnationError : public std::runtime_error {
public:
    StagnationError(const std::string& msg, Theta theta)
        : std::runtime_error(msg), theta_(std::move(theta)) {}
    const Theta& theta() const { return theta_; }

private:
    Theta theta_;
};

// Uniform W in (-s, s) with s = sqrt(2 / fan_in), zero biases, tau = 1.
Theta init_theta(const NetworkSpec& spec, const TrainConfig& cfg);

struct StepOutcome {
    Theta theta;
    double alpha = 0.0;  // accepted step length
    double J = 0.0;      // objective at the new iterate
    double mse = 0.0;
};

// One steepest-descent step with Armijo backtracking starting at alpha0 and
// tau clipped into [tau_min, tau_max] after each trial move. J0/grad must be
// the objective value and gradient at theta. Throws StagnationError after 60
// failed halvings. A zero gradient returns theta unchanged with
// alpha = cfg.init_step.
StepOutcome line_search_step(const NetworkSpec& spec, const Theta& theta,
                             const Dataset& data, const TrainConfig& cfg,
                             const ObjectiveConfig& ocfg, double J0,
                             const Gradient& grad, double alpha0);

// Same, evaluating the objective and gradient internally.
StepOutcome descent_step(const NetworkSpec& spec, const Theta& theta,
                         const Dataset& data, const TrainConfig& cfg,
                         const ObjectiveConfig& ocfg);

struct StepRecord {
    std::size_t step = 0;  // 1-based
    double J = 0.0;        // objective after the step
    double mse = 0.0;
    double alpha = 0.0;
    std::vector<double> taus;
    double gnorm_W = 0.0;  // gradient block norms at the new iterate
    double gnorm_b = 0.0;
    double gnorm_tau = 0.0;
};

struct TrainResult {
    Theta theta;
    std::vector<StepRecord> record;
    bool stagnated = false;
    double final_J = 0.0;
    double final_mse = 0.0;
};

// Full-batch steepest descent for max_steps accepted steps (or until the
// line search stagnates or the gradient vanishes). The accepted J sequence
// is non-increasing. Each step's backtracking warm-starts at twice the
// previously accepted alpha, capped by alpha_max. With train_taus = false
// the tau block of every gradient is zeroed (taus stay at their initial
// values). Deterministic for a fixed config.
TrainResult train(const NetworkSpec& spec, const Dataset& data,
                  const TrainConfig& cfg, const ObjectiveConfig& ocfg);

}  // namespace taudnn
