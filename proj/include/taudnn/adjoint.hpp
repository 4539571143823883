// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "taudnn/fractional.hpp"
#include "taudnn/linalg.hpp"
#include "taudnn/network.hpp"

namespace taudnn {

// Adjoint states phi^[1..L]; slot 0 is kept empty so indices align with the
// forward trajectory.
struct AdjointTrajectory {
    std::vector<Vector> phis;
    const Vector& phi(std::size_t l) const { return phis[l]; }
};

// Objective gradient, mirroring Theta's shapes.
struct Gradient {
    std::vector<Matrix> dW;
    std::vector<Vector> db;
    std::vector<double> dtau;
};

Gradient gradient_zeros(const NetworkSpec& spec);
void gradient_axpy(double alpha, const Gradient& x, Gradient& y);
void gradient_scale(Gradient& g, double alpha);
double gradient_sq_norm(const Gradient& g);
double gradient_block_norm_W(const Gradient& g);
double gradient_block_norm_b(const Gradient& g);
double gradient_block_norm_tau(const Gradient& g);

// Which discrete adjoint to use for the fractional network. The
// discretize-then-optimize system is the exact transpose of the implemented
// forward and is the one trained with; optimize-then-discretize discretizes
// the continuous adjoint instead and does not match finite differences on
// non-equidistant grids. It is kept for demonstrating that mismatch.
enum class FracAdjointKind { Dto, Otd };

// Per-parameter-vector context for fractional backpropagation: the forward
// coefficient table plus tau powers and the full table of coefficient
// derivatives d a_{k,j} / d tau^[l], all independent of the sample.
struct FracContext {
    L1Coefficients coeffs;
    double gamma_factor = 0.0;       // Gamma(2 - gamma)
    std::vector<double> pow_tau;     // (tau^[l])^gamma
    std::vector<double> dpow_tau;    // gamma (tau^[l])^(gamma-1)
    std::vector<double> dcoeff;      // [(l*m + k)*m + j] = d a_{k,j}/d tau^[l]
    std::size_t m = 0;

    double dA(std::size_t l, std::size_t k, std::size_t j) const {
        return dcoeff[(l * m + k) * m + j];
    }
};

FracContext make_frac_context(const NetworkSpec& spec, const Theta& theta);

// Core passes working on a populated ForwardCache; phis gets L+1 slots.
// frac is required for FractionalDnn and ignored otherwise.
void adjoint_cached(const NetworkSpec& spec, const Theta& theta,
                    const FracContext* frac, FracAdjointKind kind,
                    const ForwardCache& cache, const Vector& phi_L,
                    std::vector<Vector>& phis);

// Adds this sample's objective gradient (with phi scaled as provided) into
// `into`. Summation order is fixed, so batch results are reproducible.
void accumulate_grads_cached(const NetworkSpec& spec, const Theta& theta,
                             const FracContext* frac, const ForwardCache& cache,
                             const std::vector<Vector>& phis, Gradient& into);

AdjointTrajectory adjoint_feedforward(const NetworkSpec& spec, const Theta& theta,
                                      const Trajectory& traj, const Vector& phi_L);
AdjointTrajectory adjoint_resnet(const NetworkSpec& spec, const Theta& theta,
                                 const Trajectory& traj, const Vector& phi_L);
AdjointTrajectory adjoint_fracdnn_dto(const NetworkSpec& spec, const Theta& theta,
                                      const Trajectory& traj, const Vector& phi_L);
AdjointTrajectory adjoint_fracdnn_otd(const NetworkSpec& spec, const Theta& theta,
                                      const Trajectory& traj, const Vector& phi_L);

Gradient grads_feedforward(const NetworkSpec& spec, const Theta& theta,
                           const Trajectory& traj, const AdjointTrajectory& adj);
Gradient grads_resnet(const NetworkSpec& spec, const Theta& theta,
                      const Trajectory& traj, const AdjointTrajectory& adj);
Gradient grads_fracdnn(const NetworkSpec& spec, const Theta& theta,
                       const Trajectory& traj, const AdjointTrajectory& adj);

// Central finite differences of an arbitrary scalar function of Theta.
// Step per coordinate is h_rel * max(1, |coordinate|); tau coordinates cap
// the step to keep tau - h positive.
Gradient fd_gradient(const std::function<double(const Theta&)>& f,
                     const Theta& theta, double h_rel = 1e-6);

}  // namespace taudnn
