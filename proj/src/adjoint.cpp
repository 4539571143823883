// SPDX-License-Identifier: Apache-2.0
#include "taudnn/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "taudnn/activation.hpp"
#include "taudnn/special.hpp"

namespace taudnn {

Gradient gradient_zeros(const NetworkSpec& spec) {
    const Theta z = theta_zeros(spec);
    return Gradient{z.weights, z.biases, z.taus};
}

void gradient_axpy(double alpha, const Gradient& x, Gradient& y) {
    for (std::size_t l = 0; l < y.dW.size(); ++l) {
        double* out = y.dW[l].data();
        const double* in = x.dW[l].data();
        for (std::size_t i = 0; i < y.dW[l].size(); ++i) out[i] += alpha * in[i];
    }
    for (std::size_t l = 0; l < y.db.size(); ++l) axpy(alpha, x.db[l], y.db[l]);
    for (std::size_t l = 0; l < y.dtau.size(); ++l) y.dtau[l] += alpha * x.dtau[l];
}

void gradient_scale(Gradient& g, double alpha) {
    for (Matrix& W : g.dW) {
        double* p = W.data();
        for (std::size_t i = 0; i < W.size(); ++i) p[i] *= alpha;
    }
    for (Vector& b : g.db)
        for (double& v : b) v *= alpha;
    for (double& t : g.dtau) t *= alpha;
}

double gradient_sq_norm(const Gradient& g) {
    double s = 0.0;
    for (const Matrix& W : g.dW) {
        const double* p = W.data();
        for (std::size_t i = 0; i < W.size(); ++i) s += p[i] * p[i];
    }
    for (const Vector& b : g.db) s += norm2_sq(b);
    for (double t : g.dtau) s += t * t;
    return s;
}

double gradient_block_norm_W(const Gradient& g) {
    double s = 0.0;
    for (const Matrix& W : g.dW) {
        const double* p = W.data();
        for (std::size_t i = 0; i < W.size(); ++i) s += p[i] * p[i];
    }
    return std::sqrt(s);
}

double gradient_block_norm_b(const Gradient& g) {
    double s = 0.0;
    for (const Vector& b : g.db) s += norm2_sq(b);
    return std::sqrt(s);
}

double gradient_block_norm_tau(const Gradient& g) {
    double s = 0.0;
    for (double t : g.dtau) s += t * t;
    return std::sqrt(s);
}

FracContext make_frac_context(const NetworkSpec& spec, const Theta& theta) {
    if (spec.kind != ArchKind::FractionalDnn)
        throw std::invalid_argument("make_frac_context: not a fractional network");
    TauGrid grid(theta.taus);
    FracContext ctx;
    ctx.m = grid.size();
    ctx.coeffs = L1Coefficients(grid, spec.gamma);
    ctx.gamma_factor = gamma_fn(2.0 - spec.gamma);
    ctx.pow_tau.resize(ctx.m);
    ctx.dpow_tau.resize(ctx.m);
    for (std::size_t l = 0; l < ctx.m; ++l) {
        ctx.pow_tau[l] = std::pow(grid[l], spec.gamma);
        ctx.dpow_tau[l] = spec.gamma * std::pow(grid[l], spec.gamma - 1.0);
    }
    ctx.dcoeff.assign(ctx.m * ctx.m * ctx.m, 0.0);
    for (std::size_t l = 0; l < ctx.m; ++l)
        for (std::size_t k = 0; k < ctx.m; ++k)
            for (std::size_t j = 0; j <= k; ++j)
                ctx.dcoeff[(l * ctx.m + k) * ctx.m + j] =
                    dcoeff_a_dtau(grid, k, j, l, spec.gamma);
    return ctx;
}

void adjoint_cached(const NetworkSpec& spec, const Theta& theta,
                    const FracContext* frac, FracAdjointKind kind,
                    const ForwardCache& cache, const Vector& phi_L,
                    std::vector<Vector>& phis) {
    const std::size_t L = spec.depth();
    if (phi_L.size() != spec.widths[L])
        throw std::invalid_argument("adjoint: phi_L width mismatch");
    const bool is_frac = spec.kind == ArchKind::FractionalDnn;
    if (is_frac && frac == nullptr)
        throw std::invalid_argument("adjoint: missing fractional context");
    if (spec.kind == ArchKind::DenseNet)
        throw std::invalid_argument("adjoint: DenseNet has no adjoint system");

    phis.resize(L + 1);
    phis[0].clear();
    phis[L] = phi_L;
    matvec_t_into(theta.weights[L - 1], phis[L], phis[L - 1]);

    Vector masked;
    for (std::size_t l = L - 2; l >= 1; --l) {
        // Sensitivity through the activation of layer l+1's update:
        // W^[l]^T (phi^[l+1] . sigma'(z^[l])).
        masked.resize(phis[l + 1].size());
        for (std::size_t i = 0; i < masked.size(); ++i)
            masked[i] = phis[l + 1][i] * cache.dact[l][i];
        matvec_t_into(theta.weights[l], masked, phis[l]);

        switch (spec.kind) {
            case ArchKind::FeedForward:
                for (double& v : phis[l]) v *= theta.taus[l];
                break;
            case ArchKind::ResNet:
                for (double& v : phis[l]) v *= theta.taus[l];
                add_projected(1.0, phis[l + 1], phis[l]);
                break;
            case ArchKind::FractionalDnn: {
                const double s = frac->pow_tau[l] * frac->gamma_factor;
                for (double& v : phis[l]) v *= s;
                if (kind == FracAdjointKind::Dto) {
                    add_projected(1.0 - frac->coeffs.a(l, l - 1), phis[l + 1], phis[l]);
                    for (std::size_t k = l + 2; k <= L - 1; ++k)
                        add_projected(frac->coeffs.a(k - 1, l) - frac->coeffs.a(k - 1, l - 1),
                                      phis[k], phis[l]);
                } else {
                    TauGrid grid(theta.taus);
                    add_projected(1.0, phis[l + 1], phis[l]);
                    for (std::size_t j = l + 1; j <= L - 2; ++j) {
                        const double b = coeff_b(grid, j, l, spec.gamma);
                        add_projected(b, phis[j + 1], phis[l]);
                        add_projected(-b, phis[j], phis[l]);
                    }
                }
                break;
            }
            case ArchKind::DenseNet:
                break;  // unreachable
        }
        if (l == 1) break;
    }
}

void accumulate_grads_cached(const NetworkSpec& spec, const Theta& theta,
                             const FracContext* frac, const ForwardCache& cache,
                             const std::vector<Vector>& phis, Gradient& into) {
    const std::size_t L = spec.depth();
    const bool is_frac = spec.kind == ArchKind::FractionalDnn;

    // Output layer: d/dW^[L-1] = phi^[L] (y^[L-1])^T.
    {
        Matrix& dW = into.dW[L - 1];
        const Vector& y = cache.states[L - 1];
        const Vector& p = phis[L];
        for (std::size_t i = 0; i < dW.rows(); ++i)
            for (std::size_t j = 0; j < dW.cols(); ++j) dW(i, j) += p[i] * y[j];
    }

    for (std::size_t l = 0; l + 1 <= L - 1; ++l) {
        const Vector& y = cache.states[l];
        const Vector& p = phis[l + 1];
        const Vector& act = cache.act[l];
        const Vector& dact = cache.dact[l];
        const double scale =
            is_frac ? frac->pow_tau[l] * frac->gamma_factor : theta.taus[l];

        Matrix& dW = into.dW[l];
        Vector& db = into.db[l];
        for (std::size_t i = 0; i < dW.rows(); ++i) {
            const double w1 = p[i] * dact[i] * scale;
            for (std::size_t j = 0; j < dW.cols(); ++j) dW(i, j) += w1 * y[j];
            db[i] += w1;
        }

        double dtau = 0.0;
        if (!is_frac) {
            dtau = dot(act, p);
        } else {
            // Activation path: d/dtau of (tau^gamma Gamma(2-gamma)) sigma.
            dtau = frac->dpow_tau[l] * frac->gamma_factor * dot(act, p);
            // History path: every coefficient a_{k,j} with j <= l <= k
            // depends on tau^[l].
            for (std::size_t k = std::max<std::size_t>(l, 1); k + 1 <= L - 1; ++k) {
                const std::size_t jmax = std::min(k - 1, l);
                const Vector& ph = phis[k + 1];
                for (std::size_t j = 0; j <= jmax; ++j) {
                    const double d = frac->dA(l, k, j);
                    if (d == 0.0) continue;
                    // <P(y^[j+1]) - P(y^[j]), phi^[k+1]> at width n_{k+1}.
                    const Vector& ya = cache.states[j + 1];
                    const Vector& yb = cache.states[j];
                    const std::size_t na = std::min(ph.size(), ya.size());
                    const std::size_t nb = std::min(ph.size(), yb.size());
                    double q = 0.0;
                    for (std::size_t i = 0; i < na; ++i) q += ya[i] * ph[i];
                    for (std::size_t i = 0; i < nb; ++i) q -= yb[i] * ph[i];
                    dtau -= d * q;
                }
            }
        }
        into.dtau[l] += dtau;
    }
}

namespace {

void cache_from_trajectory(const NetworkSpec& spec, const Theta& theta,
                           const Trajectory& traj, ForwardCache& cache) {
    validate_theta(spec, theta);
    const std::size_t L = spec.depth();
    if (traj.states.size() != L + 1)
        throw std::invalid_argument("adjoint: trajectory length mismatch");
    cache.states = traj.states;
    cache.pre.resize(L - 1);
    cache.act.resize(L - 1);
    cache.dact.resize(L - 1);
    for (std::size_t l = 0; l + 1 <= L - 1; ++l) {
        matvec_into(theta.weights[l], cache.states[l], cache.pre[l]);
        const Vector& b = theta.biases[l];
        Vector& z = cache.pre[l];
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += b[i];
        cache.act[l].resize(z.size());
        cache.dact[l].resize(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            cache.act[l][i] = smooth_relu(z[i], spec.eta);
            cache.dact[l][i] = smooth_relu_prime(z[i], spec.eta);
        }
    }
}

AdjointTrajectory run_adjoint(const NetworkSpec& spec, ArchKind kind,
                              FracAdjointKind fk, const Theta& theta,
                              const Trajectory& traj, const Vector& phi_L) {
    NetworkSpec s = spec;
    s.kind = kind;
    s.validate();
    ForwardCache cache;
    cache_from_trajectory(s, theta, traj, cache);
    AdjointTrajectory adj;
    if (kind == ArchKind::FractionalDnn) {
        FracContext ctx = make_frac_context(s, theta);
        adjoint_cached(s, theta, &ctx, fk, cache, phi_L, adj.phis);
    } else {
        adjoint_cached(s, theta, nullptr, fk, cache, phi_L, adj.phis);
    }
    return adj;
}

Gradient run_grads(const NetworkSpec& spec, ArchKind kind, const Theta& theta,
                   const Trajectory& traj, const AdjointTrajectory& adj) {
    NetworkSpec s = spec;
    s.kind = kind;
    s.validate();
    ForwardCache cache;
    cache_from_trajectory(s, theta, traj, cache);
    Gradient g = gradient_zeros(s);
    if (kind == ArchKind::FractionalDnn) {
        FracContext ctx = make_frac_context(s, theta);
        accumulate_grads_cached(s, theta, &ctx, cache, adj.phis, g);
    } else {
        accumulate_grads_cached(s, theta, nullptr, cache, adj.phis, g);
    }
    return g;
}

}  // namespace

AdjointTrajectory adjoint_feedforward(const NetworkSpec& spec, const Theta& theta,
                                      const Trajectory& traj, const Vector& phi_L) {
    return run_adjoint(spec, ArchKind::FeedForward, FracAdjointKind::Dto, theta, traj, phi_L);
}

AdjointTrajectory adjoint_resnet(const NetworkSpec& spec, const Theta& theta,
                                 const Trajectory& traj, const Vector& phi_L) {
    return run_adjoint(spec, ArchKind::ResNet, FracAdjointKind::Dto, theta, traj, phi_L);
}

AdjointTrajectory adjoint_fracdnn_dto(const NetworkSpec& spec, const Theta& theta,
                                      const Trajectory& traj, const Vector& phi_L) {
    return run_adjoint(spec, ArchKind::FractionalDnn, FracAdjointKind::Dto, theta, traj, phi_L);
}

AdjointTrajectory adjoint_fracdnn_otd(const NetworkSpec& spec, const Theta& theta,
                                      const Trajectory& traj, const Vector& phi_L) {
    return run_adjoint(spec, ArchKind::FractionalDnn, FracAdjointKind::Otd, theta, traj, phi_L);
}

Gradient grads_feedforward(const NetworkSpec& spec, const Theta& theta,
                           const Trajectory& traj, const AdjointTrajectory& adj) {
    return run_grads(spec, ArchKind::FeedForward, theta, traj, adj);
}

Gradient grads_resnet(const NetworkSpec& spec, const Theta& theta,
                      const Trajectory& traj, const AdjointTrajectory& adj) {
    return run_grads(spec, ArchKind::ResNet, theta, traj, adj);
}

Gradient grads_fracdnn(const NetworkSpec& spec, const Theta& theta,
                       const Trajectory& traj, const AdjointTrajectory& adj) {
    return run_grads(spec, ArchKind::FractionalDnn, theta, traj, adj);
}

Gradient fd_gradient(const std::function<double(const Theta&)>& f,
                     const Theta& theta, double h_rel) {
    Theta probe = theta;
    Gradient g;
    g.dW.reserve(theta.weights.size());
    for (const Matrix& W : theta.weights) g.dW.emplace_back(W.rows(), W.cols());
    for (const Vector& b : theta.biases) g.db.emplace_back(b.size(), 0.0);
    g.dtau.assign(theta.taus.size(), 0.0);

    auto central = [&](double& coord, double h) {
        const double saved = coord;
        coord = saved + h;
        const double fp = f(probe);
        coord = saved - h;
        const double fm = f(probe);
        coord = saved;
        return (fp - fm) / (2.0 * h);
    };

    for (std::size_t l = 0; l < probe.weights.size(); ++l) {
        Matrix& W = probe.weights[l];
        for (std::size_t i = 0; i < W.size(); ++i) {
            double& w = W.data()[i];
            g.dW[l].data()[i] = central(w, h_rel * std::max(1.0, std::fabs(w)));
        }
    }
    for (std::size_t l = 0; l < probe.biases.size(); ++l)
        for (std::size_t i = 0; i < probe.biases[l].size(); ++i) {
            double& b = probe.biases[l][i];
            g.db[l][i] = central(b, h_rel * std::max(1.0, std::fabs(b)));
        }
    for (std::size_t l = 0; l < probe.taus.size(); ++l) {
        double& t = probe.taus[l];
        double h = h_rel * std::max(1.0, std::fabs(t));
        if (t > 0.0 && t - h <= 0.0) h = 0.5 * t;
        g.dtau[l] = central(t, h);
    }
    return g;
}

}  // namespace taudnn
