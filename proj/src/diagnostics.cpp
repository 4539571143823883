// SPDX-License-Identifier: Apache-2.0
#include "taudnn/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "taudnn/adjoint.hpp"
#include "taudnn/special.hpp"

namespace taudnn {

namespace {

// out += alpha * rows of M truncated/padded to out's row count.
void add_rowproj(double alpha, const Matrix& M, Matrix& out) {
    const std::size_t rows = std::min(out.rows(), M.rows());
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t c = 0; c < out.cols(); ++c) out(i, c) += alpha * M(i, c);
}

// diag(dact) * W * D, the sensitivity of one hidden update through its
// activation.
Matrix activation_chain(const Matrix& W, const Vector& dact, const Matrix& D) {
    Matrix T = matmul(W, D);
    for (std::size_t i = 0; i < T.rows(); ++i)
        for (std::size_t c = 0; c < T.cols(); ++c) T(i, c) *= dact[i];
    return T;
}

// column c of M -= da * (proj(y^[m+1]) - proj(y^[m])), the sensitivity of a
// history term through its tau-dependent weight.
void sub_state_diff(double da, const ForwardCache& cache, std::size_t m, Matrix& M,
                    std::size_t c) {
    if (da == 0.0) return;
    const Vector& hi = cache.states[m + 1];
    const Vector& lo = cache.states[m];
    for (std::size_t r = 0; r < M.rows(); ++r) {
        const double h = r < hi.size() ? hi[r] : 0.0;
        const double l = r < lo.size() ? lo[r] : 0.0;
        M(r, c) -= da * (h - l);
    }
}

Matrix base_jacobian(const NetworkSpec& spec, const Theta& theta,
                     const ForwardCache& cache, const FracContext* frac,
                     std::size_t j) {
    const std::size_t nj = spec.widths[j];
    const std::size_t n1 = spec.widths[j + 1];
    const Vector& y = cache.states[j];
    const Vector& act = cache.act[j];
    const Vector& dact = cache.dact[j];

    double scale_w, scale_tau;
    if (spec.kind == ArchKind::FractionalDnn) {
        scale_w = frac->pow_tau[j] * frac->gamma_factor;
        scale_tau = frac->dpow_tau[j] * frac->gamma_factor;
    } else {
        scale_w = theta.taus[j];
        scale_tau = 1.0;
    }

    Matrix B(n1, n1 * nj + n1 + 1);
    for (std::size_t p = 0; p < n1; ++p) {
        const double w1 = scale_w * dact[p];
        for (std::size_t r = 0; r < nj; ++r) B(p, p * nj + r) = w1 * y[r];
        B(p, n1 * nj + p) = w1;
        B(p, n1 * nj + n1) = scale_tau * act[p];
    }
    return B;
}

void run_forward_cache(const NetworkSpec& spec, const Theta& theta, const Vector& u,
                       ForwardCache& cache, FracContext& ctx, const FracContext** out) {
    if (spec.kind == ArchKind::FractionalDnn) {
        ctx = make_frac_context(spec, theta);
        *out = &ctx;
        forward_cached(spec, theta, &ctx.coeffs, u, cache);
    } else {
        *out = nullptr;
        forward_cached(spec, theta, nullptr, u, cache);
    }
}

}  // namespace

Matrix layer_derivative(const NetworkSpec& spec, const Theta& theta,
                        const Vector& u, std::size_t j, std::size_t l) {
    spec.validate();
    validate_theta(spec, theta);
    const std::size_t L = spec.depth();
    if (!(j < l && l <= L - 1))
        throw std::invalid_argument("layer_derivative: requires j < l <= L-1");

    ForwardCache cache;
    FracContext ctx;
    const FracContext* frac = nullptr;
    run_forward_cache(spec, theta, u, cache, ctx, &frac);

    // D[i] = d y^[i] / d th^[j] for i = j+1..l; earlier states do not depend
    // on th^[j].
    std::vector<Matrix> D(l + 1);
    D[j + 1] = base_jacobian(spec, theta, cache, frac, j);
    const std::size_t P = D[j + 1].cols();

    // tau^[j] also scales the history weights a_{j,m} of the j+1 update; the
    // derivative lands in the tau column alone.
    if (spec.kind == ArchKind::FractionalDnn)
        for (std::size_t m = 0; m + 1 <= j; ++m)
            sub_state_diff(frac->dA(j, j, m), cache, m, D[j + 1], P - 1);

    for (std::size_t i = j + 2; i <= l; ++i) {
        const std::size_t ni = spec.widths[i];
        Matrix Di(ni, P);
        const Matrix chain =
            activation_chain(theta.weights[i - 1], cache.dact[i - 1], D[i - 1]);
        switch (spec.kind) {
            case ArchKind::FeedForward:
                add_rowproj(theta.taus[i - 1], chain, Di);
                break;
            case ArchKind::ResNet:
                add_rowproj(1.0, D[i - 1], Di);
                add_rowproj(theta.taus[i - 1], chain, Di);
                break;
            case ArchKind::DenseNet:
                for (std::size_t k = j + 1; k <= i - 1; ++k) add_rowproj(1.0, D[k], Di);
                add_rowproj(theta.taus[i - 1], chain, Di);
                break;
            case ArchKind::FractionalDnn: {
                add_rowproj(1.0, D[i - 1], Di);
                for (std::size_t m = j; m + 2 <= i; ++m) {
                    const double a = frac->coeffs.a(i - 1, m);
                    add_rowproj(-a, D[m + 1], Di);
                    if (m > j) add_rowproj(a, D[m], Di);  // D[j] is zero
                }
                add_rowproj(frac->pow_tau[i - 1] * frac->gamma_factor, chain, Di);
                // every history weight of this update depends on tau^[j]
                for (std::size_t m = 0; m + 2 <= i; ++m)
                    sub_state_diff(frac->dA(j, i - 1, m), cache, m, Di, P - 1);
                break;
            }
        }
        D[i] = std::move(Di);
    }
    return D[l];
}

Matrix example65_closed_form(const NetworkSpec& spec, const Theta& theta,
                             const Vector& u) {
    spec.validate();
    validate_theta(spec, theta);
    if (spec.depth() < 4)
        throw std::invalid_argument("example65_closed_form: requires L >= 4");
    const std::size_t n1 = spec.widths[1];
    if (spec.kind != ArchKind::FeedForward &&
        (spec.widths[2] != n1 || spec.widths[3] != n1))
        throw std::invalid_argument("example65_closed_form: needs equal widths n_1..n_3");

    ForwardCache cache;
    FracContext ctx;
    const FracContext* frac = nullptr;
    run_forward_cache(spec, theta, u, cache, ctx, &frac);

    const Matrix B = base_jacobian(spec, theta, cache, frac, 0);

    // d_y a^[i] = diag(sigma'(z^[i])) W^[i].
    auto dya = [&](std::size_t i) {
        Matrix M = theta.weights[i];
        for (std::size_t r = 0; r < M.rows(); ++r)
            for (std::size_t c = 0; c < M.cols(); ++c) M(r, c) *= cache.dact[i][r];
        return M;
    };
    const Matrix D1 = dya(1);
    const Matrix D2 = dya(2);
    const Matrix D21 = matmul(D2, D1);

    if (spec.kind == ArchKind::FeedForward) {
        Matrix G = D21;
        const double s = theta.taus[1] * theta.taus[2];
        for (std::size_t i = 0; i < G.size(); ++i) G.data()[i] *= s;
        return matmul(G, B);
    }

    Matrix S(n1, n1);
    double c_id, c1, c2, c21;
    if (spec.kind == ArchKind::FractionalDnn) {
        const double g1 = frac->pow_tau[1] * frac->gamma_factor;
        const double g2 = frac->pow_tau[2] * frac->gamma_factor;
        const double a10 = frac->coeffs.a(1, 0);
        const double a20 = frac->coeffs.a(2, 0);
        const double a21 = frac->coeffs.a(2, 1);
        c_id = 1.0 - a10 - a20 + a10 * a21;
        c1 = (1.0 - a21) * g1;
        c2 = (1.0 - a10) * g2;
        c21 = g2 * g1;
    } else {
        c_id = spec.kind == ArchKind::DenseNet ? 2.0 : 1.0;
        c1 = theta.taus[1];
        c2 = theta.taus[2];
        c21 = theta.taus[2] * theta.taus[1];
    }
    for (std::size_t i = 0; i < n1; ++i) S(i, i) = c_id;
    for (std::size_t i = 0; i < S.size(); ++i)
        S.data()[i] += c1 * D1.data()[i] + c2 * D2.data()[i] + c21 * D21.data()[i];
    Matrix G = matmul(S, B);

    if (spec.kind == ArchKind::FractionalDnn) {
        // tau^[0] also enters the history weights a_{1,0}, a_{2,0}, a_{2,1};
        // their derivatives land in the tau column alone. The shift of y^[2]
        // by -d a_{1,0} (P y^[1] - P y^[0]) reaches y^[3] through the factor
        // (1 - a_{2,1}) I + g_2 d_{y^[2]} a^[2].
        const std::size_t tc = G.cols() - 1;
        const Vector& y0 = cache.states[0];
        const Vector& y1 = cache.states[1];
        const Vector& y2 = cache.states[2];
        Vector t(n1);
        const double d10 = frac->dA(0, 1, 0);
        for (std::size_t r = 0; r < n1; ++r)
            t[r] = d10 * (y1[r] - (r < y0.size() ? y0[r] : 0.0));
        const Vector Dt = matvec(D2, t);
        const double a21v = frac->coeffs.a(2, 1);
        const double g2 = frac->pow_tau[2] * frac->gamma_factor;
        const double d20 = frac->dA(0, 2, 0);
        const double d21 = frac->dA(0, 2, 1);
        for (std::size_t r = 0; r < n1; ++r) {
            const double delta0 = y1[r] - (r < y0.size() ? y0[r] : 0.0);
            G(r, tc) -= (1.0 - a21v) * t[r] + g2 * Dt[r] + d20 * delta0 +
                        d21 * (y2[r] - y1[r]);
        }
    }
    return G;
}

GradFlowReport gradflow_report(const NetworkSpec& spec, const Theta& theta,
                               const std::vector<Vector>& samples,
                               double eps_vanish, double eps_explode) {
    spec.validate();
    if (samples.empty())
        throw std::invalid_argument("gradflow_report: no samples");
    const std::size_t L = spec.depth();
    GradFlowReport report;
    report.eps_vanish = eps_vanish;
    report.eps_explode = eps_explode;
    for (std::size_t j = 0; j + 1 <= L - 1; ++j) {
        double acc = 0.0;
        for (const Vector& u : samples)
            acc += spectral_norm(layer_derivative(spec, theta, u, j, L - 1));
        const double norm = acc / static_cast<double>(samples.size());
        GradFlowRow row;
        row.layer = j;
        row.norm = norm;
        row.classification =
            norm < eps_vanish ? "vanishing" : (norm > eps_explode ? "exploding" : "ok");
        report.rows.push_back(std::move(row));
    }
    return report;
}

PruneResult prune(const NetworkSpec& spec, const Theta& theta, double threshold) {
    spec.validate();
    validate_theta(spec, theta);
    if (spec.kind != ArchKind::ResNet && spec.kind != ArchKind::FractionalDnn)
        throw std::invalid_argument("prune: only ResNet and FractionalDnn are prunable");
    const std::size_t L = spec.depth();
    for (std::size_t l = 2; l <= L - 1; ++l)
        if (spec.widths[l] != spec.widths[1])
            throw std::invalid_argument("prune: requires equal hidden widths");

    bool all_flagged = true;
    std::vector<std::size_t> removed;
    for (std::size_t l = 1; l <= L - 1; ++l) {
        const bool flagged = theta.taus[l - 1] < threshold;
        if (!flagged) all_flagged = false;
        if (flagged && l >= 2) removed.push_back(l);
    }
    if (all_flagged)
        throw std::runtime_error("prune: threshold would remove every hidden layer");

    PruneResult out;
    out.removed = removed;
    if (removed.empty()) {
        out.spec = spec;
        out.theta = theta;
        return out;
    }

    NetworkSpec ns = spec;
    ns.widths.clear();
    ns.widths.push_back(spec.widths[0]);
    Theta nt;
    for (std::size_t l = 1; l <= L - 1; ++l) {
        if (l >= 2 && theta.taus[l - 1] < threshold) continue;
        ns.widths.push_back(spec.widths[l]);
        nt.weights.push_back(theta.weights[l - 1]);
        nt.biases.push_back(theta.biases[l - 1]);
        nt.taus.push_back(theta.taus[l - 1]);
    }
    ns.widths.push_back(spec.widths[L]);
    nt.weights.push_back(theta.weights[L - 1]);
    ns.validate();
    out.spec = std::move(ns);
    out.theta = std::move(nt);
    return out;
}

}  // namespace taudnn
