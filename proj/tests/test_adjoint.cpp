// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include "taudnn/adjoint.hpp"
#include "taudnn/objective.hpp"
#include "taudnn/rng.hpp"
#include "test_util.hpp"

using namespace taudnn;
using namespace testutil;

TEST_SUITE_BEGIN("adjoint");

TEST_CASE("gradient container helpers") {
    NetworkSpec s;
    s.widths = {2, 3, 2};
    Gradient g = gradient_zeros(s);
    REQUIRE(g.dW.size() == 2);
    REQUIRE(g.db.size() == 1);
    REQUIRE(g.dtau.size() == 1);
    g.dW[0](0, 0) = 3.0;
    g.db[0][1] = 4.0;
    g.dtau[0] = 12.0;
    CHECK(gradient_sq_norm(g) == doctest::Approx(9 + 16 + 144).epsilon(1e-15));
    CHECK(gradient_block_norm_W(g) == doctest::Approx(3.0));
    CHECK(gradient_block_norm_b(g) == doctest::Approx(4.0));
    CHECK(gradient_block_norm_tau(g) == doctest::Approx(12.0));

    Gradient h = gradient_zeros(s);
    gradient_axpy(2.0, g, h);
    CHECK(h.dW[0](0, 0) == 6.0);
    gradient_scale(h, 0.5);
    CHECK(h.dW[0](0, 0) == 3.0);
    CHECK(h.dtau[0] == 12.0);
}

TEST_CASE("zero terminal multiplier gives zero adjoints and gradients") {
    NetworkSpec s;
    s.kind = ArchKind::ResNet;
    s.widths = {2, 3, 3, 2};
    SplitMix64 rng(31);
    Theta th = random_theta(s, rng);
    Trajectory traj = forward(s, th, Vector{0.3, -0.6});
    AdjointTrajectory adj = adjoint_resnet(s, th, traj, Vector{0.0, 0.0});
    for (std::size_t l = 1; l < adj.phis.size(); ++l)
        for (double v : adj.phi(l)) CHECK(v == 0.0);
    Gradient g = grads_resnet(s, th, traj, adj);
    CHECK(gradient_sq_norm(g) == 0.0);
}

// Scalar feedforward case solvable by hand: x = 1, W0 = 0.8, b0 = 0.2
// (so z = 1, linear region, sigma' = 1), tau0 = 0.6, W1 = 1.5, target 0.4.
// J = (1/2)(W1 tau0 z - 0.4)^2 with y2 = 0.9, residual 0.5.
TEST_CASE("feedforward scalar gradients by hand") {
    NetworkSpec s;
    s.kind = ArchKind::FeedForward;
    s.widths = {1, 1, 1};
    Theta th = theta_zeros(s);
    th.weights[0](0, 0) = 0.8;
    th.biases[0][0] = 0.2;
    th.taus[0] = 0.6;
    th.weights[1](0, 0) = 1.5;

    Trajectory traj = forward(s, th, Vector{1.0});
    CHECK(traj.states[2][0] == doctest::Approx(0.9).epsilon(1e-15));
    const Vector residual{0.5};
    AdjointTrajectory adj = adjoint_feedforward(s, th, traj, residual);
    // phi1 = W1^T phi2 = 0.75
    CHECK(adj.phi(1)[0] == doctest::Approx(0.75).epsilon(1e-15));
    Gradient g = grads_feedforward(s, th, traj, adj);
    CHECK(g.dW[1](0, 0) == doctest::Approx(0.5 * 0.6).epsilon(1e-15));   // phi2 y1
    CHECK(g.dW[0](0, 0) == doctest::Approx(0.6 * 0.75).epsilon(1e-15));  // tau phi1 x
    CHECK(g.db[0][0] == doctest::Approx(0.45).epsilon(1e-15));
    CHECK(g.dtau[0] == doctest::Approx(0.75).epsilon(1e-15));  // sigma(z) phi1
}

TEST_CASE("finite differences confirm the trainable architectures") {
    SplitMix64 rng(77);
    for (auto kind :
         {ArchKind::FeedForward, ArchKind::ResNet, ArchKind::FractionalDnn}) {
        NetworkSpec s;
        s.kind = kind;
        s.widths = {3, 4, 2, 3, 2};
        s.gamma = 0.55;
        Theta th = random_theta(s, rng);
        Dataset d = random_dataset(s, 3, rng);
        ObjectiveConfig ocfg;
        ObjectiveEval ev = objective_with_gradient(s, th, d, ocfg);
        Gradient fd = fd_gradient(
            [&](const Theta& t) { return objective_value(s, t, d, ocfg).total; }, th);
        BlockErrors e = block_errors(ev.grad, fd);
        INFO("kind ", arch_name(kind), " errors ", e.W, " ", e.b, " ", e.tau);
        CHECK(e.max() <= 1e-6);
    }
}

TEST_CASE("only the transposed-forward adjoint matches FD on nonuniform grids") {
    NetworkSpec s;
    s.kind = ArchKind::FractionalDnn;
    s.widths = {2, 3, 3, 3, 2};
    s.gamma = 0.5;
    SplitMix64 rng(13);
    Theta th = random_theta(s, rng);
    th.taus = {0.25, 1.2, 0.55};  // strongly nonuniform
    Dataset d = random_dataset(s, 3, rng);
    ObjectiveConfig ocfg;

    Gradient fd = fd_gradient(
        [&](const Theta& t) { return objective_value(s, t, d, ocfg).total; }, th);
    ObjectiveEval dto = objective_with_gradient(s, th, d, ocfg, FracAdjointKind::Dto);
    ObjectiveEval otd = objective_with_gradient(s, th, d, ocfg, FracAdjointKind::Otd);
    const double e_dto = block_errors(dto.grad, fd).max();
    const double e_otd = block_errors(otd.grad, fd).max();
    INFO("dto ", e_dto, " otd ", e_otd);
    CHECK(e_dto <= 1e-6);
    CHECK(e_otd > 1e-4);
}

TEST_CASE("fd_gradient reproduces simple analytic gradients") {
    NetworkSpec s;
    s.kind = ArchKind::ResNet;
    s.widths = {2, 2, 2};
    SplitMix64 rng(3);
    Theta th = random_theta(s, rng);
    // f = sum W^2 + sum b^3 + sum sin(tau)
    auto f = [](const Theta& t) {
        double v = 0.0;
        for (const auto& W : t.weights)
            for (std::size_t i = 0; i < W.size(); ++i) v += W.data()[i] * W.data()[i];
        for (const auto& b : t.biases)
            for (double x : b) v += x * x * x;
        for (double tau : t.taus) v += std::sin(tau);
        return v;
    };
    Gradient fd = fd_gradient(f, th);
    for (std::size_t l = 0; l < th.weights.size(); ++l)
        for (std::size_t i = 0; i < th.weights[l].size(); ++i)
            CHECK(fd.dW[l].data()[i] ==
                  doctest::Approx(2 * th.weights[l].data()[i]).epsilon(1e-8));
    for (std::size_t l = 0; l < th.biases.size(); ++l)
        for (std::size_t i = 0; i < th.biases[l].size(); ++i)
            CHECK(fd.db[l][i] ==
                  doctest::Approx(3 * th.biases[l][i] * th.biases[l][i]).epsilon(1e-7));
    for (std::size_t l = 0; l < th.taus.size(); ++l)
        CHECK(fd.dtau[l] == doctest::Approx(std::cos(th.taus[l])).epsilon(1e-8));
}

TEST_CASE("batch gradient reduction is reproducible") {
    NetworkSpec s;
    s.kind = ArchKind::FractionalDnn;
    s.widths = {3, 4, 4, 2};
    s.gamma = 0.3;
    SplitMix64 rng(8);
    Theta th = random_theta(s, rng);
    Dataset d = random_dataset(s, 600, rng);
    ObjectiveConfig ocfg;
    ObjectiveEval a = objective_with_gradient(s, th, d, ocfg);
    ObjectiveEval b = objective_with_gradient(s, th, d, ocfg);
    CHECK(a.total == b.total);
    CHECK(a.mse == b.mse);
    for (std::size_t l = 0; l < a.grad.dW.size(); ++l) CHECK(a.grad.dW[l] == b.grad.dW[l]);
    for (std::size_t l = 0; l < a.grad.db.size(); ++l) CHECK(a.grad.db[l] == b.grad.db[l]);
    for (std::size_t l = 0; l < a.grad.dtau.size(); ++l)
        CHECK(a.grad.dtau[l] == b.grad.dtau[l]);
}

TEST_SUITE_END();
