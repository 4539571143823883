// SPDX-License-Identifier: Apache-2.0
//
// taudnn command line tool.
//
// Subcommands:
//   gen-data   synthesize the Maxwell regression dataset
//   train      full-batch steepest descent from a run config
//   gradcheck  analytic adjoint gradients vs finite differences
//   prune      delete hidden layers with small incoming step size
//   diagnose   per-layer gradient-flow report (+ depth-4 Jacobian cross-check)
//   eval       relative test error / extrapolation-grid error map

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "taudnn/adjoint.hpp"
#include "taudnn/diagnostics.hpp"
#include "taudnn/io.hpp"
#include "taudnn/maxwell.hpp"
#include "taudnn/network.hpp"
#include "taudnn/objective.hpp"
#include "taudnn/optimizer.hpp"
#include "taudnn/rng.hpp"

namespace {

using namespace taudnn;

int cmd_gen_data(std::size_t n, std::uint64_t seed, const std::string& out) {
    std::vector<Point3> pts = sample_cylinder(n, seed);
    Dataset data = assemble_dataset(pts);
    write_dataset_csv(out, data);
    std::printf("wrote %zu samples to %s\n", data.size(), out.c_str());
    return 0;
}

RelativeError test_error(const NetworkSpec& spec, const Theta& theta,
                         const Dataset& test) {
    return relative_error(predict(spec, theta, test.inputs), test.targets);
}

int cmd_train(const std::string& config_path, std::string out_dir) {
    RunConfig cfg = parse_run_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    std::filesystem::create_directories(cfg.out_dir);

    Dataset all = read_dataset_csv(cfg.dataset);
    auto [train_set, test_set] = split_dataset(all, cfg.split);
    std::printf("dataset %s: %zu train / %zu test samples\n", cfg.dataset.c_str(),
                train_set.size(), test_set.size());

    TrainResult res = train(cfg.net, train_set, cfg.train, cfg.objective);

    const std::string ckpt = cfg.out_dir + "/checkpoint.txt";
    const std::string metrics = cfg.out_dir + "/metrics.csv";
    save_checkpoint(ckpt, cfg.net, res.theta);
    write_metrics_csv(metrics, res.record, res.theta.taus.size());

    RelativeError err = test_error(cfg.net, res.theta, test_set);
    if (res.stagnated)
        std::printf("line search stagnated after %zu accepted steps\n",
                    res.record.size());
    std::printf("final train mse %.6e, test relative error %.4f "
                "(per-sample mean %.4f)\n",
                res.final_mse, err.global, err.per_sample_mean);
    std::printf("checkpoint: %s\nmetrics:    %s\n", ckpt.c_str(), metrics.c_str());
    return 0;
}

int cmd_gradcheck(const std::string& arch, double gamma, std::uint64_t seed,
                  bool otd) {
    NetworkSpec spec;
    spec.kind = arch_from_string(arch);
    spec.gamma = gamma;
    if (spec.kind == ArchKind::DenseNet) {
        std::fprintf(stderr, "gradcheck: densenet has no adjoint system\n");
        return 2;
    }

    SplitMix64 rng(seed);
    const std::size_t L = 4;
    spec.widths.resize(L + 1);
    for (std::size_t i = 0; i <= L; ++i)
        spec.widths[i] = 2 + static_cast<std::size_t>(rng.next_u64() % 3);
    spec.validate();

    Theta theta = theta_zeros(spec);
    for (Matrix& W : theta.weights)
        for (std::size_t i = 0; i < W.rows() * W.cols(); ++i)
            W.data()[i] = rng.uniform(-0.8, 0.8);
    for (Vector& b : theta.biases)
        for (double& v : b) v = rng.uniform(-0.4, 0.4);
    for (double& t : theta.taus) t = rng.uniform(0.3, 1.2);

    const std::size_t n_samples = 3;
    Dataset data{Matrix(n_samples, spec.widths.front()),
                 Matrix(n_samples, spec.widths.back())};
    for (std::size_t i = 0; i < n_samples; ++i) {
        for (std::size_t j = 0; j < spec.widths.front(); ++j)
            data.inputs(i, j) = rng.uniform(-1.0, 1.0);
        for (std::size_t j = 0; j < spec.widths.back(); ++j)
            data.targets(i, j) = rng.uniform(-1.0, 1.0);
    }

    ObjectiveConfig ocfg;  // pure mse keeps the FD oracle smooth
    const FracAdjointKind kind = otd ? FracAdjointKind::Otd : FracAdjointKind::Dto;
    ObjectiveEval ev = objective_with_gradient(spec, theta, data, ocfg, kind);
    Gradient fd = fd_gradient(
        [&](const Theta& th) { return objective_value(spec, th, data, ocfg).total; },
        theta);

    auto block_err = [](double num, double den) {
        return den > 0.0 ? num / den : num;
    };
    double nW = 0.0, dW = 0.0, nb = 0.0, db = 0.0, nt = 0.0, dt = 0.0;
    for (std::size_t l = 0; l < theta.weights.size(); ++l)
        for (std::size_t i = 0; i < ev.grad.dW[l].rows() * ev.grad.dW[l].cols(); ++i) {
            nW = std::max(nW, std::fabs(ev.grad.dW[l].data()[i] - fd.dW[l].data()[i]));
            dW = std::max(dW, std::fabs(fd.dW[l].data()[i]));
        }
    for (std::size_t l = 0; l < theta.biases.size(); ++l)
        for (std::size_t i = 0; i < ev.grad.db[l].size(); ++i) {
            nb = std::max(nb, std::fabs(ev.grad.db[l][i] - fd.db[l][i]));
            db = std::max(db, std::fabs(fd.db[l][i]));
        }
    for (std::size_t l = 0; l < theta.taus.size(); ++l) {
        nt = std::max(nt, std::fabs(ev.grad.dtau[l] - fd.dtau[l]));
        dt = std::max(dt, std::fabs(fd.dtau[l]));
    }
    const double eW = block_err(nW, dW), eb = block_err(nb, db), et = block_err(nt, dt);
    const double tol = 1e-6;
    const bool pass = eW <= tol && eb <= tol && et <= tol;

    std::printf("arch %s%s, widths", arch.c_str(), otd ? " (OtD adjoint)" : "");
    for (std::size_t w : spec.widths) std::printf(" %zu", w);
    std::printf("\nmax relative error  W: %.3e  b: %.3e  tau: %.3e\n", eW, eb, et);
    std::printf("%s (tolerance %.0e)\n", pass ? "PASS" : "FAIL", tol);
    return pass ? 0 : 1;
}

int cmd_prune(const std::string& ckpt_path, double threshold,
              const std::string& data_path, const std::string& out_path) {
    auto [spec, theta] = load_checkpoint(ckpt_path);
    Dataset data = read_dataset_csv(data_path);

    RelativeError before = test_error(spec, theta, data);
    PruneResult pr = prune(spec, theta, threshold);
    RelativeError after = test_error(pr.spec, pr.theta, data);

    if (pr.removed.empty()) {
        std::printf("no hidden layer below threshold %.6g\n", threshold);
    } else {
        std::printf("removed hidden layers:");
        for (std::size_t l : pr.removed) std::printf(" %zu", l);
        std::printf("\n");
    }
    std::printf("relative error before %.4f, after %.4f (delta %+.4f)\n",
                before.global, after.global, after.global - before.global);
    save_checkpoint(out_path, pr.spec, pr.theta);
    std::printf("reduced checkpoint: %s\n", out_path.c_str());
    return 0;
}

int cmd_diagnose(const std::string& ckpt_path, const std::string& data_path,
                 const std::string& out_path, std::size_t n_samples) {
    auto [spec, theta] = load_checkpoint(ckpt_path);
    Dataset data = read_dataset_csv(data_path);
    if (n_samples == 0 || n_samples > data.size()) n_samples = data.size();

    std::vector<Vector> samples;
    samples.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i)
        samples.push_back(dataset_input(data, i));

    GradFlowReport report = gradflow_report(spec, theta, samples);
    write_gradflow_csv(out_path, report);
    for (const GradFlowRow& row : report.rows)
        std::printf("layer %zu: |dy/dtheta| = %.6e  %s\n", row.layer, row.norm,
                    row.classification.c_str());
    std::printf("report: %s\n", out_path.c_str());

    // Cross-check the depth-4 Jacobian recursion against its closed form
    // whenever the network shape admits the latter.
    if (spec.depth() >= 4) {
        bool applicable = spec.kind == ArchKind::FeedForward ||
                          (spec.widths[1] == spec.widths[2] &&
                           spec.widths[2] == spec.widths[3]);
        if (applicable) {
            const Vector& u = samples.front();
            Matrix rec = layer_derivative(spec, theta, u, 0, 3);
            Matrix closed = example65_closed_form(spec, theta, u);
            double diff = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < rec.rows() * rec.cols(); ++i) {
                diff = std::max(diff, std::fabs(rec.data()[i] - closed.data()[i]));
                scale = std::max(scale, std::fabs(closed.data()[i]));
            }
            const double rel = scale > 0.0 ? diff / scale : diff;
            std::printf("depth-4 Jacobian cross-check: %s (max relative "
                        "difference %.3e)\n",
                        rel <= 1e-9 ? "OK" : "MISMATCH", rel);
        }
    }
    return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& data_path,
             std::size_t grid_res, const std::string& grid_out) {
    auto [spec, theta] = load_checkpoint(ckpt_path);

    if (!data_path.empty()) {
        Dataset data = read_dataset_csv(data_path);
        RelativeError err = test_error(spec, theta, data);
        std::printf("relative error %.4f (per-sample mean %.4f) on %zu samples\n",
                    err.global, err.per_sample_mean, data.size());
    }

    if (grid_res > 0) {
        std::vector<Point3> pts = extrapolation_grid(grid_res);
        Dataset grid = assemble_dataset(pts);
        Matrix preds = predict(spec, theta, grid.inputs);
        std::vector<GridErrorRow> rows;
        rows.reserve(pts.size());
        double max_u3 = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double e2 = 0.0;
            for (std::size_t j = 0; j < 3; ++j) {
                const double d = preds(i, j) - grid.targets(i, j);
                e2 += d * d;
            }
            rows.push_back(GridErrorRow{pts[i][0], pts[i][1], pts[i][2],
                                        std::sqrt(e2)});
            if (pts[i][0] * pts[i][0] + pts[i][1] * pts[i][1] <= 1.0)
                max_u3 = std::max(max_u3, std::fabs(preds(i, 2)));
        }
        write_grid_error_csv(grid_out, rows);
        std::printf("grid %zux%zu error map: %s\n", grid_res, grid_res,
                    grid_out.c_str());
        std::printf("max |u3| inside the cylinder cross-section: %.6e\n", max_u3);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trainable time step-size deep network toolkit"};
    app.require_subcommand(1);

    // gen-data
    std::size_t gd_n = 0;
    std::uint64_t gd_seed = 1;
    std::string gd_out;
    CLI::App* gen = app.add_subcommand("gen-data", "synthesize the Maxwell dataset");
    gen->add_option("--n", gd_n, "number of samples")->required()
        ->check(CLI::PositiveNumber);
    gen->add_option("--seed", gd_seed, "sampling seed");
    gen->add_option("--out", gd_out, "output CSV path")->required();

    // train
    std::string tr_config, tr_out_dir;
    CLI::App* tr = app.add_subcommand("train", "train from a run config");
    tr->add_option("--config", tr_config, "run config file")->required();
    tr->add_option("--out-dir", tr_out_dir, "output directory (overrides config)");

    // gradcheck
    std::string gc_arch;
    double gc_gamma = 0.5;
    std::uint64_t gc_seed = 0;
    bool gc_otd = false;
    CLI::App* gc = app.add_subcommand("gradcheck", "adjoint gradient vs finite differences");
    gc->add_option("--arch", gc_arch, "feedforward | resnet | fracdnn")->required();
    gc->add_option("--gamma", gc_gamma, "fractional order (fracdnn)");
    gc->add_option("--seed", gc_seed, "instance seed");
    gc->add_flag("--otd", gc_otd, "use the optimize-then-discretize adjoint");

    // prune
    std::string pr_ckpt, pr_data, pr_out = "pruned_checkpoint.txt";
    double pr_threshold = 0.0;
    CLI::App* pr = app.add_subcommand("prune", "remove hidden layers with small tau");
    pr->add_option("--checkpoint", pr_ckpt, "trained checkpoint")->required();
    pr->add_option("--threshold", pr_threshold, "tau threshold")->required();
    pr->add_option("--data", pr_data, "evaluation dataset CSV")->required();
    pr->add_option("--out", pr_out, "reduced checkpoint path");

    // diagnose
    std::string dg_ckpt, dg_data, dg_out = "gradflow.csv";
    std::size_t dg_samples = 8;
    CLI::App* dg = app.add_subcommand("diagnose", "gradient-flow report");
    dg->add_option("--checkpoint", dg_ckpt, "checkpoint to analyze")->required();
    dg->add_option("--data", dg_data, "dataset CSV for sample inputs")->required();
    dg->add_option("--out", dg_out, "report CSV path");
    dg->add_option("--samples", dg_samples, "number of inputs to average over");

    // eval
    std::string ev_ckpt, ev_data, ev_grid_out = "grid_error.csv";
    std::size_t ev_grid = 0;
    CLI::App* ev = app.add_subcommand("eval", "evaluate a checkpoint");
    ev->add_option("--checkpoint", ev_ckpt, "checkpoint to evaluate")->required();
    ev->add_option("--data", ev_data, "dataset CSV");
    ev->add_option("--grid", ev_grid, "extrapolation grid resolution");
    ev->add_option("--grid-out", ev_grid_out, "grid error CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_data(gd_n, gd_seed, gd_out);
        if (tr->parsed()) return cmd_train(tr_config, tr_out_dir);
        if (gc->parsed()) return cmd_gradcheck(gc_arch, gc_gamma, gc_seed, gc_otd);
        if (pr->parsed()) return cmd_prune(pr_ckpt, pr_threshold, pr_data, pr_out);
        if (dg->parsed()) return cmd_diagnose(dg_ckpt, dg_data, dg_out, dg_samples);
        if (ev->parsed()) {
            if (ev_data.empty() && ev_grid == 0) {
                std::fprintf(stderr, "eval: need --data and/or --grid\n");
                return 2;
            }
            return cmd_eval(ev_ckpt, ev_data, ev_grid, ev_grid_out);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
