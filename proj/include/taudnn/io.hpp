// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "taudnn/diagnostics.hpp"
#include "taudnn/network.hpp"
#include "taudnn/optimizer.hpp"

namespace taudnn {

// Dataset CSV: header `x1,x2,x3,f1,f2,f3,phi,u1,u2,u3`, one sample per row,
// 17 significant digits, LF line endings. Round-trips doubles exactly.
void write_dataset_csv(const std::string& path, const Dataset& data);
Dataset read_dataset_csv(const std::string& path);

// Versioned plain-text checkpoint (magic line `TAUDNN-CKPT v1`): the network
// description plus every W (row-major), b, tau. save -> load -> save is
// byte-identical.
void save_checkpoint(const std::string& path, const NetworkSpec& spec, const Theta& theta);
std::pair<NetworkSpec, Theta> load_checkpoint(const std::string& path);

// Training metrics CSV:
// step,J,mse,alpha,tau_0,...,tau_{L-2},gnorm_W,gnorm_b,gnorm_tau
void write_metrics_csv(const std::string& path, const std::vector<StepRecord>& record,
                       std::size_t n_taus);

// Gradient-flow report CSV: layer,norm,classification
void write_gradflow_csv(const std::string& path, const GradFlowReport& report);

// Pointwise grid error CSV: x1,x2,x3,err
struct GridErrorRow {
    double x1, x2, x3, err;
};
void write_grid_error_csv(const std::string& path, const std::vector<GridErrorRow>& rows);

// Plain-text run configuration, `key = value` lines with '#' comments.
struct RunConfig {
    NetworkSpec net;
    TrainConfig train;
    ObjectiveConfig objective;
    std::string dataset;
    std::string out_dir = ".";
    double split = 0.8;
};

RunConfig parse_run_config(const std::string& path);

}  // namespace taudnn
