// SPDX-License-Identifier: Apache-2.0
#include "taudnn/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace taudnn {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read '" + path + "'");
    return in;
}

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("invalid number '" + s + "'");
    }
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size())
        throw std::runtime_error("invalid number '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    return parts;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

constexpr const char* kDatasetHeader = "x1,x2,x3,f1,f2,f3,phi,u1,u2,u3";
constexpr const char* kCheckpointMagic = "TAUDNN-CKPT v1";

}  // namespace

void write_dataset_csv(const std::string& path, const Dataset& data) {
    if (data.inputs.cols() != 7 || data.targets.cols() != 3 ||
        data.inputs.rows() != data.targets.rows())
        throw std::invalid_argument("write_dataset_csv: expects 7 input / 3 target columns");
    std::ofstream out = open_out(path);
    out << kDatasetHeader << "\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < 7; ++j) out << (j ? "," : "") << fmt(data.inputs(i, j));
        for (std::size_t j = 0; j < 3; ++j) out << "," << fmt(data.targets(i, j));
        out << "\n";
    }
}

Dataset read_dataset_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || trim(line) != kDatasetHeader)
        throw std::runtime_error("dataset CSV '" + path + "': bad header");
    std::vector<std::array<double, 10>> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const std::vector<std::string> parts = split(trim(line), ',');
        if (parts.size() != 10)
            throw std::runtime_error("dataset CSV '" + path + "': bad row");
        std::array<double, 10> row;
        for (std::size_t j = 0; j < 10; ++j) row[j] = parse_double(parts[j]);
        rows.push_back(row);
    }
    if (rows.empty())
        throw std::runtime_error("dataset CSV '" + path + "': no data rows");
    Dataset d;
    d.inputs = Matrix(rows.size(), 7);
    d.targets = Matrix(rows.size(), 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < 7; ++j) d.inputs(i, j) = rows[i][j];
        for (std::size_t j = 0; j < 3; ++j) d.targets(i, j) = rows[i][7 + j];
    }
    return d;
}

void save_checkpoint(const std::string& path, const NetworkSpec& spec, const Theta& theta) {
    spec.validate();
    validate_theta(spec, theta);
    std::ofstream out = open_out(path);
    out << kCheckpointMagic << "\n";
    out << "kind " << arch_name(spec.kind) << "\n";
    out << "widths";
    for (std::size_t w : spec.widths) out << " " << w;
    out << "\n";
    out << "gamma " << fmt(spec.gamma) << "\n";
    out << "eta " << fmt(spec.eta) << "\n";
    for (std::size_t l = 0; l < theta.weights.size(); ++l) {
        const Matrix& W = theta.weights[l];
        out << "W " << l << " " << W.rows() << " " << W.cols() << "\n";
        for (std::size_t i = 0; i < W.rows(); ++i) {
            for (std::size_t j = 0; j < W.cols(); ++j)
                out << (j ? " " : "") << fmt(W(i, j));
            out << "\n";
        }
    }
    for (std::size_t l = 0; l < theta.biases.size(); ++l) {
        out << "b " << l << " " << theta.biases[l].size() << "\n";
        for (std::size_t i = 0; i < theta.biases[l].size(); ++i)
            out << (i ? " " : "") << fmt(theta.biases[l][i]);
        out << "\n";
    }
    out << "tau " << theta.taus.size() << "\n";
    for (std::size_t i = 0; i < theta.taus.size(); ++i)
        out << (i ? " " : "") << fmt(theta.taus[i]);
    out << "\n";
}

std::pair<NetworkSpec, Theta> load_checkpoint(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line, word;
    auto fail = [&](const std::string& why) -> std::runtime_error {
        return std::runtime_error("checkpoint '" + path + "': " + why);
    };
    if (!std::getline(in, line) || trim(line) != kCheckpointMagic)
        throw fail("bad magic header");

    NetworkSpec spec;
    if (!(in >> word) || word != "kind" || !(in >> word)) throw fail("missing kind");
    spec.kind = arch_from_string(word);
    if (!(in >> word) || word != "widths") throw fail("missing widths");
    std::getline(in, line);
    {
        std::istringstream ws(line);
        std::size_t w;
        spec.widths.clear();
        while (ws >> w) spec.widths.push_back(w);
    }
    if (!(in >> word) || word != "gamma" || !(in >> spec.gamma)) throw fail("missing gamma");
    if (!(in >> word) || word != "eta" || !(in >> spec.eta)) throw fail("missing eta");
    spec.validate();

    const std::size_t L = spec.depth();
    Theta theta = theta_zeros(spec);
    for (std::size_t l = 0; l < L; ++l) {
        std::size_t idx, rows, cols;
        if (!(in >> word) || word != "W" || !(in >> idx >> rows >> cols) || idx != l ||
            rows != spec.widths[l + 1] || cols != spec.widths[l])
            throw fail("bad weight block");
        Matrix& W = theta.weights[l];
        for (std::size_t i = 0; i < W.size(); ++i)
            if (!(in >> W.data()[i])) throw fail("truncated weight block");
    }
    for (std::size_t l = 0; l + 1 < L; ++l) {
        std::size_t idx, n;
        if (!(in >> word) || word != "b" || !(in >> idx >> n) || idx != l ||
            n != spec.widths[l + 1])
            throw fail("bad bias block");
        for (std::size_t i = 0; i < n; ++i)
            if (!(in >> theta.biases[l][i])) throw fail("truncated bias block");
    }
    {
        std::size_t n;
        if (!(in >> word) || word != "tau" || !(in >> n) || n != L - 1)
            throw fail("bad tau block");
        for (std::size_t i = 0; i < n; ++i)
            if (!(in >> theta.taus[i])) throw fail("truncated tau block");
    }
    return {std::move(spec), std::move(theta)};
}

void write_metrics_csv(const std::string& path, const std::vector<StepRecord>& record,
                       std::size_t n_taus) {
    std::ofstream out = open_out(path);
    out << "step,J,mse,alpha";
    for (std::size_t i = 0; i < n_taus; ++i) out << ",tau_" << i;
    out << ",gnorm_W,gnorm_b,gnorm_tau\n";
    for (const StepRecord& r : record) {
        if (r.taus.size() != n_taus)
            throw std::invalid_argument("write_metrics_csv: tau count mismatch");
        out << r.step << "," << fmt(r.J) << "," << fmt(r.mse) << "," << fmt(r.alpha);
        for (double t : r.taus) out << "," << fmt(t);
        out << "," << fmt(r.gnorm_W) << "," << fmt(r.gnorm_b) << "," << fmt(r.gnorm_tau)
            << "\n";
    }
}

void write_gradflow_csv(const std::string& path, const GradFlowReport& report) {
    std::ofstream out = open_out(path);
    out << "layer,norm,classification\n";
    for (const GradFlowRow& r : report.rows)
        out << r.layer << "," << fmt(r.norm) << "," << r.classification << "\n";
}

void write_grid_error_csv(const std::string& path, const std::vector<GridErrorRow>& rows) {
    std::ofstream out = open_out(path);
    out << "x1,x2,x3,err\n";
    for (const GridErrorRow& r : rows)
        out << fmt(r.x1) << "," << fmt(r.x2) << "," << fmt(r.x3) << "," << fmt(r.err)
            << "\n";
}

RunConfig parse_run_config(const std::string& path) {
    std::ifstream in = open_in(path);
    RunConfig cfg;
    bool have_arch = false, have_widths = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line.substr(0, line.find('#')));
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config '" + path + "' line " +
                                     std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        auto as_bool = [&]() {
            if (value == "true" || value == "1") return true;
            if (value == "false" || value == "0") return false;
            throw std::runtime_error("config '" + path + "': bad boolean '" + value + "'");
        };
        if (key == "architecture") {
            cfg.net.kind = arch_from_string(value);
            have_arch = true;
        } else if (key == "widths") {
            cfg.net.widths.clear();
            for (const std::string& part : split(value, ',')) {
                const double w = parse_double(trim(part));
                if (w < 1 || w != static_cast<std::size_t>(w))
                    throw std::runtime_error("config '" + path + "': bad width '" + part + "'");
                cfg.net.widths.push_back(static_cast<std::size_t>(w));
            }
            have_widths = true;
        } else if (key == "gamma") {
            cfg.net.gamma = parse_double(value);
        } else if (key == "eta") {
            cfg.net.eta = parse_double(value);
        } else if (key == "lambda1") {
            cfg.objective.lambda1 = parse_double(value);
        } else if (key == "lambda2") {
            cfg.objective.lambda2 = parse_double(value);
        } else if (key == "beta") {
            cfg.objective.beta = parse_double(value);
        } else if (key == "bias_ordering") {
            cfg.objective.bias_ordering = as_bool();
        } else if (key == "max_steps") {
            cfg.train.max_steps = static_cast<std::size_t>(parse_double(value));
        } else if (key == "armijo_c") {
            cfg.train.armijo_c = parse_double(value);
        } else if (key == "shrink") {
            cfg.train.shrink = parse_double(value);
        } else if (key == "init_step") {
            cfg.train.init_step = parse_double(value);
        } else if (key == "alpha_max") {
            cfg.train.alpha_max = parse_double(value);
        } else if (key == "tau_min") {
            cfg.train.tau_min = parse_double(value);
        } else if (key == "tau_max") {
            cfg.train.tau_max = parse_double(value);
        } else if (key == "train_taus") {
            cfg.train.train_taus = as_bool();
        } else if (key == "seed") {
            cfg.train.seed = static_cast<std::uint64_t>(parse_double(value));
        } else if (key == "dataset") {
            cfg.dataset = value;
        } else if (key == "out_dir") {
            cfg.out_dir = value;
        } else if (key == "split") {
            cfg.split = parse_double(value);
        } else {
            throw std::runtime_error("config '" + path + "': unknown key '" + key + "'");
        }
    }
    if (!have_arch || !have_widths || cfg.dataset.empty())
        throw std::runtime_error("config '" + path +
                                 "': architecture, widths and dataset are required");
    cfg.net.validate();
    if (!(cfg.split > 0.0 && cfg.split < 1.0))
        throw std::runtime_error("config '" + path + "': split must lie in (0,1)");
    return cfg;
}

}  // namespace taudnn
