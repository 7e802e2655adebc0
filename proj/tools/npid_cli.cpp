// Copyright 2026 The npid-vqc Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command line front end:
//   npid run          qubit sweep over models
//   npid sweep-noise  noise-rate sweep (NPID by default)
//   npid metrics      recompute summary.json from stored traces

#include "npid/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <thread>

namespace {

using namespace npid;

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto end = s.find(sep, start);
        out.push_back(s.substr(start, end == std::string::npos ? std::string::npos : end - start));
        if (end == std::string::npos) {
            break;
        }
        start = end + 1;
    }
    return out;
}

/// "7..12", "7,9,11" or "8".
std::vector<std::size_t> parse_qubits(const std::string &spec) {
    const auto dots = spec.find("..");
    if (dots != std::string::npos) {
        const auto lo = std::stoul(spec.substr(0, dots));
        const auto hi = std::stoul(spec.substr(dots + 2));
        if (hi < lo) {
            throw Error("qubit range is empty: " + spec);
        }
        std::vector<std::size_t> out;
        for (auto n = lo; n <= hi; ++n) {
            out.push_back(n);
        }
        return out;
    }
    std::vector<std::size_t> out;
    for (const auto &part : split(spec, ',')) {
        out.push_back(std::stoul(part));
    }
    return out;
}

std::vector<ModelTag> parse_models(const std::string &spec) {
    std::vector<ModelTag> out;
    for (const auto &part : split(spec, ',')) {
        out.push_back(model_from_string(part));
    }
    return out;
}

std::vector<double> parse_rates(const std::string &spec) {
    std::vector<double> out;
    for (const auto &part : split(spec, ',')) {
        out.push_back(io::parse_double(part));
    }
    return out;
}

struct SweepOptions {
    std::string qubits{"7..12"};
    std::string models{"npid,neqp-s,neqp-l,qv"};
    std::string rates{"0.01"};
    std::size_t runs{5};
    std::size_t max_iters{1500};
    double target_loss{1e-3};
    double lr_theta{0.1};
    double lr_net{0.01};
    std::uint64_t seed{0};
    std::string out{"results"};
    std::size_t jobs{1};
    std::string noise_policy{"frozen"};
    std::string log_base{"e"};
    std::size_t depth{0};
    bool grad_norms{false};
};

void add_sweep_options(CLI::App *cmd, SweepOptions &o) {
    cmd->add_option("--qubits", o.qubits, "Qubit counts: 7..12 or 7,8,9")->capture_default_str();
    cmd->add_option("--models", o.models, "Comma-separated: npid, neqp-s, neqp-l, qv")
        ->capture_default_str();
    cmd->add_option("--runs", o.runs, "Seeded runs per configuration")->capture_default_str();
    cmd->add_option("--max-iters", o.max_iters, "Iteration cap per run")->capture_default_str();
    cmd->add_option("--target-loss", o.target_loss, "Convergence threshold")->capture_default_str();
    cmd->add_option("--lr-theta", o.lr_theta, "Circuit-parameter learning rate")
        ->capture_default_str();
    cmd->add_option("--lr-net", o.lr_net, "Network learning rate")->capture_default_str();
    cmd->add_option("--seed", o.seed, "Base seed")->capture_default_str();
    cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
    cmd->add_option("--jobs", o.jobs, "Worker threads (0 = hardware concurrency)")
        ->capture_default_str();
    cmd->add_option("--noise-policy", o.noise_policy,
                    "frozen: one perturbation per run; resample: new one per iteration")
        ->check(CLI::IsMember({"frozen", "resample"}))
        ->capture_default_str();
    cmd->add_option("--log-base", o.log_base, "Logarithm base of the depth schedule")
        ->check(CLI::IsMember({"e", "2"}))
        ->capture_default_str();
    cmd->add_option("--depth", o.depth, "Fixed circuit depth (0 = n^2 log n)")
        ->capture_default_str();
    cmd->add_flag("--grad-norms", o.grad_norms, "Record gradient norms in traces");
}

ExperimentConfig to_experiment(const SweepOptions &o) {
    ExperimentConfig cfg;
    cfg.qubits = parse_qubits(o.qubits);
    cfg.models = parse_models(o.models);
    cfg.noise_rates = parse_rates(o.rates);
    cfg.runs_per_config = o.runs;
    cfg.base.max_iters = o.max_iters;
    cfg.base.target_loss = o.target_loss;
    cfg.base.lr_theta = o.lr_theta;
    cfg.base.lr_net = o.lr_net;
    cfg.base.seed = o.seed;
    cfg.base.noise_policy = noise_policy_from_string(o.noise_policy);
    cfg.base.depth_log = o.log_base == "2" ? LogBase::Two : LogBase::Natural;
    if (o.depth > 0) {
        cfg.base.depth = o.depth;
    }
    cfg.base.record_grad_norms = o.grad_norms;
    cfg.out_dir = o.out;
    cfg.jobs = o.jobs > 0 ? o.jobs : std::max(1U, std::thread::hardware_concurrency());
    return cfg;
}

void print_table(const SummaryTable &t) {
    std::printf("%-7s %6s %8s %12s %10s  %s\n", "model", "qubits", "noise", "mean_iters",
                "E_c", "per-run iterations");
    for (const auto &c : t.configs) {
        std::string runs;
        for (auto k : c.conv_iterations) {
            runs += (runs.empty() ? "" : " ") + std::to_string(k);
        }
        std::printf("%-7s %6zu %8s %12.1f %10.3f  %s\n", std::string(to_string(c.model)).c_str(),
                    c.n_qubits, io::rate_label(c.noise_rate).c_str(), c.mean_conv, c.efficiency,
                    runs.c_str());
    }
    for (const auto &f : t.fluctuations) {
        std::printf("fluctuation %s n=%zu: %.2f%%\n", std::string(to_string(f.model)).c_str(),
                    f.n_qubits, f.fluctuation_pct);
    }
    for (const auto &m : t.models) {
        std::printf("E_c %s: %.3f over %zu runs\n", std::string(to_string(m.model)).c_str(),
                    m.efficiency, m.runs);
    }
    for (const auto &f : t.failures) {
        std::printf("FAILED %s n=%zu noise=%s run=%zu: %s\n",
                    std::string(to_string(f.key.model)).c_str(), f.key.n_qubits,
                    io::rate_label(f.key.noise_rate).c_str(), f.key.run_index, f.message.c_str());
    }
}

int run_sweep(const SweepOptions &o) {
    const ExperimentConfig cfg = to_experiment(o);
    const SummaryTable table = run_experiment(cfg);
    print_table(table);
    std::printf("wrote %s\n", (cfg.out_dir / "summary.json").string().c_str());
    return table.failures.empty() ? 0 : 2;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Neural-PID training of random variational quantum circuits"};
    app.require_subcommand(1);

    SweepOptions run_opts;
    auto *run = app.add_subcommand("run", "Train models over a range of qubit counts");
    add_sweep_options(run, run_opts);
    run->add_option("--noise-rate", run_opts.rates, "Parameter noise rate(s), comma-separated")
        ->capture_default_str();

    SweepOptions sweep_opts;
    sweep_opts.models = "npid";
    sweep_opts.rates = "0.03,0.05,0.07,0.09";
    auto *sweep = app.add_subcommand("sweep-noise", "Train over a list of noise rates");
    add_sweep_options(sweep, sweep_opts);
    sweep->add_option("--rates", sweep_opts.rates, "Noise rates, comma-separated")
        ->capture_default_str();

    std::string metrics_in;
    std::string metrics_out;
    auto *metrics = app.add_subcommand("metrics", "Recompute the summary from stored traces");
    metrics->add_option("--in", metrics_in, "Directory written by run or sweep-noise")->required();
    metrics->add_option("--out", metrics_out, "Write the recomputed summary JSON here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            return run_sweep(run_opts);
        }
        if (*sweep) {
            return run_sweep(sweep_opts);
        }
        if (*metrics) {
            const auto [table, cfg] = recompute_summary(metrics_in);
            print_table(table);
            if (!metrics_out.empty()) {
                io::write_text(metrics_out, summary_text(table, cfg));
            }
            return 0;
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
