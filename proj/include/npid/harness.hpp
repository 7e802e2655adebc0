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
/**
 * @file
 * Seeded experiment sweeps, convergence metrics and CSV/JSON output.
 *
 * Output layout of a sweep directory:
 *
 *   trace_<model>_<n>_<rate>_<run>.csv   iter,loss[,grad_norm]
 *   summary.json                         config + per-configuration metrics
 *   plots/loss_<model>_<n>_<rate>.csv    iter,mean,std   (across runs)
 *   plots/iterations_vs_qubits.csv       model,n_qubits,noise_rate,mean,std
 *   plots/iterations_vs_noise.csv        same columns, ordered by noise rate
 */
#pragma once

#include "optim.hpp"
#include "util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace npid {

/// Mean over runs of max_iters / conv, conv given directly per run.
inline double convergence_efficiency_from_iterations(std::span<const double> conv,
                                                     double max_iters) {
    detail::require(!conv.empty(), "convergence_efficiency: no runs");
    double acc = 0.0;
    for (double c : conv) {
        detail::require(c > 0.0, "convergence_efficiency: iteration counts must be positive");
        acc += max_iters / c;
    }
    return acc / static_cast<double>(conv.size());
}

/**
 * @brief Mean over runs of max_iters / conv.
 *
 * conv is converged_at + 1 for converged runs and max_iters otherwise, so an
 * unconverged run contributes exactly 1.
 */
inline double convergence_efficiency(std::span<const RunRecord> records, std::size_t max_iters) {
    detail::require(!records.empty(), "convergence_efficiency: no runs");
    std::vector<double> conv;
    conv.reserve(records.size());
    for (const auto &r : records) {
        conv.push_back(static_cast<double>(r.conv_iterations(max_iters)));
    }
    return convergence_efficiency_from_iterations(conv, static_cast<double>(max_iters));
}

inline double mean_of(std::span<const double> xs) {
    detail::require(!xs.empty(), "mean_of: empty input");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Population standard deviation.
inline double pstdev_of(std::span<const double> xs) {
    const double m = mean_of(xs);
    double acc = 0.0;
    for (double x : xs) {
        acc += (x - m) * (x - m);
    }
    return std::sqrt(acc / static_cast<double>(xs.size()));
}

/// Population standard deviation over mean, in percent.
inline double fluctuation_rate(std::span<const double> iterations) {
    detail::require(!iterations.empty(), "fluctuation_rate: empty input");
    const double m = mean_of(iterations);
    detail::require(m > 0.0, "fluctuation_rate: mean must be positive");
    return 100.0 * pstdev_of(iterations) / m;
}

/// Identifies one run of a sweep.
struct RunKey {
    ModelTag model{ModelTag::Npid};
    std::size_t n_qubits{0};
    double noise_rate{0.0};
    std::size_t run_index{0};

    auto operator<=>(const RunKey &) const = default;
};

struct RunResult {
    RunKey key;
    RunRecord record;
    std::optional<std::string> error{};
};

/// Circuit and input state depend on (base, n, run) only, so every model and
/// noise rate is trained on the same problems.
inline std::uint64_t circuit_seed_for(std::uint64_t base, std::size_t n_qubits,
                                      std::size_t run_index) {
    return derive_seed(base, 0xC1CC, n_qubits, run_index);
}

/// Initial parameters, network weights and noise draws; shared across models.
inline std::uint64_t train_seed_for(std::uint64_t base, std::size_t n_qubits,
                                    std::size_t run_index) {
    return derive_seed(base, 0x7EA1, n_qubits, run_index);
}

/// Training config of one run, derived from the sweep's base config.
inline TrainConfig run_config(const TrainConfig &base, const RunKey &key) {
    TrainConfig cfg = base;
    cfg.n_qubits = key.n_qubits;
    cfg.noise_rate = key.noise_rate;
    cfg.seed = train_seed_for(base.seed, key.n_qubits, key.run_index);
    return cfg;
}

/// Replays a single run of a sweep.
inline RunRecord replay_run(const TrainConfig &base, const RunKey &key) {
    return train_loop(key.model, run_config(base, key),
                      circuit_seed_for(base.seed, key.n_qubits, key.run_index));
}

struct ExperimentConfig {
    std::vector<std::size_t> qubits{7, 8, 9, 10, 11, 12};
    std::vector<ModelTag> models{all_models.begin(), all_models.end()};
    std::size_t runs_per_config{5};
    std::vector<double> noise_rates{0.01};
    /// Shared hyperparameters; `base.seed` is the sweep's base seed.
    TrainConfig base{};
    /// Output directory; nothing is written when empty.
    std::filesystem::path out_dir{};
    std::size_t jobs{1};

    void validate() const {
        detail::require(runs_per_config >= 1, "ExperimentConfig: runs_per_config must be >= 1");
        detail::require(!qubits.empty() && !models.empty() && !noise_rates.empty(),
                        "ExperimentConfig: empty sweep");
        for (auto n : qubits) {
            detail::require(n >= 2, "ExperimentConfig: qubit counts must be >= 2");
        }
        for (double r : noise_rates) {
            detail::require(r >= 0.0 && std::isfinite(r), "ExperimentConfig: bad noise rate");
        }
        detail::require(jobs >= 1, "ExperimentConfig: jobs must be >= 1");
        TrainConfig probe = base;
        probe.n_qubits = qubits.front();
        probe.validate();
    }

    /// Every run of the sweep in canonical order.
    [[nodiscard]] std::vector<RunKey> keys() const {
        std::vector<RunKey> out;
        for (ModelTag m : models) {
            for (std::size_t n : qubits) {
                for (double r : noise_rates) {
                    for (std::size_t k = 0; k < runs_per_config; ++k) {
                        out.push_back({m, n, r, k});
                    }
                }
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

struct ConfigSummary {
    ModelTag model{ModelTag::Npid};
    std::size_t n_qubits{0};
    double noise_rate{0.0};
    std::vector<std::size_t> conv_iterations;
    std::vector<double> ratios;
    double mean_conv{0.0};
    double efficiency{0.0};
};

struct FluctuationSummary {
    ModelTag model{ModelTag::Npid};
    std::size_t n_qubits{0};
    std::vector<double> noise_rates;
    std::vector<double> mean_conv;
    double fluctuation_pct{0.0};
};

struct ModelSummary {
    ModelTag model{ModelTag::Npid};
    /// Mean of max_iters / conv over every run of this model.
    double efficiency{0.0};
    std::size_t runs{0};
};

struct Failure {
    RunKey key;
    std::string message;
};

struct SummaryTable {
    std::size_t max_iters{0};
    std::vector<ConfigSummary> configs;
    std::vector<FluctuationSummary> fluctuations;
    std::vector<ModelSummary> models;
    std::vector<Failure> failures;

    [[nodiscard]] const ConfigSummary *find(ModelTag m, std::size_t n, double rate) const {
        for (const auto &c : configs) {
            if (c.model == m && c.n_qubits == n && c.noise_rate == rate) {
                return &c;
            }
        }
        return nullptr;
    }
    [[nodiscard]] const ModelSummary *find(ModelTag m) const {
        for (const auto &s : models) {
            if (s.model == m) {
                return &s;
            }
        }
        return nullptr;
    }
};

/// Aggregates run results; independent of input order.
inline SummaryTable summarize(std::vector<RunResult> results, std::size_t max_iters) {
    std::sort(results.begin(), results.end(),
              [](const RunResult &a, const RunResult &b) { return a.key < b.key; });
    SummaryTable table;
    table.max_iters = max_iters;
    const double cap = static_cast<double>(max_iters);

    std::map<std::tuple<ModelTag, std::size_t, double>, ConfigSummary> configs;
    std::map<ModelTag, std::vector<double>> per_model;
    for (const auto &r : results) {
        const auto k = std::make_tuple(r.key.model, r.key.n_qubits, r.key.noise_rate);
        auto &c = configs[k];
        c.model = r.key.model;
        c.n_qubits = r.key.n_qubits;
        c.noise_rate = r.key.noise_rate;
        const std::size_t conv = r.error ? max_iters : r.record.conv_iterations(max_iters);
        c.conv_iterations.push_back(conv);
        c.ratios.push_back(cap / static_cast<double>(conv));
        per_model[r.key.model].push_back(static_cast<double>(conv));
        if (r.error) {
            table.failures.push_back({r.key, *r.error});
        }
    }
    for (auto &[k, c] : configs) {
        std::vector<double> conv(c.conv_iterations.begin(), c.conv_iterations.end());
        c.mean_conv = mean_of(conv);
        c.efficiency = convergence_efficiency_from_iterations(conv, cap);
        table.configs.push_back(c);
    }

    std::map<std::tuple<ModelTag, std::size_t>, FluctuationSummary> fl;
    for (const auto &c : table.configs) {
        auto &f = fl[{c.model, c.n_qubits}];
        f.model = c.model;
        f.n_qubits = c.n_qubits;
        f.noise_rates.push_back(c.noise_rate);
        f.mean_conv.push_back(c.mean_conv);
    }
    for (auto &[k, f] : fl) {
        if (f.noise_rates.size() >= 2) {
            f.fluctuation_pct = fluctuation_rate(f.mean_conv);
            table.fluctuations.push_back(f);
        }
    }
    for (const auto &[m, conv] : per_model) {
        table.models.push_back({m, convergence_efficiency_from_iterations(conv, cap), conv.size()});
    }
    return table;
}

namespace io {

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double x) {
    char buf[32];
    for (int prec = 12; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) {
            break;
        }
    }
    return buf;
}

inline std::string rate_label(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", rate);
    return buf;
}

inline std::string trace_filename(const RunKey &key) {
    std::ostringstream os;
    os << "trace_" << to_string(key.model) << '_' << key.n_qubits << '_'
       << rate_label(key.noise_rate) << '_' << key.run_index << ".csv";
    return os.str();
}

inline void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    f << text;
    if (!f) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

inline std::string read_text(const std::filesystem::path &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open for reading: " + path.string());
    }
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

/// Splits CSV text into rows of fields, skipping the header line.
inline std::vector<std::vector<std::string>> parse_csv_rows(const std::string &text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) {
            fields.push_back(field);
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

inline double parse_double(const std::string &s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    detail::require(used == s.size(), "malformed number in CSV: " + s);
    return v;
}

inline std::string trace_csv(const RunRecord &rec) {
    const bool with_grad = !rec.grad_norms.empty();
    std::string out = with_grad ? "iter,loss,grad_norm\n" : "iter,loss\n";
    for (std::size_t i = 0; i < rec.losses.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_double(rec.losses[i]);
        if (with_grad) {
            out += ',';
            out += format_double(rec.grad_norms[i]);
        }
        out += '\n';
    }
    return out;
}

/// Rebuilds a RunRecord from trace text; converged_at is recomputed.
inline RunRecord parse_trace_csv(const std::string &text, ModelTag model, double target_loss) {
    RunRecord rec;
    rec.model = model;
    for (const auto &row : parse_csv_rows(text)) {
        detail::require(row.size() == 2 || row.size() == 3, "trace CSV: bad column count");
        detail::require(std::stoull(row[0]) == rec.losses.size(), "trace CSV: iterations out of order");
        rec.losses.push_back(parse_double(row[1]));
        if (row.size() == 3) {
            rec.grad_norms.push_back(parse_double(row[2]));
        }
    }
    for (std::size_t i = 0; i < rec.losses.size(); ++i) {
        if (rec.losses[i] < target_loss) {
            rec.converged_at = i;
            break;
        }
    }
    return rec;
}

} // namespace io

/// Per-iteration mean and population standard deviation across runs.
struct LossCurve {
    std::vector<double> mean;
    std::vector<double> stdev;

    bool operator==(const LossCurve &) const = default;
};

/// Shorter runs are padded with their final loss up to the longest run.
inline LossCurve aggregate_losses(std::span<const RunRecord *const> records) {
    LossCurve curve;
    std::size_t len = 0;
    for (const auto *r : records) {
        len = std::max(len, r->losses.size());
    }
    std::vector<double> column;
    for (std::size_t i = 0; i < len; ++i) {
        column.clear();
        for (const auto *r : records) {
            if (r->losses.empty()) {
                continue;
            }
            column.push_back(i < r->losses.size() ? r->losses[i] : r->losses.back());
        }
        curve.mean.push_back(mean_of(column));
        curve.stdev.push_back(pstdev_of(column));
    }
    return curve;
}

inline std::string loss_curve_csv(const LossCurve &curve) {
    std::string out = "iter,mean,std\n";
    for (std::size_t i = 0; i < curve.mean.size(); ++i) {
        out += std::to_string(i) + ',' + io::format_double(curve.mean[i]) + ',' +
               io::format_double(curve.stdev[i]) + '\n';
    }
    return out;
}

inline LossCurve parse_loss_curve_csv(const std::string &text) {
    LossCurve curve;
    for (const auto &row : io::parse_csv_rows(text)) {
        detail::require(row.size() == 3, "loss curve CSV: bad column count");
        curve.mean.push_back(io::parse_double(row[1]));
        curve.stdev.push_back(io::parse_double(row[2]));
    }
    return curve;
}

/**
 * @brief Writes plot-ready CSVs under `dir`/plots: loss curves per
 * configuration and mean iterations against qubit count and noise rate.
 */
inline void emit_plot_data(const std::vector<RunResult> &results, const SummaryTable &table,
                           const std::filesystem::path &dir) {
    const auto plots = dir / "plots";
    std::filesystem::create_directories(plots);

    std::map<std::tuple<ModelTag, std::size_t, double>, std::vector<const RunRecord *>> groups;
    for (const auto &r : results) {
        groups[{r.key.model, r.key.n_qubits, r.key.noise_rate}].push_back(&r.record);
    }
    for (const auto &[k, recs] : groups) {
        const auto &[m, n, rate] = k;
        std::ostringstream name;
        name << "loss_" << to_string(m) << '_' << n << '_' << io::rate_label(rate) << ".csv";
        io::write_text(plots / name.str(), loss_curve_csv(aggregate_losses(recs)));
    }

    auto row = [](const ConfigSummary &c) {
        std::vector<double> conv(c.conv_iterations.begin(), c.conv_iterations.end());
        std::ostringstream os;
        os << to_string(c.model) << ',' << c.n_qubits << ',' << io::format_double(c.noise_rate)
           << ',' << io::format_double(c.mean_conv) << ',' << io::format_double(pstdev_of(conv))
           << '\n';
        return os.str();
    };
    const std::string header = "model,n_qubits,noise_rate,mean_iterations,std_iterations\n";

    auto by_qubits = table.configs;
    std::sort(by_qubits.begin(), by_qubits.end(), [](const auto &a, const auto &b) {
        return std::tie(a.model, a.noise_rate, a.n_qubits) <
               std::tie(b.model, b.noise_rate, b.n_qubits);
    });
    std::string text = header;
    for (const auto &c : by_qubits) {
        text += row(c);
    }
    io::write_text(plots / "iterations_vs_qubits.csv", text);

    auto by_noise = table.configs;
    std::sort(by_noise.begin(), by_noise.end(), [](const auto &a, const auto &b) {
        return std::tie(a.model, a.n_qubits, a.noise_rate) <
               std::tie(b.model, b.n_qubits, b.noise_rate);
    });
    text = header;
    for (const auto &c : by_noise) {
        text += row(c);
    }
    io::write_text(plots / "iterations_vs_noise.csv", text);
}

inline nlohmann::json to_json(const TrainConfig &cfg) {
    nlohmann::json j{{"lr_theta", cfg.lr_theta},
                     {"lr_net", cfg.lr_net},
                     {"max_iters", cfg.max_iters},
                     {"target_loss", cfg.target_loss},
                     {"noise_policy", to_string(cfg.noise_policy)},
                     {"depth_log", cfg.depth_log == LogBase::Natural ? "e" : "2"},
                     {"record_grad_norms", cfg.record_grad_norms},
                     {"seed", cfg.seed}};
    if (cfg.depth) {
        j["depth"] = *cfg.depth;
    }
    return j;
}

inline TrainConfig train_config_from_json(const nlohmann::json &j) {
    TrainConfig cfg;
    cfg.lr_theta = j.at("lr_theta").get<double>();
    cfg.lr_net = j.at("lr_net").get<double>();
    cfg.max_iters = j.at("max_iters").get<std::size_t>();
    cfg.target_loss = j.at("target_loss").get<double>();
    cfg.noise_policy = noise_policy_from_string(j.at("noise_policy").get<std::string>());
    cfg.depth_log = j.at("depth_log").get<std::string>() == "2" ? LogBase::Two : LogBase::Natural;
    cfg.record_grad_norms = j.at("record_grad_norms").get<bool>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("depth")) {
        cfg.depth = j.at("depth").get<std::size_t>();
    }
    return cfg;
}

inline nlohmann::json to_json(const ExperimentConfig &cfg) {
    nlohmann::json models = nlohmann::json::array();
    for (auto m : cfg.models) {
        models.push_back(to_string(m));
    }
    return {{"qubits", cfg.qubits},
            {"models", std::move(models)},
            {"runs_per_config", cfg.runs_per_config},
            {"noise_rates", cfg.noise_rates},
            {"train", to_json(cfg.base)}};
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json &j) {
    ExperimentConfig cfg;
    cfg.qubits = j.at("qubits").get<std::vector<std::size_t>>();
    cfg.models.clear();
    for (const auto &m : j.at("models")) {
        cfg.models.push_back(model_from_string(m.get<std::string>()));
    }
    cfg.runs_per_config = j.at("runs_per_config").get<std::size_t>();
    cfg.noise_rates = j.at("noise_rates").get<std::vector<double>>();
    cfg.base = train_config_from_json(j.at("train"));
    return cfg;
}

inline nlohmann::json to_json(const RunKey &k) {
    return {{"model", to_string(k.model)},
            {"n_qubits", k.n_qubits},
            {"noise_rate", k.noise_rate},
            {"run", k.run_index}};
}

inline nlohmann::json to_json(const SummaryTable &t, const ExperimentConfig &cfg) {
    nlohmann::json configs = nlohmann::json::array();
    for (const auto &c : t.configs) {
        configs.push_back({{"model", to_string(c.model)},
                           {"n_qubits", c.n_qubits},
                           {"noise_rate", c.noise_rate},
                           {"conv_iterations", c.conv_iterations},
                           {"ratios", c.ratios},
                           {"mean_iterations", c.mean_conv},
                           {"efficiency", c.efficiency}});
    }
    nlohmann::json fluct = nlohmann::json::array();
    for (const auto &f : t.fluctuations) {
        fluct.push_back({{"model", to_string(f.model)},
                         {"n_qubits", f.n_qubits},
                         {"noise_rates", f.noise_rates},
                         {"mean_iterations", f.mean_conv},
                         {"fluctuation_pct", f.fluctuation_pct}});
    }
    nlohmann::json models = nlohmann::json::array();
    for (const auto &m : t.models) {
        models.push_back({{"model", to_string(m.model)}, {"efficiency", m.efficiency}, {"runs", m.runs}});
    }
    nlohmann::json failures = nlohmann::json::array();
    for (const auto &f : t.failures) {
        failures.push_back({{"run", to_json(f.key)}, {"message", f.message}});
    }
    return {{"format", "npid-summary/1"},
            {"config", to_json(cfg)},
            {"max_iters", t.max_iters},
            {"configs", std::move(configs)},
            {"fluctuation", std::move(fluct)},
            {"models", std::move(models)},
            {"failures", std::move(failures)}};
}

inline std::string summary_text(const SummaryTable &t, const ExperimentConfig &cfg) {
    return to_json(t, cfg).dump(2) + "\n";
}

/**
 * @brief Runs every (model, n, noise_rate, run) of the sweep.
 *
 * Runs are independent and may execute on `cfg.jobs` threads; results are
 * sorted by key so the output does not depend on completion order. A failing
 * run is recorded as unconverged and listed in the summary's failures.
 */
inline std::vector<RunResult> run_all(const ExperimentConfig &cfg) {
    cfg.validate();
    const auto keys = cfg.keys();
    std::vector<RunResult> results(keys.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < keys.size(); i = next++) {
            RunResult &r = results[i];
            r.key = keys[i];
            r.record.model = keys[i].model;
            try {
                r.record = replay_run(cfg.base, keys[i]);
            } catch (const std::exception &e) {
                r.error = e.what();
            }
        }
    };
    const std::size_t jobs = std::min(cfg.jobs, keys.size());
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j) {
            pool.emplace_back(worker);
        }
    }
    return results;
}

/// Writes traces, summary.json and plot data for a finished sweep.
inline void write_outputs(const ExperimentConfig &cfg, const std::vector<RunResult> &results,
                          const SummaryTable &table) {
    std::filesystem::create_directories(cfg.out_dir);
    for (const auto &r : results) {
        io::write_text(cfg.out_dir / io::trace_filename(r.key), io::trace_csv(r.record));
    }
    io::write_text(cfg.out_dir / "summary.json", summary_text(table, cfg));
    emit_plot_data(results, table, cfg.out_dir);
}

inline SummaryTable run_experiment(const ExperimentConfig &cfg) {
    const auto results = run_all(cfg);
    SummaryTable table = summarize(results, cfg.base.max_iters);
    if (!cfg.out_dir.empty()) {
        write_outputs(cfg, results, table);
    }
    return table;
}

/**
 * @brief Recomputes the summary of a sweep directory from its trace files.
 *
 * The sweep grid comes from summary.json's config; failures listed there are
 * carried over.
 */
inline std::pair<SummaryTable, ExperimentConfig> recompute_summary(const std::filesystem::path &dir) {
    const auto j = nlohmann::json::parse(io::read_text(dir / "summary.json"));
    detail::require(j.value("format", "") == "npid-summary/1", "summary.json: unsupported format");
    ExperimentConfig cfg = experiment_config_from_json(j.at("config"));
    cfg.out_dir = dir;

    std::vector<RunResult> results;
    for (const auto &key : cfg.keys()) {
        RunResult r;
        r.key = key;
        r.record = io::parse_trace_csv(io::read_text(dir / io::trace_filename(key)), key.model,
                                       cfg.base.target_loss);
        for (const auto &f : j.at("failures")) {
            const auto &fk = f.at("run");
            if (fk.at("model") == to_string(key.model) && fk.at("n_qubits") == key.n_qubits &&
                fk.at("noise_rate") == key.noise_rate && fk.at("run") == key.run_index) {
                r.error = f.at("message").get<std::string>();
            }
        }
        results.push_back(std::move(r));
    }
    return {summarize(std::move(results), cfg.base.max_iters), cfg};
}

} // namespace npid
