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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Sweep artifacts go to ./acceptance_out.

#include "dense_oracle.hpp"
#include "npid/harness.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <thread>

namespace {

using namespace npid;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass{false};
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double max_abs_diff(const GradientVector &a, const GradientVector &b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

Outcome gradient_oracles() {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(2026);
    double shift_dev = 0.0;
    double fd_dev = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        const std::size_t depth = 1 + static_cast<std::size_t>((trial / 3) % 3);
        const CircuitSpec spec = build_random_circuit(n, depth, gen());
        const ParamVector theta = oracle::random_params(spec.n_params, gen);
        const State psi = oracle::random_state(n, gen);
        const GradientVector adj = gradient(spec, theta, psi);
        shift_dev = std::max(shift_dev, max_abs_diff(adj, parameter_shift_gradient(spec, theta, psi)));
        fd_dev = std::max(fd_dev, max_abs_diff(adj, finite_diff_gradient(spec, theta, psi, 1e-5)));
    }
    const double t = seconds_since(t0);
    return {shift_dev < 1e-8 && fd_dev < 1e-6 && t < 60.0,
            fmt("50 instances, max |adjoint-shift| = %.2e, max |adjoint-fd| = %.2e, %.2fs",
                shift_dev, fd_dev, t)};
}

Outcome single_qubit_analytic() {
    const CircuitSpec spec = oracle::single_rotation_circuit(GateKind::RX);
    const State zero(1);
    double cost_dev = 0.0;
    double grad_dev = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double theta = two_pi * k / 100.0;
        const auto cg = cost_and_gradient(spec, std::vector<double>{theta}, zero);
        const double direct = cost(run_circuit(spec, ParamVector(1, theta), zero));
        cost_dev = std::max({cost_dev, std::abs(direct - std::pow(std::sin(theta / 2), 2)),
                             std::abs(cg.loss - std::pow(std::sin(theta / 2), 2))});
        grad_dev = std::max(grad_dev, std::abs(cg.grad[0] - std::sin(theta) / 2));
    }
    return {cost_dev < 1e-10 && grad_dev < 1e-8,
            fmt("100 angles, max cost error %.2e, max gradient error %.2e", cost_dev, grad_dev)};
}

Outcome dense_oracle() {
    std::mt19937_64 gen(7);
    double dev = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        const std::size_t depth = 1 + static_cast<std::size_t>(trial % 4);
        const CircuitSpec spec = build_random_circuit(n, depth, gen());
        const ParamVector theta = oracle::random_params(spec.n_params, gen);
        const State psi = random_input_state(n, gen());
        const State out = run_circuit(spec, theta, psi);
        dev = std::max(dev, oracle::max_abs_diff(out, oracle::circuit_unitary(spec, theta) *
                                                          oracle::to_eigen(psi)));
    }
    return {dev < 1e-10, fmt("20 specs n<=4, max amplitude error %.2e", dev)};
}

Outcome linearization() {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> th(0.0, two_pi);
    double worst = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
        const Axis axis = static_cast<Axis>(gen() % 3);
        const double theta = th(gen);
        double lo = 1e300;
        double hi = 0.0;
        for (double dt : {1e-2, 5e-3, 2.5e-3}) {
            const double s = linearization_residual(axis, theta, dt) / (dt * dt);
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        worst = std::max(worst, (hi - lo) / lo);
    }
    return {worst < 0.10, fmt("30 (axis, theta) pairs, max relative spread %.2e", worst)};
}

Outcome metric_fidelity() {
    const std::vector<std::vector<double>> columns{
        {74, 90, 79, 83},     {90, 94, 92, 89},     {127, 147, 133, 143},
        {171, 161, 156, 172}, {304, 285, 304, 281}, {845, 858, 911, 817}};
    const std::vector<double> reference{7.18, 2.10, 5.76, 4.08, 3.61, 3.98};
    double worst = 0.0;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        worst = std::max(worst, std::abs(fluctuation_rate(columns[c]) - reference[c]));
    }
    const std::vector<double> neqp_s{90, 153, 448, 1036, 1500, 1500};
    const double ec = convergence_efficiency_from_iterations(neqp_s, 1500);
    return {worst < 0.05 && std::abs(ec - 5.544) < 0.01,
            fmt("max fluctuation error %.3f pp, NEQP-S E_c %.4f", worst, ec)};
}

/// Shared training settings for the convergence checks.
TrainConfig convergence_base() {
    TrainConfig base;
    base.lr_theta = 0.01;
    base.lr_net = 1000.0;
    base.max_iters = 1500;
    base.target_loss = 1e-3;
    base.noise_policy = NoisePolicy::Frozen;
    base.seed = 2026;
    return base;
}

struct OrderingResult {
    Outcome outcome;
    SummaryTable table;
    ExperimentConfig cfg;
};

OrderingResult ordering_at(const std::vector<std::size_t> &qubits) {
    ExperimentConfig cfg;
    cfg.qubits = qubits;
    cfg.models = {ModelTag::Npid, ModelTag::Qv};
    cfg.runs_per_config = 5;
    cfg.noise_rates = {0.01};
    cfg.base = convergence_base();
    cfg.out_dir = "acceptance_out/ordering";
    cfg.jobs = std::max(1U, std::thread::hardware_concurrency());
    const auto results = run_all(cfg);
    const SummaryTable t = summarize(results, cfg.base.max_iters);
    write_outputs(cfg, results, t);

    bool a = true;
    std::string per_n;
    for (std::size_t n : qubits) {
        const auto *np = t.find(ModelTag::Npid, n, 0.01);
        const auto *qv = t.find(ModelTag::Qv, n, 0.01);
        a = a && np->mean_conv < qv->mean_conv;
        per_n += fmt(" n=%zu npid %.1f vs qv %.1f;", n, np->mean_conv, qv->mean_conv);
    }
    bool b = true;
    for (const auto &r : results) {
        if (r.key.model == ModelTag::Npid) {
            b = b && !r.error && r.record.converged_at.has_value();
        }
    }
    const double ec_npid = t.find(ModelTag::Npid)->efficiency;
    const double ec_qv = t.find(ModelTag::Qv)->efficiency;
    const bool c = ec_npid >= 2.0 * ec_qv;
    return {{a && b && c,
             fmt("(a) %s (b) %s (c) %s:%s E_c npid %.3f, qv %.3f, ratio %.2f", a ? "ok" : "no",
                 b ? "ok" : "no", c ? "ok" : "no", per_n.c_str(), ec_npid, ec_qv,
                 ec_npid / ec_qv)},
            t,
            cfg};
}

/// Ordering at 7..9 qubits; falls back to 5..7 if the budget is exceeded.
OrderingResult convergence_ordering() {
    const auto t0 = Clock::now();
    OrderingResult r = ordering_at({7, 8, 9});
    const double t = seconds_since(t0);
    if (t > 7200.0) {
        OrderingResult small = ordering_at({5, 6, 7});
        small.outcome.detail += fmt(" [n=7..9 took %.0fs, reran at n=5..7]", t);
        return small;
    }
    r.outcome.detail += fmt(", %.0fs", t);
    return r;
}

Outcome noise_robustness() {
    const auto t0 = Clock::now();
    ExperimentConfig cfg;
    cfg.qubits = {7};
    cfg.models = {ModelTag::Npid};
    cfg.runs_per_config = 5;
    cfg.noise_rates = {0.03, 0.05, 0.07, 0.09};
    cfg.base = convergence_base();
    cfg.out_dir = "acceptance_out/noise";
    cfg.jobs = std::max(1U, std::thread::hardware_concurrency());
    const SummaryTable t = run_experiment(cfg);
    if (t.fluctuations.size() != 1) {
        return {false, "no fluctuation entry"};
    }
    const auto &f = t.fluctuations.front();
    std::string means;
    for (std::size_t i = 0; i < f.noise_rates.size(); ++i) {
        means += fmt(" %s:%.1f", io::rate_label(f.noise_rates[i]).c_str(), f.mean_conv[i]);
    }
    return {f.fluctuation_pct < 15.0 && t.failures.empty(),
            fmt("n=7 mean iterations%s, fluctuation %.2f%%, %.0fs", means.c_str(),
                f.fluctuation_pct, seconds_since(t0))};
}

Outcome definitional_equivalence() {
    TrainConfig cfg = convergence_base();
    cfg.n_qubits = 7;
    cfg.max_iters = 300;
    bool same = true;
    std::size_t iters = 0;
    for (NoisePolicy policy : {NoisePolicy::Frozen, NoisePolicy::Resample}) {
        cfg.noise_policy = policy;
        for (std::size_t run = 0; run < 2; ++run) {
            const RunKey key{ModelTag::Npid, 7, 0.01, run};
            const TrainConfig rc = run_config(cfg, key);
            const auto seed = circuit_seed_for(cfg.seed, 7, run);
            const RunRecord npid = train_loop(ModelTag::Npid, rc, seed, NpidOptions{1.0});
            const RunRecord qv = train_loop(ModelTag::Qv, rc, seed);
            same = same && npid.losses == qv.losses;
            iters += npid.losses.size();
        }
    }
    return {same, fmt("4 runs at n=7, %zu iterations compared bit for bit", iters)};
}

Outcome determinism(const OrderingResult &ordering) {
    const auto &cfg = ordering.cfg;
    std::size_t replayed = 0;
    bool traces = true;
    for (const auto &key : cfg.keys()) {
        if (key.n_qubits != cfg.qubits.front() || key.run_index >= 2) {
            continue;
        }
        const RunRecord rec = replay_run(cfg.base, key);
        traces = traces &&
                 io::trace_csv(rec) == io::read_text(cfg.out_dir / io::trace_filename(key));
        ++replayed;
    }
    const std::string stored = io::read_text(cfg.out_dir / "summary.json");
    const auto [recomputed, rcfg] = recompute_summary(cfg.out_dir);
    const bool recompute_ok = summary_text(recomputed, rcfg) == stored;

    ExperimentConfig small;
    small.qubits = {4, 5};
    small.models = {ModelTag::Npid, ModelTag::NeqpSmall, ModelTag::Qv};
    small.runs_per_config = 2;
    small.noise_rates = {0.01, 0.05};
    small.base = convergence_base();
    small.base.max_iters = 60;
    small.base.noise_policy = NoisePolicy::Resample;
    small.out_dir = "acceptance_out/repeat_a";
    run_experiment(small);
    small.out_dir = "acceptance_out/repeat_b";
    small.jobs = 3;
    run_experiment(small);
    const bool stable = io::read_text("acceptance_out/repeat_a/summary.json") ==
                        io::read_text("acceptance_out/repeat_b/summary.json");
    return {traces && recompute_ok && stable,
            fmt("%zu replays %s, recomputed summary %s, repeated sweep summary %s", replayed,
                traces ? "identical" : "DIFFER", recompute_ok ? "identical" : "DIFFERS",
                stable ? "byte-identical" : "DIFFERS")};
}

} // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char *name, const Outcome &o) {
        std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, name,
                    o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    };
    auto guarded = [](const std::function<Outcome()> &f) -> Outcome {
        try {
            return f();
        } catch (const std::exception &e) {
            return {false, std::string("exception: ") + e.what()};
        }
    };

    std::filesystem::create_directories("acceptance_out");
    report(1, "gradient oracle agreement", guarded(gradient_oracles));
    report(2, "single-qubit analytic case", guarded(single_qubit_analytic));
    report(3, "dense-matrix oracle", guarded(dense_oracle));
    report(4, "linearization residual scaling", guarded(linearization));
    report(5, "metric fidelity", guarded(metric_fidelity));

    OrderingResult ordering;
    try {
        ordering = convergence_ordering();
    } catch (const std::exception &e) {
        ordering.outcome = {false, std::string("exception: ") + e.what()};
    }
    report(6, "convergence ordering", ordering.outcome);
    report(7, "noise robustness", guarded(noise_robustness));
    report(8, "definitional equivalence", guarded(definitional_equivalence));
    report(9, "determinism", guarded([&] { return determinism(ordering); }));

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
