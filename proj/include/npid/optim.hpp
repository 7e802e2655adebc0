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
 * Training strategies for noisy variational circuits:
 *
 *  - NPID: gradient descent whose step is scaled by a PID output with gains
 *    produced by a small network that is itself trained online.
 *  - NEQP: a network maps a fixed random input to the circuit parameters and
 *    is trained through the circuit loss.
 *  - QV:   plain gradient descent on the circuit parameters.
 *
 * Each strategy evaluates loss and gradient at perturbed parameters
 * theta + delta * alpha, with alpha drawn by a NoiseSource: once per run
 * (frozen) or afresh for every evaluation (resample). The perturbation is
 * never written back into the stored parameters.
 */
#pragma once

#include "circuit.hpp"
#include "grad.hpp"
#include "neural.hpp"
#include "util.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace npid {

enum class ModelTag { Npid, NeqpSmall, NeqpLarge, Qv };

inline constexpr std::array all_models{ModelTag::Npid, ModelTag::NeqpSmall,
                                       ModelTag::NeqpLarge, ModelTag::Qv};

constexpr std::string_view to_string(ModelTag m) noexcept {
    switch (m) {
    case ModelTag::Npid:
        return "npid";
    case ModelTag::NeqpSmall:
        return "neqp-s";
    case ModelTag::NeqpLarge:
        return "neqp-l";
    case ModelTag::Qv:
        return "qv";
    }
    return "?";
}

inline ModelTag model_from_string(std::string_view name) {
    for (ModelTag m : all_models) {
        if (to_string(m) == name) {
            return m;
        }
    }
    throw Error("unknown model: " + std::string(name));
}

struct PidState {
    double e_prev{0.0};
    bool initialized{false};
};

struct PidGains {
    double kp{0.0};
    double ki{0.0};
    double kd{0.0};
};

struct PidTerms {
    double p{0.0};
    double i{0.0};
    double d{0.0};
};

struct PidOutput {
    double o_pid{0.0};
    PidTerms terms;
};

/**
 * @brief Discrete PID terms of the loss signal and their weighted sum.
 *
 * P = e, I = e + e_prev, D = e - e_prev. Before the first commit the previous
 * loss is taken to be e itself. `state` is not modified.
 */
inline PidOutput pid_output(double e, const PidState &state, const PidGains &gains) {
    const double prev = state.initialized ? state.e_prev : e;
    PidOutput out;
    out.terms = {e, e + prev, e - prev};
    out.o_pid = gains.kp * out.terms.p + gains.ki * out.terms.i + gains.kd * out.terms.d;
    return out;
}

enum class NoisePolicy {
    /// One alpha per run, applied to every evaluation.
    Frozen,
    /// A new alpha for every iteration.
    Resample,
};

constexpr std::string_view to_string(NoisePolicy p) noexcept {
    return p == NoisePolicy::Frozen ? "frozen" : "resample";
}

inline NoisePolicy noise_policy_from_string(std::string_view name) {
    if (name == "frozen") {
        return NoisePolicy::Frozen;
    }
    if (name == "resample") {
        return NoisePolicy::Resample;
    }
    throw Error("unknown noise policy: " + std::string(name));
}

/// Supplies the additive perturbation delta * alpha for each iteration.
class NoiseSource {
  public:
    NoiseSource(double rate, NoisePolicy policy, std::uint64_t seed)
        : noise_{rate}, policy_{policy}, rng_{seed} {}

    /// Perturbation for the next evaluation of an `n`-parameter circuit.
    const std::vector<double> &next(std::size_t n) {
        if (policy_ == NoisePolicy::Resample || !drawn_) {
            delta_.resize(n);
            for (auto &d : delta_) {
                d = noise_.rate * rng_.normal();
            }
            drawn_ = true;
        }
        detail::require(delta_.size() == n, "NoiseSource: parameter count changed");
        return delta_;
    }

    [[nodiscard]] NoisePolicy policy() const noexcept { return policy_; }

  private:
    NoiseModel noise_;
    NoisePolicy policy_;
    Rng rng_;
    std::vector<double> delta_;
    bool drawn_{false};
};

struct TrainConfig {
    std::size_t n_qubits{7};
    /// Circuit depth; floor(n^2 log n) when unset.
    std::optional<std::size_t> depth{};
    LogBase depth_log{LogBase::Natural};
    double lr_theta{0.1};
    double lr_net{0.01};
    std::size_t max_iters{1500};
    double target_loss{1e-3};
    double noise_rate{0.01};
    NoisePolicy noise_policy{NoisePolicy::Frozen};
    std::uint64_t seed{0};
    bool record_grad_norms{false};

    [[nodiscard]] std::size_t circuit_depth() const {
        return depth ? *depth : depth_schedule(n_qubits, depth_log);
    }

    void validate() const {
        detail::require(n_qubits >= 2, "TrainConfig: need at least 2 qubits");
        detail::require(lr_theta > 0.0 && std::isfinite(lr_theta),
                        "TrainConfig: lr_theta must be positive");
        detail::require(lr_net > 0.0 && std::isfinite(lr_net),
                        "TrainConfig: lr_net must be positive");
        detail::require(max_iters >= 1, "TrainConfig: max_iters must be >= 1");
        detail::require(target_loss > 0.0 && target_loss <= 1.0,
                        "TrainConfig: target_loss must be in (0, 1]");
        detail::require(noise_rate >= 0.0 && std::isfinite(noise_rate),
                        "TrainConfig: noise_rate must be >= 0");
        detail::require(!depth || *depth >= 1, "TrainConfig: depth must be >= 1");
    }
};

/// Per-iteration trace of one training run.
struct RunRecord {
    ModelTag model{ModelTag::Qv};
    std::vector<double> losses;
    /// First iteration whose loss is below the target.
    std::optional<std::size_t> converged_at{};
    std::vector<double> grad_norms;
    /// NPID only: gains produced at every iteration.
    std::vector<PidGains> gains;

    /// Iterations used, counting the converging one; max_iters if unconverged.
    [[nodiscard]] std::size_t conv_iterations(std::size_t max_iters) const {
        return converged_at ? *converged_at + 1 : max_iters;
    }
};

struct StepResult {
    double loss{0.0};
    double grad_norm{0.0};
};

struct NpidStepResult {
    double loss{0.0};
    double grad_norm{0.0};
    PidGains gains;
    PidOutput pid;
};

/// Overrides for exercising NPID against its degenerate cases.
struct NpidOptions {
    /// Replace o_pid by this value in the parameter update.
    std::optional<double> forced_multiplier{};
};

namespace detail {
inline std::vector<double> add(std::span<const double> a, std::span<const double> b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] + b[i];
    }
    return out;
}

inline void check_loss(double loss) {
    if (!std::isfinite(loss)) {
        throw NumericalError("training produced a non-finite loss");
    }
}
} // namespace detail

/**
 * @brief One NPID iteration. Updates `theta`, `mlp` and `state` in place.
 *
 * 1. e, g = loss and gradient at theta + delta.
 * 2. (kp, ki, kd) = mlp(e, P, I, D); o_pid = kp P + ki I + kd D.
 * 3. theta <- theta - lr_theta * o_pid * g.
 * 4. Gain network: with g' the gradient at the updated theta plus the same
 *    delta, dL'/d(o_pid) = -lr_theta <g', g>. Backpropagate that times
 *    (P, I, D) through the network and take one SGD step with lr_net.
 * 5. e_prev <- e.
 */
inline NpidStepResult npid_step(ParamVector &theta, const CircuitSpec &spec,
                                const State &psi_in, Mlp &mlp, PidState &state,
                                const TrainConfig &cfg, NoiseSource &noise,
                                const NpidOptions &options = {}) {
    detail::require(mlp.input_dim() == 4 && mlp.output_dim() == 3,
                    "npid_step: network must map 4 inputs to 3 gains");
    const auto &delta = noise.next(theta.size());
    const auto noisy = detail::add(theta.values, delta);
    const CostAndGradient cg = cost_and_gradient(spec, noisy, psi_in);
    detail::check_loss(cg.loss);

    NpidStepResult out;
    out.loss = cg.loss;
    out.grad_norm = cg.grad.norm();

    const double e = cg.loss;
    const PidOutput probe = pid_output(e, state, {});
    const std::array<double, 4> features{e, probe.terms.p, probe.terms.i, probe.terms.d};
    const auto k = mlp.forward(features);
    out.gains = {k[0], k[1], k[2]};
    out.pid = pid_output(e, state, out.gains);
    const double multiplier = options.forced_multiplier.value_or(out.pid.o_pid);

    const std::vector<double> &g = cg.grad.values;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        theta[i] -= cfg.lr_theta * g[i] * multiplier;
    }

    const auto noisy_next = detail::add(theta.values, delta);
    const CostAndGradient next = cost_and_gradient(spec, noisy_next, psi_in);
    double dloss_dopid = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        dloss_dopid -= cfg.lr_theta * next.grad.values[i] * g[i];
    }
    const std::array<double, 3> gain_grad{dloss_dopid * out.pid.terms.p,
                                          dloss_dopid * out.pid.terms.i,
                                          dloss_dopid * out.pid.terms.d};
    mlp.sgd_step(mlp.backward(gain_grad), cfg.lr_net);

    state.e_prev = e;
    state.initialized = true;
    return out;
}

/// One vanilla gradient-descent iteration; updates `theta` in place.
inline StepResult qv_step(ParamVector &theta, const CircuitSpec &spec, const State &psi_in,
                          const TrainConfig &cfg, NoiseSource &noise) {
    const auto &delta = noise.next(theta.size());
    const auto noisy = detail::add(theta.values, delta);
    const CostAndGradient cg = cost_and_gradient(spec, noisy, psi_in);
    detail::check_loss(cg.loss);
    const std::vector<double> &g = cg.grad.values;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        theta[i] -= cfg.lr_theta * g[i];
    }
    return {cg.loss, cg.grad.norm()};
}

/**
 * @brief One NEQP iteration; only the network is trained.
 *
 * theta = mlp(input_vec) is regenerated every call. Since the noise is
 * additive, dL/dtheta equals the gradient at the perturbed point.
 */
inline StepResult neqp_step(std::span<const double> input_vec, const CircuitSpec &spec,
                            const State &psi_in, Mlp &mlp, const TrainConfig &cfg,
                            NoiseSource &noise) {
    detail::require(mlp.output_dim() == spec.n_params,
                    "neqp_step: network output must match n_params");
    const auto theta = mlp.forward(input_vec);
    const auto noisy = detail::add(theta, noise.next(theta.size()));
    const CostAndGradient cg = cost_and_gradient(spec, noisy, psi_in);
    detail::check_loss(cg.loss);
    mlp.sgd_step(mlp.backward(cg.grad.values), cfg.lr_net);
    return {cg.loss, cg.grad.norm()};
}

/// A circuit and its input state.
struct Problem {
    CircuitSpec spec;
    State psi_in;
};

/// Circuit structure and input state are both derived from `circuit_seed`.
inline Problem make_problem(std::size_t n_qubits, std::size_t depth,
                            std::uint64_t circuit_seed) {
    return {build_random_circuit(n_qubits, depth, derive_seed(circuit_seed, 1)),
            random_input_state(n_qubits, derive_seed(circuit_seed, 2))};
}

/// Sub-streams of the training seed. Shared by all models so that runs with
/// the same seed start from the same parameters and see the same noise.
namespace seed_stream {
inline constexpr std::uint64_t init_params = 11;
inline constexpr std::uint64_t noise = 12;
inline constexpr std::uint64_t network = 13;
inline constexpr std::uint64_t neqp_input = 14;
} // namespace seed_stream

/// Uniform on [0, 2pi) per slot.
inline ParamVector initial_params(std::size_t n_params, std::uint64_t seed) {
    Rng rng(derive_seed(seed, seed_stream::init_params));
    ParamVector theta(n_params);
    for (auto &v : theta.values) {
        v = rng.uniform(0.0, two_pi);
    }
    return theta;
}

/// Fixed standard-normal network input for NEQP.
inline std::vector<double> neqp_input(std::size_t dim, std::uint64_t seed) {
    Rng rng(derive_seed(seed, seed_stream::neqp_input));
    std::vector<double> x(dim);
    for (auto &v : x) {
        v = rng.normal();
    }
    return x;
}

/**
 * @brief Trains one model on one problem until loss < target_loss or the
 * iteration cap.
 */
inline RunRecord train(ModelTag model, const Problem &problem, const TrainConfig &cfg,
                       const NpidOptions &npid_options = {}) {
    cfg.validate();
    const CircuitSpec &spec = problem.spec;
    detail::require(spec.n_params > 0, "train: circuit has no parameters");
    NoiseSource noise(cfg.noise_rate, cfg.noise_policy,
                      derive_seed(cfg.seed, seed_stream::noise));
    const std::uint64_t net_seed = derive_seed(cfg.seed, seed_stream::network);

    RunRecord rec;
    rec.model = model;
    rec.losses.reserve(cfg.max_iters);

    auto record = [&](double loss, double grad_norm, std::size_t it) {
        rec.losses.push_back(loss);
        if (cfg.record_grad_norms) {
            rec.grad_norms.push_back(grad_norm);
        }
        if (loss < cfg.target_loss) {
            rec.converged_at = it;
            return true;
        }
        return false;
    };

    switch (model) {
    case ModelTag::Npid: {
        ParamVector theta = initial_params(spec.n_params, cfg.seed);
        Mlp mlp = mlp_new(Architecture::Npid, spec.n_params, net_seed);
        PidState state;
        for (std::size_t it = 0; it < cfg.max_iters; ++it) {
            const auto r = npid_step(theta, spec, problem.psi_in, mlp, state, cfg, noise,
                                     npid_options);
            rec.gains.push_back(r.gains);
            if (record(r.loss, r.grad_norm, it)) {
                break;
            }
        }
        break;
    }
    case ModelTag::Qv: {
        ParamVector theta = initial_params(spec.n_params, cfg.seed);
        for (std::size_t it = 0; it < cfg.max_iters; ++it) {
            const auto r = qv_step(theta, spec, problem.psi_in, cfg, noise);
            if (record(r.loss, r.grad_norm, it)) {
                break;
            }
        }
        break;
    }
    case ModelTag::NeqpSmall:
    case ModelTag::NeqpLarge: {
        const Architecture arch =
            model == ModelTag::NeqpSmall ? Architecture::NeqpSmall : Architecture::NeqpLarge;
        Mlp mlp = mlp_new(arch, spec.n_params, net_seed);
        const auto input = neqp_input(mlp.input_dim(), cfg.seed);
        for (std::size_t it = 0; it < cfg.max_iters; ++it) {
            const auto r = neqp_step(input, spec, problem.psi_in, mlp, cfg, noise);
            if (record(r.loss, r.grad_norm, it)) {
                break;
            }
        }
        break;
    }
    }
    return rec;
}

/// Builds the problem from `circuit_seed` with depth from the config, then trains.
inline RunRecord train_loop(ModelTag model, const TrainConfig &cfg, std::uint64_t circuit_seed,
                            const NpidOptions &npid_options = {}) {
    cfg.validate();
    const Problem problem = make_problem(cfg.n_qubits, cfg.circuit_depth(), circuit_seed);
    return train(model, problem, cfg, npid_options);
}

} // namespace npid
