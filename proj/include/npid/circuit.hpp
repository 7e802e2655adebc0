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
 * Random layered circuits, random product input states, parameter noise and
 * full-circuit execution.
 */
#pragma once

#include "qsim.hpp"
#include "util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace npid {

using State = Statevector<double>;

/// Trainable rotation angles, in radians.
struct ParamVector {
    std::vector<double> values;

    ParamVector() = default;
    explicit ParamVector(std::vector<double> v) : values(std::move(v)) {}
    explicit ParamVector(std::size_t n, double fill = 0.0) : values(n, fill) {}

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    double &operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    [[nodiscard]] bool all_finite() const noexcept {
        return std::ranges::all_of(values, [](double x) { return std::isfinite(x); });
    }

    bool operator==(const ParamVector &) const = default;
};

/// A CNOT pair followed by RX on the control and RZ on the target.
struct Pairing {
    std::size_t control{0};
    std::size_t target{0};
    std::size_t rx_slot{0};
    std::size_t rz_slot{0};

    bool operator==(const Pairing &) const = default;
};

struct LayerSpec {
    /// One rotation per qubit, in qubit order.
    std::vector<Gate> opening_rotations;
    /// floor(n/2) disjoint pairs.
    std::vector<Pairing> pairings;

    bool operator==(const LayerSpec &) const = default;
};

struct CircuitSpec {
    std::size_t n_qubits{0};
    std::vector<LayerSpec> layers;
    std::size_t n_params{0};

    [[nodiscard]] std::size_t depth() const noexcept { return layers.size(); }

    /// Gates in application order.
    [[nodiscard]] std::vector<Gate> gates() const {
        std::vector<Gate> out;
        for (const auto &layer : layers) {
            out.insert(out.end(), layer.opening_rotations.begin(),
                       layer.opening_rotations.end());
            for (const auto &p : layer.pairings) {
                out.push_back(Gate::cnot(p.control, p.target));
                out.push_back(Gate::rotation(GateKind::RX, p.control, p.rx_slot));
                out.push_back(Gate::rotation(GateKind::RZ, p.target, p.rz_slot));
            }
        }
        return out;
    }

    /// Checks qubit ranges, pair disjointness and the slot layout.
    void validate() const {
        detail::require(n_qubits >= 1, "CircuitSpec: no qubits");
        std::vector<int> slot_seen(n_params, 0);
        auto use_slot = [&](std::size_t slot) {
            detail::require(slot < n_params, "CircuitSpec: slot out of range");
            detail::require(slot_seen[slot]++ == 0, "CircuitSpec: slot used twice");
        };
        for (const auto &layer : layers) {
            detail::require(layer.opening_rotations.size() == n_qubits,
                            "CircuitSpec: layer must rotate every qubit once");
            std::vector<int> touched(n_qubits, 0);
            for (const auto &g : layer.opening_rotations) {
                detail::require(is_rotation(g.kind) && g.param_slot.has_value(),
                                "CircuitSpec: opening gate must be a rotation");
                detail::require(g.target < n_qubits, "CircuitSpec: qubit out of range");
                detail::require(touched[g.target]++ == 0,
                                "CircuitSpec: qubit rotated twice in a layer");
                use_slot(*g.param_slot);
            }
            detail::require(layer.pairings.size() == n_qubits / 2,
                            "CircuitSpec: layer must have floor(n/2) pairs");
            std::vector<int> paired(n_qubits, 0);
            for (const auto &p : layer.pairings) {
                detail::require(p.control < n_qubits && p.target < n_qubits,
                                "CircuitSpec: pair qubit out of range");
                detail::require(p.control != p.target, "CircuitSpec: degenerate pair");
                detail::require(paired[p.control]++ == 0 && paired[p.target]++ == 0,
                                "CircuitSpec: pairs overlap");
                use_slot(p.rx_slot);
                use_slot(p.rz_slot);
            }
        }
        detail::require(std::ranges::all_of(slot_seen, [](int c) { return c == 1; }),
                        "CircuitSpec: unused parameter slot");
    }

    bool operator==(const CircuitSpec &) const = default;
};

enum class LogBase { Natural, Two };

/// floor(n^2 log n); natural log unless overridden.
inline std::size_t depth_schedule(std::size_t n_qubits, LogBase base = LogBase::Natural) {
    detail::require(n_qubits >= 2, "depth_schedule: need at least 2 qubits");
    const double n = static_cast<double>(n_qubits);
    const double lg = base == LogBase::Natural ? std::log(n) : std::log2(n);
    return static_cast<std::size_t>(std::floor(n * n * lg));
}

/**
 * @brief Product state (x)_q RZ(c_q) RY(b_q) RX(a_q) |0>.
 *
 * `angles` holds (a_q, b_q, c_q) for q = 0, 1, ..., n-1.
 */
inline State input_state_from_angles(std::size_t n_qubits, std::span<const double> angles) {
    detail::require(n_qubits >= 1, "input state: need at least one qubit");
    detail::require(angles.size() == 3 * n_qubits, "input state: need 3 angles per qubit");
    State psi(n_qubits);
    for (std::size_t q = 0; q < n_qubits; ++q) {
        apply_gate_unchecked(psi, Gate::rotation(GateKind::RX, q, 0), angles[3 * q]);
        apply_gate_unchecked(psi, Gate::rotation(GateKind::RY, q, 0), angles[3 * q + 1]);
        apply_gate_unchecked(psi, Gate::rotation(GateKind::RZ, q, 0), angles[3 * q + 2]);
    }
    return psi;
}

/// Random product input state with angles uniform on [0, 2pi).
inline State random_input_state(std::size_t n_qubits, std::uint64_t seed) {
    detail::require(n_qubits >= 1, "random_input_state: need at least one qubit");
    Rng rng(seed);
    std::vector<double> angles(3 * n_qubits);
    for (auto &a : angles) {
        a = rng.uniform(0.0, two_pi);
    }
    return input_state_from_angles(n_qubits, angles);
}

/**
 * @brief Layered random circuit.
 *
 * Each layer applies a rotation of uniformly random kind to every qubit,
 * then pairs the qubits by a uniformly random permutation (consecutive
 * entries form (control, target); with odd n the last entry idles) and
 * applies CNOT, RX(control), RZ(target) per pair. Parameter slots follow
 * gate-application order.
 */
inline CircuitSpec build_random_circuit(std::size_t n_qubits, std::size_t depth,
                                        std::uint64_t seed) {
    detail::require(n_qubits >= 2, "build_random_circuit: need at least 2 qubits");
    detail::require(depth >= 1, "build_random_circuit: depth must be positive");
    constexpr std::array kinds{GateKind::RX, GateKind::RY, GateKind::RZ};

    Rng rng(seed);
    CircuitSpec spec;
    spec.n_qubits = n_qubits;
    spec.layers.reserve(depth);
    std::size_t slot = 0;
    std::vector<std::size_t> perm(n_qubits);
    for (std::size_t d = 0; d < depth; ++d) {
        LayerSpec layer;
        layer.opening_rotations.reserve(n_qubits);
        for (std::size_t q = 0; q < n_qubits; ++q) {
            const GateKind kind = kinds[rng.below(kinds.size())];
            layer.opening_rotations.push_back(Gate::rotation(kind, q, slot++));
        }
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = n_qubits - 1; i > 0; --i) {
            std::swap(perm[i], perm[rng.below(i + 1)]);
        }
        for (std::size_t p = 0; p + 1 < n_qubits; p += 2) {
            Pairing pair{perm[p], perm[p + 1], slot, slot + 1};
            slot += 2;
            layer.pairings.push_back(pair);
        }
        spec.layers.push_back(std::move(layer));
    }
    spec.n_params = slot;
    return spec;
}

/// Parameter noise theta_hat = theta + rate * alpha, alpha ~ N(0, 1) per entry.
struct NoiseModel {
    double rate{0.0};

    explicit NoiseModel(double r = 0.0) : rate(r) {
        detail::require(rate >= 0.0 && std::isfinite(rate),
                        "NoiseModel: rate must be finite and nonnegative");
    }
};

/// Draws a fresh perturbation on every call.
inline ParamVector perturb_params(const ParamVector &theta, const NoiseModel &noise,
                                  Rng &rng) {
    ParamVector out(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        out[i] = theta[i] + noise.rate * rng.normal();
    }
    return out;
}

namespace detail {
inline void check_run_shapes(const CircuitSpec &spec, std::span<const double> theta,
                             const State &psi_in) {
    require(theta.size() == spec.n_params, "parameter vector length != n_params");
    require(psi_in.num_qubits() == spec.n_qubits, "input state qubit count mismatch");
}
} // namespace detail

/// Applies every gate of `spec` in order to `state`.
inline void apply_circuit(const CircuitSpec &spec, std::span<const double> theta,
                          State &state) {
    detail::check_run_shapes(spec, theta, state);
    auto arr = state.data();
    for (const auto &layer : spec.layers) {
        for (const auto &g : layer.opening_rotations) {
            apply_gate_unchecked(state, g, theta[*g.param_slot]);
        }
        for (const auto &p : layer.pairings) {
            kernels::apply_cnot(arr, p.control, p.target);
            kernels::apply_rx(arr, p.control, theta[p.rx_slot]);
            kernels::apply_rz(arr, p.target, theta[p.rz_slot]);
        }
    }
}

/// |psi_out> = U(theta_hat) |psi_in>.
inline State run_circuit(const CircuitSpec &spec, const ParamVector &theta_hat,
                         const State &psi_in) {
    State out = psi_in;
    apply_circuit(spec, theta_hat.values, out);
    return out;
}

// JSON form of a circuit:
//   {"format": "npid-circuit/1", "n_qubits": n, "n_params": p,
//    "layers": [{"gates": [{"kind": "RY", "target": 0, "slot": 0}, ...,
//                          {"kind": "CNOT", "control": 3, "target": 1}, ...]}]}
// Gates within a layer are listed in application order.

inline nlohmann::json to_json(const CircuitSpec &spec) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto &layer : spec.layers) {
        nlohmann::json gates = nlohmann::json::array();
        for (const auto &g : layer.opening_rotations) {
            gates.push_back({{"kind", to_string(g.kind)},
                             {"target", g.target},
                             {"slot", *g.param_slot}});
        }
        for (const auto &p : layer.pairings) {
            gates.push_back({{"kind", "CNOT"}, {"control", p.control}, {"target", p.target}});
            gates.push_back({{"kind", "RX"}, {"target", p.control}, {"slot", p.rx_slot}});
            gates.push_back({{"kind", "RZ"}, {"target", p.target}, {"slot", p.rz_slot}});
        }
        layers.push_back({{"gates", std::move(gates)}});
    }
    return {{"format", "npid-circuit/1"},
            {"n_qubits", spec.n_qubits},
            {"n_params", spec.n_params},
            {"layers", std::move(layers)}};
}

inline CircuitSpec circuit_from_json(const nlohmann::json &j) {
    detail::require(j.value("format", "") == "npid-circuit/1",
                    "circuit_from_json: unsupported format");
    CircuitSpec spec;
    spec.n_qubits = j.at("n_qubits").get<std::size_t>();
    spec.n_params = j.at("n_params").get<std::size_t>();
    for (const auto &jl : j.at("layers")) {
        LayerSpec layer;
        const auto &gates = jl.at("gates");
        std::size_t i = 0;
        for (; i < gates.size() && gates[i].at("kind") != "CNOT"; ++i) {
            const auto kind = gate_kind_from_string(gates[i].at("kind").get<std::string>());
            layer.opening_rotations.push_back(Gate::rotation(
                kind, gates[i].at("target").get<std::size_t>(),
                gates[i].at("slot").get<std::size_t>()));
        }
        for (; i < gates.size(); i += 3) {
            detail::require(i + 2 < gates.size() && gates[i].at("kind") == "CNOT" &&
                                gates[i + 1].at("kind") == "RX" &&
                                gates[i + 2].at("kind") == "RZ",
                            "circuit_from_json: expected CNOT, RX, RZ block");
            Pairing p{gates[i].at("control").get<std::size_t>(),
                      gates[i].at("target").get<std::size_t>(),
                      gates[i + 1].at("slot").get<std::size_t>(),
                      gates[i + 2].at("slot").get<std::size_t>()};
            detail::require(gates[i + 1].at("target") == p.control &&
                                gates[i + 2].at("target") == p.target,
                            "circuit_from_json: pair rotations on wrong qubits");
            layer.pairings.push_back(p);
        }
        spec.layers.push_back(std::move(layer));
    }
    spec.validate();
    return spec;
}

} // namespace npid
