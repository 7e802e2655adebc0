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
 * Ground-state cost and its gradient with respect to every rotation angle.
 *
 * The cost is L = 1 - (1/n) sum_i P(qubit i = 0) evaluated on the circuit
 * output. It is the expectation of the diagonal observable
 * O = diag(popcount(k) / n), which the adjoint method uses directly.
 */
#pragma once

#include "circuit.hpp"
#include "qsim.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace npid {

/// d(loss)/d(theta_i) for every parameter slot.
struct GradientVector {
    std::vector<double> values;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }

    [[nodiscard]] double norm() const noexcept {
        double s = 0.0;
        for (double v : values) {
            s += v * v;
        }
        return std::sqrt(s);
    }
};

struct CostAndGradient {
    double loss{0.0};
    GradientVector grad;
};

namespace detail {
inline double observable_weight(std::size_t index, std::size_t n_qubits) {
    return static_cast<double>(std::popcount(index)) / static_cast<double>(n_qubits);
}

inline double cost_unchecked(const State &psi) {
    const auto arr = psi.data();
    const std::size_t n = psi.num_qubits();
    double acc = 0.0;
    for (std::size_t k = 1; k < arr.size(); ++k) {
        acc += std::norm(arr[k]) * static_cast<double>(std::popcount(k));
    }
    return acc / static_cast<double>(n);
}
} // namespace detail

/// One minus the mean probability of each qubit being in |0>.
inline double cost(const State &psi_out) {
    detail::require(std::abs(psi_out.norm_squared() - 1.0) <= 1e-6,
                    "cost: input state is not normalized");
    return detail::cost_unchecked(psi_out);
}

/// Loss of the circuit output for the given parameters.
inline double circuit_cost(const CircuitSpec &spec, std::span<const double> theta,
                           const State &psi_in) {
    State psi = psi_in;
    apply_circuit(spec, theta, psi);
    return detail::cost_unchecked(psi);
}

/**
 * @brief Loss and exact gradient by adjoint differentiation.
 *
 * One forward pass, then a reverse sweep that un-applies each gate to both
 * the forward state |phi> and the co-state |lambda> = O|phi>. For a rotation
 * exp(-i theta G) the derivative is 2 Im <lambda|G|phi> taken after the gate.
 */
inline CostAndGradient cost_and_gradient(const CircuitSpec &spec,
                                         std::span<const double> theta,
                                         const State &psi_in) {
    detail::check_run_shapes(spec, theta, psi_in);
    State phi = psi_in;
    apply_circuit(spec, theta, phi);

    const std::size_t n = spec.n_qubits;
    State lambda = phi;
    {
        auto arr = lambda.data();
        for (std::size_t k = 0; k < arr.size(); ++k) {
            arr[k] *= detail::observable_weight(k, n);
        }
    }
    CostAndGradient out;
    {
        const auto l = lambda.data();
        const auto p = phi.data();
        double acc = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            acc += (std::conj(p[k]) * l[k]).real();
        }
        out.loss = acc;
    }
    out.grad.values.assign(spec.n_params, 0.0);

    State mu = phi;
    const auto gates = spec.gates();
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
        const Gate &g = *it;
        if (g.param_slot) {
            auto m = mu.data();
            const auto p = phi.data();
            std::copy(p.begin(), p.end(), m.begin());
            kernels::apply_generator(m, g.target, rotation_axis(g.kind));
            const auto l = lambda.data();
            double im = 0.0;
            for (std::size_t k = 0; k < m.size(); ++k) {
                // Im(conj(l) * m)
                im += l[k].real() * m[k].imag() - l[k].imag() * m[k].real();
            }
            out.grad.values[*g.param_slot] = 2.0 * im;
        }
        const double angle = g.param_slot ? theta[*g.param_slot] : 0.0;
        apply_gate_unchecked(phi, g, angle, /*inverse=*/true);
        apply_gate_unchecked(lambda, g, angle, /*inverse=*/true);
    }
    return out;
}

inline GradientVector gradient(const CircuitSpec &spec, const ParamVector &theta_hat,
                               const State &psi_in) {
    return cost_and_gradient(spec, theta_hat.values, psi_in).grad;
}

/**
 * @brief Parameter-shift rule: [L(theta + pi/2) - L(theta - pi/2)] / 2 per slot.
 *
 * Exact for half-angle rotations. Costs 2 * n_params circuit runs.
 */
inline GradientVector parameter_shift_gradient(const CircuitSpec &spec,
                                               const ParamVector &theta_hat,
                                               const State &psi_in) {
    detail::check_run_shapes(spec, theta_hat.values, psi_in);
    constexpr double shift = std::numbers::pi / 2;
    GradientVector out;
    out.values.resize(spec.n_params);
    std::vector<double> theta = theta_hat.values;
    for (std::size_t i = 0; i < spec.n_params; ++i) {
        const double orig = theta[i];
        theta[i] = orig + shift;
        const double plus = circuit_cost(spec, theta, psi_in);
        theta[i] = orig - shift;
        const double minus = circuit_cost(spec, theta, psi_in);
        theta[i] = orig;
        out.values[i] = 0.5 * (plus - minus);
    }
    return out;
}

/// Central differences with step h.
inline GradientVector finite_diff_gradient(const CircuitSpec &spec,
                                           const ParamVector &theta_hat,
                                           const State &psi_in, double h = 1e-5) {
    detail::require(h > 0.0, "finite_diff_gradient: step must be positive");
    detail::check_run_shapes(spec, theta_hat.values, psi_in);
    GradientVector out;
    out.values.resize(spec.n_params);
    std::vector<double> theta = theta_hat.values;
    for (std::size_t i = 0; i < spec.n_params; ++i) {
        const double orig = theta[i];
        theta[i] = orig + h;
        const double plus = circuit_cost(spec, theta, psi_in);
        theta[i] = orig - h;
        const double minus = circuit_cost(spec, theta, psi_in);
        theta[i] = orig;
        out.values[i] = (plus - minus) / (2.0 * h);
    }
    return out;
}

} // namespace npid
