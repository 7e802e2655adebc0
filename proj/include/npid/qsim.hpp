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
 * Exact statevector simulation for the gate set {RX, RY, RZ, CNOT}.
 *
 * Qubit 0 is the least-significant bit of the amplitude index. Rotations use
 * the half-angle convention R_k(theta) = exp(-i theta sigma_k / 2).
 */
#pragma once

#include "util.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace npid {

enum class GateKind { RX, RY, RZ, CNOT };

enum class Axis { X, Y, Z };

constexpr bool is_rotation(GateKind kind) noexcept {
    return kind != GateKind::CNOT;
}

constexpr Axis rotation_axis(GateKind kind) {
    switch (kind) {
    case GateKind::RX:
        return Axis::X;
    case GateKind::RY:
        return Axis::Y;
    case GateKind::RZ:
        return Axis::Z;
    case GateKind::CNOT:
        break;
    }
    throw Error("rotation_axis: CNOT has no rotation axis");
}

constexpr std::string_view to_string(GateKind kind) noexcept {
    switch (kind) {
    case GateKind::RX:
        return "RX";
    case GateKind::RY:
        return "RY";
    case GateKind::RZ:
        return "RZ";
    case GateKind::CNOT:
        return "CNOT";
    }
    return "?";
}

inline GateKind gate_kind_from_string(std::string_view name) {
    if (name == "RX") {
        return GateKind::RX;
    }
    if (name == "RY") {
        return GateKind::RY;
    }
    if (name == "RZ") {
        return GateKind::RZ;
    }
    if (name == "CNOT") {
        return GateKind::CNOT;
    }
    throw Error("unknown gate kind: " + std::string(name));
}

/**
 * @brief One gate of a circuit.
 *
 * Rotations act on `target` and read their angle from `param_slot`. A CNOT
 * uses `control` and `target` and carries no slot.
 */
struct Gate {
    GateKind kind{GateKind::RX};
    std::size_t target{0};
    std::size_t control{0};
    std::optional<std::size_t> param_slot{};

    static Gate rotation(GateKind kind, std::size_t qubit, std::size_t slot) {
        detail::require(is_rotation(kind), "Gate::rotation: kind is CNOT");
        return Gate{kind, qubit, 0, slot};
    }
    static Gate cnot(std::size_t control, std::size_t target) {
        return Gate{GateKind::CNOT, target, control, std::nullopt};
    }

    bool operator==(const Gate &) const = default;
};

/**
 * @brief Pure state of `n` qubits stored as 2^n complex amplitudes.
 *
 * @tparam PrecisionT Floating point type of the amplitudes.
 */
template <typename PrecisionT = double> class Statevector {
  public:
    using ComplexT = std::complex<PrecisionT>;

    /// |0...0> on `num_qubits` qubits.
    explicit Statevector(std::size_t num_qubits)
        : num_qubits_{num_qubits}, data_(checked_dim(num_qubits)) {
        data_[0] = ComplexT{1, 0};
    }

    /// Wraps existing amplitudes; the length must be a power of two.
    explicit Statevector(std::vector<ComplexT> amplitudes)
        : num_qubits_{log2_exact(amplitudes.size())},
          data_(std::move(amplitudes)) {}

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

    [[nodiscard]] std::span<const ComplexT> data() const noexcept { return data_; }
    [[nodiscard]] std::span<ComplexT> data() noexcept { return data_; }

    ComplexT &operator[](std::size_t k) { return data_[k]; }
    const ComplexT &operator[](std::size_t k) const { return data_[k]; }

    [[nodiscard]] PrecisionT norm_squared() const noexcept {
        PrecisionT s = 0;
        for (const auto &a : data_) {
            s += std::norm(a);
        }
        return s;
    }

    void normalize() {
        const PrecisionT n = std::sqrt(norm_squared());
        detail::require(n > 0, "Statevector::normalize: zero vector");
        for (auto &a : data_) {
            a /= n;
        }
    }

    bool operator==(const Statevector &) const = default;

  private:
    static std::size_t checked_dim(std::size_t num_qubits) {
        detail::require(num_qubits >= 1 && num_qubits < 31,
                        "Statevector: number of qubits must be in [1, 30]");
        return std::size_t{1} << num_qubits;
    }
    static std::size_t log2_exact(std::size_t len) {
        detail::require(len >= 2 && std::has_single_bit(len),
                        "Statevector: length must be a power of two >= 2");
        return static_cast<std::size_t>(std::countr_zero(len));
    }

    std::size_t num_qubits_;
    std::vector<ComplexT> data_;
};

/// 2x2 complex matrix, row major.
template <typename PrecisionT>
using Mat2 = std::array<std::complex<PrecisionT>, 4>;

template <typename PrecisionT>
Mat2<PrecisionT> rotation_matrix(Axis axis, PrecisionT theta) {
    using C = std::complex<PrecisionT>;
    const PrecisionT c = std::cos(theta / 2);
    const PrecisionT s = std::sin(theta / 2);
    switch (axis) {
    case Axis::X:
        return {C{c, 0}, C{0, -s}, C{0, -s}, C{c, 0}};
    case Axis::Y:
        return {C{c, 0}, C{-s, 0}, C{s, 0}, C{c, 0}};
    case Axis::Z:
        return {C{c, -s}, C{0, 0}, C{0, 0}, C{c, s}};
    }
    return {};
}

/// Generator H with R(theta) = exp(-i theta H), i.e. sigma/2.
template <typename PrecisionT> Mat2<PrecisionT> generator_matrix(Axis axis) {
    using C = std::complex<PrecisionT>;
    const PrecisionT h = PrecisionT{1} / 2;
    switch (axis) {
    case Axis::X:
        return {C{0, 0}, C{h, 0}, C{h, 0}, C{0, 0}};
    case Axis::Y:
        return {C{0, 0}, C{0, -h}, C{0, h}, C{0, 0}};
    case Axis::Z:
        return {C{h, 0}, C{0, 0}, C{0, 0}, C{-h, 0}};
    }
    return {};
}

namespace kernels {

/// Calls f(i0, i1) for every index pair differing only in bit `qubit`.
template <typename F>
inline void for_each_pair(std::size_t dim, std::size_t qubit, F &&f) {
    const std::size_t stride = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t k = base; k < base + stride; ++k) {
            f(k, k + stride);
        }
    }
}

template <typename PrecisionT>
void apply_matrix(std::span<std::complex<PrecisionT>> arr, std::size_t qubit,
                  const Mat2<PrecisionT> &m) {
    for_each_pair(arr.size(), qubit, [&](std::size_t i0, std::size_t i1) {
        const auto a0 = arr[i0];
        const auto a1 = arr[i1];
        arr[i0] = m[0] * a0 + m[1] * a1;
        arr[i1] = m[2] * a0 + m[3] * a1;
    });
}

template <typename PrecisionT>
void apply_rx(std::span<std::complex<PrecisionT>> arr, std::size_t qubit,
              PrecisionT theta) {
    const PrecisionT c = std::cos(theta / 2);
    const PrecisionT s = std::sin(theta / 2);
    for_each_pair(arr.size(), qubit, [&](std::size_t i0, std::size_t i1) {
        const auto a0 = arr[i0];
        const auto a1 = arr[i1];
        // c*a - i*s*b
        arr[i0] = {c * a0.real() + s * a1.imag(), c * a0.imag() - s * a1.real()};
        arr[i1] = {c * a1.real() + s * a0.imag(), c * a1.imag() - s * a0.real()};
    });
}

template <typename PrecisionT>
void apply_ry(std::span<std::complex<PrecisionT>> arr, std::size_t qubit,
              PrecisionT theta) {
    const PrecisionT c = std::cos(theta / 2);
    const PrecisionT s = std::sin(theta / 2);
    for_each_pair(arr.size(), qubit, [&](std::size_t i0, std::size_t i1) {
        const auto a0 = arr[i0];
        const auto a1 = arr[i1];
        arr[i0] = c * a0 - s * a1;
        arr[i1] = s * a0 + c * a1;
    });
}

template <typename PrecisionT>
void apply_rz(std::span<std::complex<PrecisionT>> arr, std::size_t qubit,
              PrecisionT theta) {
    const std::complex<PrecisionT> p0{std::cos(theta / 2), -std::sin(theta / 2)};
    const std::complex<PrecisionT> p1 = std::conj(p0);
    for_each_pair(arr.size(), qubit, [&](std::size_t i0, std::size_t i1) {
        arr[i0] *= p0;
        arr[i1] *= p1;
    });
}

template <typename PrecisionT>
void apply_cnot(std::span<std::complex<PrecisionT>> arr, std::size_t control,
                std::size_t target) {
    const std::size_t cmask = std::size_t{1} << control;
    for_each_pair(arr.size(), target, [&](std::size_t i0, std::size_t i1) {
        if ((i0 & cmask) != 0) {
            std::swap(arr[i0], arr[i1]);
        }
    });
}

/// Applies sigma_axis / 2 (not unitary; used for derivatives).
template <typename PrecisionT>
void apply_generator(std::span<std::complex<PrecisionT>> arr, std::size_t qubit,
                     Axis axis) {
    using C = std::complex<PrecisionT>;
    const PrecisionT h = PrecisionT{1} / 2;
    for_each_pair(arr.size(), qubit, [&](std::size_t i0, std::size_t i1) {
        const C a0 = arr[i0];
        const C a1 = arr[i1];
        switch (axis) {
        case Axis::X:
            arr[i0] = h * a1;
            arr[i1] = h * a0;
            break;
        case Axis::Y:
            arr[i0] = C{h * a1.imag(), -h * a1.real()};
            arr[i1] = C{-h * a0.imag(), h * a0.real()};
            break;
        case Axis::Z:
            arr[i0] = h * a0;
            arr[i1] = -h * a1;
            break;
        }
    });
}

} // namespace kernels

namespace detail {
template <typename PrecisionT>
void check_gate(const Statevector<PrecisionT> &state, const Gate &gate) {
    const std::size_t n = state.num_qubits();
    require(gate.target < n, "apply_gate: target qubit out of range");
    if (gate.kind == GateKind::CNOT) {
        require(gate.control < n, "apply_gate: control qubit out of range");
        require(gate.control != gate.target,
                "apply_gate: control and target coincide");
    }
}
} // namespace detail

/**
 * @brief Applies a gate in place without argument validation.
 *
 * `angle` is ignored for CNOT. `inverse` applies the adjoint.
 */
template <typename PrecisionT>
void apply_gate_unchecked(Statevector<PrecisionT> &state, const Gate &gate,
                          PrecisionT angle, bool inverse = false) {
    auto arr = state.data();
    const PrecisionT theta = inverse ? -angle : angle;
    switch (gate.kind) {
    case GateKind::RX:
        kernels::apply_rx(arr, gate.target, theta);
        break;
    case GateKind::RY:
        kernels::apply_ry(arr, gate.target, theta);
        break;
    case GateKind::RZ:
        kernels::apply_rz(arr, gate.target, theta);
        break;
    case GateKind::CNOT:
        kernels::apply_cnot(arr, gate.control, gate.target);
        break;
    }
}

/**
 * @brief Applies `gate` to `state` in place.
 *
 * An angle must be supplied exactly when the gate is a rotation.
 */
template <typename PrecisionT>
void apply_gate(Statevector<PrecisionT> &state, const Gate &gate,
                std::optional<PrecisionT> angle) {
    detail::check_gate(state, gate);
    if (is_rotation(gate.kind)) {
        detail::require(angle.has_value(), "apply_gate: rotation needs an angle");
    } else {
        detail::require(!angle.has_value(), "apply_gate: CNOT takes no angle");
    }
    apply_gate_unchecked(state, gate, angle.value_or(PrecisionT{0}));
}

/// Value-returning form of apply_gate.
template <typename PrecisionT>
[[nodiscard]] Statevector<PrecisionT> applied(Statevector<PrecisionT> state,
                                              const Gate &gate,
                                              std::optional<PrecisionT> angle) {
    apply_gate(state, gate, angle);
    return state;
}

/// Probability that `qubit` is measured in |0>.
template <typename PrecisionT>
[[nodiscard]] PrecisionT ground_prob(const Statevector<PrecisionT> &state,
                                     std::size_t qubit) {
    detail::require(qubit < state.num_qubits(), "ground_prob: qubit out of range");
    const std::size_t mask = std::size_t{1} << qubit;
    const auto arr = state.data();
    PrecisionT p = 0;
    for (std::size_t k = 0; k < arr.size(); ++k) {
        if ((k & mask) == 0) {
            p += std::norm(arr[k]);
        }
    }
    return p;
}

/// Largest singular value of a 2x2 complex matrix.
template <typename PrecisionT>
[[nodiscard]] PrecisionT spectral_norm(const Mat2<PrecisionT> &m) {
    // Eigenvalues of the Hermitian matrix M^dagger M.
    const PrecisionT a = std::norm(m[0]) + std::norm(m[2]);
    const PrecisionT d = std::norm(m[1]) + std::norm(m[3]);
    const std::complex<PrecisionT> b = std::conj(m[0]) * m[1] + std::conj(m[2]) * m[3];
    const PrecisionT half_tr = (a + d) / 2;
    const PrecisionT disc = std::sqrt(((a - d) / 2) * ((a - d) / 2) + std::norm(b));
    return std::sqrt(half_tr + disc);
}

/**
 * @brief Error of the first-order expansion of a single rotation.
 *
 * Returns || U(theta + dtheta) - (U(theta) - i dtheta H U(theta)) ||_2 where
 * U = exp(-i theta H) and H = sigma_axis / 2. Scales as dtheta^2.
 */
inline double linearization_residual(Axis axis, double theta, double dtheta) {
    using C = std::complex<double>;
    const auto u = rotation_matrix(axis, theta);
    const auto u_shift = rotation_matrix(axis, theta + dtheta);
    const auto h = generator_matrix<double>(axis);
    Mat2<double> diff{};
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
            const C hu = h[2 * r] * u[c] + h[2 * r + 1] * u[2 + c];
            diff[2 * r + c] = u_shift[2 * r + c] - (u[2 * r + c] - C{0, dtheta} * hu);
        }
    }
    return spectral_norm(diff);
}

} // namespace npid
