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
 * Small fully connected network: Tanh hidden layers, Softplus or identity
 * output, reverse-mode gradients and plain SGD.
 */
#pragma once

#include "util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace npid {

enum class OutputActivation { Identity, Softplus };

/// The three network shapes used by the training strategies.
enum class Architecture { Npid, NeqpSmall, NeqpLarge };

/// max(x, 0) + log1p(exp(-|x|)), stable for large |x|.
inline double softplus(double x) noexcept {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

/// Logistic sigmoid, the derivative of softplus.
inline double sigmoid(double x) noexcept {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// Affine map y = W x + b with W stored row major (out x in).
struct DenseLayer {
    std::size_t in{0};
    std::size_t out{0};
    std::vector<double> weights;
    std::vector<double> biases;

    DenseLayer() = default;
    DenseLayer(std::size_t in_dim, std::size_t out_dim)
        : in{in_dim}, out{out_dim}, weights(in_dim * out_dim, 0.0), biases(out_dim, 0.0) {}

    double &w(std::size_t row, std::size_t col) { return weights[row * in + col]; }
    [[nodiscard]] double w(std::size_t row, std::size_t col) const {
        return weights[row * in + col];
    }

    bool operator==(const DenseLayer &) const = default;
};

/// Per-layer gradients, shaped like the owning Mlp.
struct MlpGradient {
    std::vector<DenseLayer> layers;

    MlpGradient &operator+=(const MlpGradient &other) {
        detail::require(layers.size() == other.layers.size(), "MlpGradient: shape mismatch");
        for (std::size_t l = 0; l < layers.size(); ++l) {
            detail::require(layers[l].weights.size() == other.layers[l].weights.size() &&
                                layers[l].biases.size() == other.layers[l].biases.size(),
                            "MlpGradient: shape mismatch");
            for (std::size_t k = 0; k < layers[l].weights.size(); ++k) {
                layers[l].weights[k] += other.layers[l].weights[k];
            }
            for (std::size_t k = 0; k < layers[l].biases.size(); ++k) {
                layers[l].biases[k] += other.layers[l].biases[k];
            }
        }
        return *this;
    }
};

class Mlp {
  public:
    /// Zero-initialized network with the given layer widths.
    Mlp(std::vector<std::size_t> dims, OutputActivation output)
        : dims_(std::move(dims)), output_{output} {
        detail::require(dims_.size() >= 2, "Mlp: need at least input and output widths");
        for (std::size_t d : dims_) {
            detail::require(d > 0, "Mlp: layer widths must be positive");
        }
        for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
            layers_.emplace_back(dims_[l], dims_[l + 1]);
        }
    }

    [[nodiscard]] const std::vector<std::size_t> &dims() const noexcept { return dims_; }
    [[nodiscard]] std::size_t input_dim() const noexcept { return dims_.front(); }
    [[nodiscard]] std::size_t output_dim() const noexcept { return dims_.back(); }
    [[nodiscard]] OutputActivation output_activation() const noexcept { return output_; }

    [[nodiscard]] std::vector<DenseLayer> &layers() noexcept { return layers_; }
    [[nodiscard]] const std::vector<DenseLayer> &layers() const noexcept { return layers_; }

    /// Fan-balanced uniform weights, zero biases.
    void initialize(Rng &rng) {
        for (auto &layer : layers_) {
            const double bound =
                std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
            for (auto &w : layer.weights) {
                w = rng.uniform(-bound, bound);
            }
            std::fill(layer.biases.begin(), layer.biases.end(), 0.0);
        }
    }

    /**
     * @brief Evaluates the network and caches activations for backward().
     */
    std::vector<double> forward(std::span<const double> input) {
        detail::require(input.size() == input_dim(), "Mlp::forward: input dimension mismatch");
        activations_.assign(1, std::vector<double>(input.begin(), input.end()));
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            const DenseLayer &layer = layers_[l];
            const auto &x = activations_.back();
            std::vector<double> z(layer.biases);
            for (std::size_t r = 0; r < layer.out; ++r) {
                const double *row = &layer.weights[r * layer.in];
                double acc = 0.0;
                for (std::size_t c = 0; c < layer.in; ++c) {
                    acc += row[c] * x[c];
                }
                z[r] += acc;
            }
            const bool last = l + 1 == layers_.size();
            if (!last) {
                for (auto &v : z) {
                    v = std::tanh(v);
                }
                activations_.push_back(std::move(z));
            } else {
                output_pre_ = z;
                if (output_ == OutputActivation::Softplus) {
                    for (auto &v : z) {
                        v = softplus(v);
                    }
                }
                return z;
            }
        }
        return {};
    }

    /**
     * @brief Gradient of dot(output, output_grad) w.r.t. all weights and biases,
     * at the most recent forward() input.
     */
    [[nodiscard]] MlpGradient backward(std::span<const double> output_grad) const {
        detail::require(!activations_.empty(), "Mlp::backward: no cached forward pass");
        detail::require(output_grad.size() == output_dim(),
                        "Mlp::backward: output gradient dimension mismatch");
        MlpGradient grads;
        grads.layers.reserve(layers_.size());
        for (const auto &layer : layers_) {
            grads.layers.emplace_back(layer.in, layer.out);
        }
        std::vector<double> delta(output_grad.begin(), output_grad.end());
        if (output_ == OutputActivation::Softplus) {
            for (std::size_t k = 0; k < delta.size(); ++k) {
                delta[k] *= sigmoid(output_pre_[k]);
            }
        }
        for (std::size_t l = layers_.size(); l-- > 0;) {
            const DenseLayer &layer = layers_[l];
            const auto &x = activations_[l];
            DenseLayer &g = grads.layers[l];
            for (std::size_t r = 0; r < layer.out; ++r) {
                g.biases[r] = delta[r];
                double *row = &g.weights[r * layer.in];
                for (std::size_t c = 0; c < layer.in; ++c) {
                    row[c] = delta[r] * x[c];
                }
            }
            if (l == 0) {
                break;
            }
            std::vector<double> prev(layer.in, 0.0);
            for (std::size_t r = 0; r < layer.out; ++r) {
                const double *row = &layer.weights[r * layer.in];
                for (std::size_t c = 0; c < layer.in; ++c) {
                    prev[c] += row[c] * delta[r];
                }
            }
            for (std::size_t c = 0; c < layer.in; ++c) {
                prev[c] *= 1.0 - x[c] * x[c]; // tanh'
            }
            delta = std::move(prev);
        }
        return grads;
    }

    /// w <- w - lr * dw, b <- b - lr * db.
    void sgd_step(const MlpGradient &grads, double lr) {
        detail::require(lr > 0.0, "sgd_step: learning rate must be positive");
        detail::require(grads.layers.size() == layers_.size(), "sgd_step: shape mismatch");
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            auto &layer = layers_[l];
            const auto &g = grads.layers[l];
            detail::require(g.weights.size() == layer.weights.size() &&
                                g.biases.size() == layer.biases.size(),
                            "sgd_step: shape mismatch");
            for (std::size_t k = 0; k < layer.weights.size(); ++k) {
                layer.weights[k] -= lr * g.weights[k];
            }
            for (std::size_t k = 0; k < layer.biases.size(); ++k) {
                layer.biases[k] -= lr * g.biases[k];
            }
        }
    }

    [[nodiscard]] bool all_finite() const noexcept {
        for (const auto &layer : layers_) {
            for (double w : layer.weights) {
                if (!std::isfinite(w)) {
                    return false;
                }
            }
            for (double b : layer.biases) {
                if (!std::isfinite(b)) {
                    return false;
                }
            }
        }
        return true;
    }

    /// Compares parameters only, not the forward cache.
    [[nodiscard]] bool same_parameters(const Mlp &other) const {
        return dims_ == other.dims_ && output_ == other.output_ && layers_ == other.layers_;
    }

  private:
    std::vector<std::size_t> dims_;
    OutputActivation output_;
    std::vector<DenseLayer> layers_;
    std::vector<std::vector<double>> activations_;
    std::vector<double> output_pre_;
};

/// Free-function form of Mlp::sgd_step.
inline void sgd_step(Mlp &mlp, const MlpGradient &grads, double lr) { mlp.sgd_step(grads, lr); }

/**
 * @brief Builds and initializes one of the three network shapes.
 *
 *   Npid:      4 -> 32 -> 64 -> 3, Softplus output (PID gains)
 *   NeqpSmall: 4 -> 32 -> 64 -> n_params, identity output
 *   NeqpLarge: 32 -> 256 -> 256 -> n_params, identity output
 */
inline Mlp mlp_new(Architecture arch, std::size_t circuit_n_params, std::uint64_t seed) {
    std::vector<std::size_t> dims;
    OutputActivation act = OutputActivation::Identity;
    switch (arch) {
    case Architecture::Npid:
        dims = {4, 32, 64, 3};
        act = OutputActivation::Softplus;
        break;
    case Architecture::NeqpSmall:
        detail::require(circuit_n_params > 0, "mlp_new: NEQP needs n_params > 0");
        dims = {4, 32, 64, circuit_n_params};
        break;
    case Architecture::NeqpLarge:
        detail::require(circuit_n_params > 0, "mlp_new: NEQP needs n_params > 0");
        dims = {32, 256, 256, circuit_n_params};
        break;
    }
    Mlp mlp(std::move(dims), act);
    Rng rng(seed);
    mlp.initialize(rng);
    return mlp;
}

inline nlohmann::json to_json(const Mlp &mlp) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto &layer : mlp.layers()) {
        layers.push_back({{"weights", layer.weights}, {"biases", layer.biases}});
    }
    return {{"format", "npid-mlp/1"},
            {"dims", mlp.dims()},
            {"output", mlp.output_activation() == OutputActivation::Softplus ? "softplus"
                                                                             : "identity"},
            {"layers", std::move(layers)}};
}

inline Mlp mlp_from_json(const nlohmann::json &j) {
    detail::require(j.value("format", "") == "npid-mlp/1", "mlp_from_json: unsupported format");
    const std::string out = j.at("output").get<std::string>();
    detail::require(out == "softplus" || out == "identity", "mlp_from_json: bad output activation");
    Mlp mlp(j.at("dims").get<std::vector<std::size_t>>(),
            out == "softplus" ? OutputActivation::Softplus : OutputActivation::Identity);
    const auto &jl = j.at("layers");
    detail::require(jl.size() == mlp.layers().size(), "mlp_from_json: layer count mismatch");
    for (std::size_t l = 0; l < jl.size(); ++l) {
        auto &layer = mlp.layers()[l];
        auto w = jl[l].at("weights").get<std::vector<double>>();
        auto b = jl[l].at("biases").get<std::vector<double>>();
        detail::require(w.size() == layer.weights.size() && b.size() == layer.biases.size(),
                        "mlp_from_json: layer shape mismatch");
        layer.weights = std::move(w);
        layer.biases = std::move(b);
    }
    return mlp;
}

} // namespace npid
