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
 * Error handling and seeded random number generation shared by all modules.
 */
#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace npid {

/// Raised on any contract violation (bad sizes, out-of-range indices, ...).
class Error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a training run produces a non-finite loss.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool cond, const std::string &msg) {
    if (!cond) {
        throw Error(msg);
    }
}
} // namespace detail

/**
 * @brief splitmix64 finalizer. Used to derive independent child seeds.
 */
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

/**
 * @brief Stable hash of a seed and an arbitrary list of integer components.
 *
 * The result depends only on the values and their order, never on the
 * platform, so every run is replayable from its derived seed.
 */
template <typename... Parts>
constexpr std::uint64_t derive_seed(std::uint64_t base, Parts... parts) noexcept {
    std::uint64_t h = mix64(base);
    ((h = mix64(h ^ static_cast<std::uint64_t>(parts))), ...);
    return h;
}

/// Bit pattern of a double, for hashing real-valued config entries.
inline std::uint64_t seed_bits(double x) noexcept {
    return std::bit_cast<std::uint64_t>(x);
}

/**
 * @brief Seeded generator with platform-independent distributions.
 *
 * std::uniform_real_distribution and std::normal_distribution are
 * implementation-defined, so the conversions from raw engine output are
 * done here to keep every trace bit-identical across standard libraries.
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_{seed} {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept {
        return static_cast<double>(engine_() >> 11U) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * uniform();
    }

    /// Uniform integer on [0, n), unbiased (rejection sampling).
    std::uint64_t below(std::uint64_t n) {
        detail::require(n > 0, "Rng::below: empty range");
        const std::uint64_t limit =
            std::numeric_limits<std::uint64_t>::max() -
            std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x = engine_();
        while (x >= limit) {
            x = engine_();
        }
        return x % n;
    }

    /// Standard normal via the Marsaglia polar method.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

  private:
    std::mt19937_64 engine_;
    double spare_{0.0};
    bool has_spare_{false};
};

inline constexpr double two_pi = 2.0 * std::numbers::pi;

} // namespace npid
