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

#include "npid/neural.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace npid;
using Catch::Matchers::WithinAbs;

namespace {
double dot(const std::vector<double> &a, const std::vector<double> &b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

Mlp random_net(std::vector<std::size_t> dims, OutputActivation act, std::uint64_t seed) {
    Mlp mlp(std::move(dims), act);
    Rng rng(seed);
    mlp.initialize(rng);
    // Nonzero biases so their gradients are exercised away from zero.
    for (auto &layer : mlp.layers()) {
        for (auto &b : layer.biases) {
            b = rng.uniform(-0.5, 0.5);
        }
    }
    return mlp;
}

std::vector<double> random_vec(std::size_t n, Rng &rng) {
    std::vector<double> v(n);
    for (auto &x : v) {
        x = rng.normal();
    }
    return v;
}
} // namespace

TEST_CASE("softplus", "[neural]") {
    CHECK_THAT(softplus(0.0), WithinAbs(std::numbers::ln2, 1e-15));
    CHECK_THAT(softplus(800.0), WithinAbs(800.0, 1e-12));
    CHECK(softplus(-800.0) >= 0.0);
    CHECK(std::isfinite(softplus(-800.0)));
    CHECK_THAT(softplus(1.5), WithinAbs(std::log1p(std::exp(1.5)), 1e-15));
    CHECK(sigmoid(0.0) == 0.5);
}

TEST_CASE("mlp_new shapes", "[neural]") {
    const Mlp npid = mlp_new(Architecture::Npid, 1235, 1);
    CHECK(npid.dims() == std::vector<std::size_t>{4, 32, 64, 3});
    CHECK(npid.output_activation() == OutputActivation::Softplus);

    const Mlp small = mlp_new(Architecture::NeqpSmall, 1235, 1);
    CHECK(small.dims() == std::vector<std::size_t>{4, 32, 64, 1235});
    CHECK(small.output_activation() == OutputActivation::Identity);

    const Mlp large = mlp_new(Architecture::NeqpLarge, 1235, 1);
    CHECK(large.dims() == std::vector<std::size_t>{32, 256, 256, 1235});

    CHECK_THROWS_AS(mlp_new(Architecture::NeqpSmall, 0, 1), Error);
    CHECK_NOTHROW(mlp_new(Architecture::Npid, 0, 1));
}

TEST_CASE("Initialization bounds and zero biases", "[neural]") {
    const Mlp mlp = mlp_new(Architecture::Npid, 10, 7);
    for (const auto &layer : mlp.layers()) {
        const double bound = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
        double max_abs = 0.0;
        for (double w : layer.weights) {
            REQUIRE(std::abs(w) <= bound);
            max_abs = std::max(max_abs, std::abs(w));
        }
        CHECK(max_abs > 0.8 * bound);
        for (double b : layer.biases) {
            REQUIRE(b == 0.0);
        }
    }
    CHECK(mlp_new(Architecture::Npid, 10, 7).same_parameters(mlp));
    CHECK_FALSE(mlp_new(Architecture::Npid, 10, 8).same_parameters(mlp));
}

TEST_CASE("forward examples", "[neural]") {
    SECTION("zero NPID net outputs ln 2") {
        Mlp mlp({4, 32, 64, 3}, OutputActivation::Softplus);
        for (double v : mlp.forward(std::vector<double>{0.3, -1.0, 2.0, 0.1})) {
            CHECK_THAT(v, WithinAbs(0.693147, 1e-6));
        }
    }
    SECTION("zero identity net outputs zeros") {
        Mlp mlp({4, 8, 5}, OutputActivation::Identity);
        for (double v : mlp.forward(std::vector<double>{1, 2, 3, 4})) {
            CHECK(v == 0.0);
        }
    }
    SECTION("single affine unit") {
        Mlp mlp({1, 1}, OutputActivation::Identity);
        mlp.layers()[0].w(0, 0) = 1.0;
        CHECK(mlp.forward(std::vector<double>{0.5}) == std::vector<double>{0.5});
    }
    SECTION("dimension mismatch") {
        Mlp mlp({3, 2}, OutputActivation::Identity);
        CHECK_THROWS_AS(mlp.forward(std::vector<double>{1.0}), Error);
    }
    SECTION("deterministic") {
        Mlp mlp = mlp_new(Architecture::Npid, 0, 3);
        const std::vector<double> x{0.1, 0.2, 0.3, 0.4};
        CHECK(mlp.forward(x) == mlp.forward(x));
    }
}

TEST_CASE("Softplus gains stay positive", "[neural][property]") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        Mlp mlp = random_net({4, 32, 64, 3}, OutputActivation::Softplus, 100 + trial);
        for (auto &layer : mlp.layers()) {
            for (auto &w : layer.weights) {
                w *= 10.0;
            }
        }
        for (double g : mlp.forward(random_vec(4, rng))) {
            REQUIRE(g > 0.0);
        }
    }
}

TEST_CASE("backward examples", "[neural]") {
    SECTION("no cached forward") {
        const Mlp mlp({2, 2}, OutputActivation::Identity);
        CHECK_THROWS_AS(mlp.backward(std::vector<double>{1.0, 1.0}), Error);
    }
    SECTION("zero output gradient") {
        Mlp mlp = random_net({3, 5, 2}, OutputActivation::Softplus, 1);
        mlp.forward(std::vector<double>{0.1, 0.2, 0.3});
        const MlpGradient g = mlp.backward(std::vector<double>{0.0, 0.0});
        for (const auto &layer : g.layers) {
            for (double w : layer.weights) {
                REQUIRE(w == 0.0);
            }
            for (double b : layer.biases) {
                REQUIRE(b == 0.0);
            }
        }
    }
    SECTION("softplus slope at zero is one half") {
        Mlp mlp({1, 1}, OutputActivation::Softplus);
        mlp.forward(std::vector<double>{2.0});
        const MlpGradient g = mlp.backward(std::vector<double>{1.0});
        CHECK(g.layers[0].biases[0] == 0.5);
        CHECK(g.layers[0].weights[0] == 1.0);
    }
}

TEST_CASE("backward matches finite differences", "[neural][oracle]") {
    Rng rng(9);
    const std::vector<std::vector<std::size_t>> shapes{{4, 8, 8, 3}, {3, 5, 2}, {2, 4}, {4, 6, 7, 3}};
    for (std::size_t s = 0; s < shapes.size(); ++s) {
        for (OutputActivation act : {OutputActivation::Identity, OutputActivation::Softplus}) {
            Mlp mlp = random_net(shapes[s], act, 40 + s);
            const auto x = random_vec(mlp.input_dim(), rng);
            const auto c = random_vec(mlp.output_dim(), rng);
            mlp.forward(x);
            const MlpGradient g = mlp.backward(c);
            const double h = 1e-6;
            for (std::size_t l = 0; l < mlp.layers().size(); ++l) {
                auto probe = [&](double &param, double analytic) {
                    const double orig = param;
                    param = orig + h;
                    const double plus = dot(mlp.forward(x), c);
                    param = orig - h;
                    const double minus = dot(mlp.forward(x), c);
                    param = orig;
                    REQUIRE_THAT(analytic, WithinAbs((plus - minus) / (2 * h), 1e-6));
                };
                auto &layer = mlp.layers()[l];
                for (std::size_t k = 0; k < layer.weights.size(); ++k) {
                    probe(layer.weights[k], g.layers[l].weights[k]);
                }
                for (std::size_t k = 0; k < layer.biases.size(); ++k) {
                    probe(layer.biases[k], g.layers[l].biases[k]);
                }
            }
        }
    }
}

TEST_CASE("sgd_step", "[neural]") {
    SECTION("arithmetic on one weight") {
        Mlp mlp({1, 1}, OutputActivation::Identity);
        mlp.layers()[0].w(0, 0) = 0.5;
        MlpGradient g;
        g.layers.emplace_back(1, 1);
        g.layers[0].weights[0] = 0.2;
        sgd_step(mlp, g, 1.0);
        CHECK_THAT(mlp.layers()[0].w(0, 0), WithinAbs(0.3, 1e-15));
    }
    SECTION("zero gradients leave the net unchanged") {
        Mlp mlp = random_net({3, 4, 2}, OutputActivation::Identity, 2);
        const Mlp before = mlp;
        mlp.forward(std::vector<double>{0, 0, 0});
        mlp.sgd_step(mlp.backward(std::vector<double>{0, 0}), 0.1);
        CHECK(mlp.same_parameters(before));
    }
    SECTION("two steps equal one step with summed gradients") {
        Mlp a = random_net({3, 4, 2}, OutputActivation::Identity, 3);
        Mlp b = a;
        a.forward(std::vector<double>{0.1, -0.2, 0.3});
        const MlpGradient g1 = a.backward(std::vector<double>{1.0, -2.0});
        a.forward(std::vector<double>{0.5, 0.4, -0.1});
        const MlpGradient g2 = a.backward(std::vector<double>{0.3, 0.7});
        a.sgd_step(g1, 0.25);
        a.sgd_step(g2, 0.25);
        MlpGradient sum = g1;
        sum += g2;
        b.sgd_step(sum, 0.25);
        for (std::size_t l = 0; l < a.layers().size(); ++l) {
            for (std::size_t k = 0; k < a.layers()[l].weights.size(); ++k) {
                REQUIRE_THAT(a.layers()[l].weights[k], WithinAbs(b.layers()[l].weights[k], 1e-14));
            }
        }
    }
    SECTION("rejects a nonpositive rate") {
        Mlp mlp({1, 1}, OutputActivation::Identity);
        mlp.forward(std::vector<double>{1.0});
        const auto g = mlp.backward(std::vector<double>{1.0});
        CHECK_THROWS_AS(mlp.sgd_step(g, 0.0), Error);
        CHECK_THROWS_AS(mlp.sgd_step(g, -1.0), Error);
    }
}

TEST_CASE("Mlp JSON round trip", "[neural]") {
    const Mlp mlp = mlp_new(Architecture::Npid, 0, 12);
    const nlohmann::json j = to_json(mlp);
    CHECK(mlp_from_json(nlohmann::json::parse(j.dump())).same_parameters(mlp));
    nlohmann::json bad = j;
    bad["dims"] = std::vector<std::size_t>{4, 32, 3};
    CHECK_THROWS_AS(mlp_from_json(bad), Error);
}
