// This file is part of the fillin library.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "fillin/signal.hpp"
#include "helpers.hpp"

using namespace fillin;

TEST_CASE("downsample samples block corners", "[signal]") {
    const LabelMap s(4, 4, {0, 0, 1, 1, 0, 0, 1, 1, 2, 2, 3, 3, 2, 2, 3, 3});
    REQUIRE(downsample(s, 2) == LabelMap(2, 2, {0, 1, 2, 3}));
}

TEST_CASE("downsample at stride 1 is the identity", "[signal]") {
    std::mt19937_64 rng(21);
    for (int round = 0; round < 10; ++round) {
        const LabelMap s = testutil::random_label_map(rng, 1 + rng() % 9, 1 + rng() % 9, 50);
        REQUIRE(downsample(s, 1) == s);
    }
}

TEST_CASE("downsample uses ceil output dimensions", "[signal]") {
    std::vector<Label> data(25);
    for (std::size_t i = 0; i < 25; ++i) data[i] = static_cast<Label>(i);
    const LabelMap s(5, 5, std::move(data));
    const LabelMap d = downsample(s, 3);
    // 5/3 rounds up to 2; samples land on rows/cols {0, 3}.
    REQUIRE(d == LabelMap(2, 2, {0, 3, 15, 18}));

    REQUIRE(downsample(s, 5).size() == 1);
    REQUIRE(downsample(s, 7) == LabelMap(1, 1, {0}));
    REQUIRE(downsample(LabelMap(1, 7, {9, 8, 7, 6, 5, 4, 3}), 2) ==
            LabelMap(1, 4, {9, 7, 5, 3}));
}

TEST_CASE("downsample rejects stride zero", "[signal]") {
    REQUIRE_THROWS_AS(downsample(LabelMap(1, 1, {0}), 0), ArgumentError);
}

TEST_CASE("downsample composes across nested strides", "[signal]") {
    std::mt19937_64 rng(22);
    const std::pair<std::size_t, std::size_t> strides[] = {{2, 2}, {2, 3}, {3, 2}, {4, 2}};
    for (const auto& [a, b] : strides) {
        // Dimensions divisible by a*b keep every composed sample unclamped.
        const std::size_t rows = a * b * (1 + rng() % 4);
        const std::size_t cols = a * b * (1 + rng() % 4);
        const LabelMap s = testutil::random_label_map(rng, rows, cols, 30);
        REQUIRE(downsample(downsample(s, a), b) == downsample(s, a * b));
    }
}

TEST_CASE("label_set enumerates distinct labels", "[signal]") {
    REQUIRE(label_set(LabelMap(2, 2, {0, 0, 0, 7})) == std::set<Label>{0, 7});
    REQUIRE(label_set(LabelMap(1, 1, {3})) == std::set<Label>{3});

    std::mt19937_64 rng(23);
    const LabelMap s = testutil::random_label_map(rng, 64, 64, 40);
    std::set<Label> brute;
    for (std::size_t r = 0; r < s.rows(); ++r)
        for (std::size_t c = 0; c < s.cols(); ++c) brute.insert(s(r, c));
    REQUIRE(label_set(s) == brute);
}

TEST_CASE("compute_signal marks survivors of the sampling grid", "[signal]") {
    const LabelMap s(2, 2, {0, 0, 0, 7});
    const AppearanceSignal a = compute_signal(s, 2);
    REQUIRE(a.as_stride() == 2);
    REQUIRE(a.size() == 2);
    REQUIRE(a.bit(0) == 1);  // only cell (0,0) is sampled
    REQUIRE(a.bit(7) == 0);
}

TEST_CASE("compute_signal at stride 1 keeps everything", "[signal]") {
    std::mt19937_64 rng(24);
    const LabelMap s = testutil::random_label_map(rng, 9, 13, 20);
    const AppearanceSignal a = compute_signal(s, 1);
    for (const auto& [label, bit] : a.bits()) REQUIRE(bit == 1);
    REQUIRE(a.labels() == label_set(s));
}

TEST_CASE("uniform maps always survive", "[signal]") {
    for (const std::size_t p : {std::size_t(1), std::size_t(3), std::size_t(64)}) {
        const AppearanceSignal a = compute_signal(LabelMap::filled(8, 8, 42), p);
        REQUIRE(a.size() == 1);
        REQUIRE(a.bit(42) == 1);
    }
}

TEST_CASE("signal domain is exactly the source label set", "[signal]") {
    std::mt19937_64 rng(25);
    for (int round = 0; round < 15; ++round) {
        const LabelMap s = testutil::random_label_map(rng, 1 + rng() % 31, 1 + rng() % 31, 12);
        for (const std::size_t p : {std::size_t(2), std::size_t(5), std::size_t(16)}) {
            const AppearanceSignal a = compute_signal(s, p);
            REQUIRE(a.labels() == label_set(s));
        }
    }
}

TEST_CASE("signal lookups outside the domain are contract errors", "[signal]") {
    const AppearanceSignal a = compute_signal(LabelMap(1, 2, {1, 2}), 1);
    REQUIRE(a.contains(1));
    REQUIRE_FALSE(a.contains(3));
    REQUIRE_THROWS_AS(a.bit(3), ContractError);
    REQUIRE_THROWS_WITH(a.bit(3), Catch::Matchers::ContainsSubstring("different map"));
}

TEST_CASE("appearance signal validation", "[signal]") {
    REQUIRE_THROWS_AS(AppearanceSignal({{0, 1}}, 0), ArgumentError);
    REQUIRE_THROWS_AS(AppearanceSignal({{0, 2}}, 4), ArgumentError);
    REQUIRE_THROWS_AS(compute_signal(LabelMap(1, 1, {0}), 0), ArgumentError);
}

TEST_CASE("reverse_signal complements every bit", "[signal]") {
    const AppearanceSignal a({{0, 1}, {7, 0}}, 2);
    const AppearanceSignal r = reverse_signal(a);
    REQUIRE(r.bit(0) == 0);
    REQUIRE(r.bit(7) == 1);
    REQUIRE(r.as_stride() == a.as_stride());
    REQUIRE(reverse_signal(r) == a);

    const AppearanceSignal ones({{1, 1}, {2, 1}, {3, 1}}, 5);
    const AppearanceSignal zeros = reverse_signal(ones);
    for (const auto& [label, bit] : zeros.bits()) REQUIRE(bit == 0);
}

TEST_CASE("labels holding a full square survive sampling", "[signal]") {
    std::mt19937_64 rng(26);
    for (const std::size_t p : {std::size_t(2), std::size_t(4), std::size_t(8)}) {
        for (int round = 0; round < 10; ++round) {
            LabelMap base = testutil::random_label_map(rng, 40, 40, 9);
            std::vector<Label> data(base.data());
            const std::size_t side = p + 1;
            const std::size_t r0 = rng() % (40 - side);
            const std::size_t c0 = rng() % (40 - side);
            for (std::size_t r = r0; r < r0 + side; ++r)
                for (std::size_t c = c0; c < c0 + side; ++c) data[r * 40 + c] = 777;
            const AppearanceSignal a = compute_signal(LabelMap(40, 40, std::move(data)), p);
            REQUIRE(a.bit(777) == 1);
        }
    }
}

TEST_CASE("survivor sets nest across stride multiples", "[signal]") {
    std::mt19937_64 rng(27);
    for (int round = 0; round < 10; ++round) {
        const LabelMap s = testutil::random_label_map(rng, 48, 32, 15);
        for (const std::size_t p : {std::size_t(1), std::size_t(2), std::size_t(3)}) {
            for (const std::size_t k : {std::size_t(2), std::size_t(4)}) {
                const AppearanceSignal fine = compute_signal(s, p);
                const AppearanceSignal coarse = compute_signal(s, k * p);
                for (const auto& [label, bit] : coarse.bits()) {
                    if (bit == 1) REQUIRE(fine.bit(label) == 1);
                }
            }
        }
    }
}
