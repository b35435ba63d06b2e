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

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "fillin/signal.hpp"
#include "fillin/superpixel.hpp"
#include "helpers.hpp"

using namespace fillin;

namespace {

Image constant_image(std::size_t rows, std::size_t cols, float v) {
    return Image(rows, cols, 1, std::vector<float>(rows * cols, v));
}

Image random_image(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                   std::size_t channels) {
    std::uniform_real_distribution<float> pick(0.0f, 1.0f);
    std::vector<float> data(rows * cols * channels);
    for (auto& v : data) v = pick(rng);
    return Image(rows, cols, channels, std::move(data));
}

std::map<Label, std::size_t> label_sizes(const LabelMap& m) {
    std::map<Label, std::size_t> sizes;
    for (const Label v : m.data()) ++sizes[v];
    return sizes;
}

// Labels must be 0..L-1 with no gaps, in raster order of first occurrence.
void require_canonical_labels(const LabelMap& m) {
    Label next = 0;
    for (const Label v : m.data()) {
        REQUIRE(v <= next);
        if (v == next) ++next;
    }
    REQUIRE(next >= 1);
}

}  // namespace

TEST_CASE("image validation", "[superpixel]") {
    REQUIRE_THROWS_AS(Image(1, 1, 2, {0.0f, 0.0f}), ArgumentError);
    REQUIRE_THROWS_AS(Image(1, 1, 1, {1.5f}), ArgumentError);
    REQUIRE_THROWS_AS(Image(1, 1, 1, {-0.1f}), ArgumentError);
    REQUIRE_THROWS_AS(Image(1, 1, 3, {0.0f, 0.0f}), ArgumentError);
    const Image ok(1, 2, 3, {0, 0.5f, 1, 1, 0.5f, 0});
    REQUIRE(ok(0, 1, 0) == 1.0f);
}

TEST_CASE("relabel keeps already-canonical maps", "[superpixel]") {
    const LabelMap m(2, 2, {0, 0, 0, 0});
    REQUIRE(relabel_connected(m) == m);
}

TEST_CASE("relabel renumbers by raster first occurrence", "[superpixel]") {
    REQUIRE(relabel_connected(LabelMap(2, 2, {5, 5, 5, 9})) == LabelMap(2, 2, {0, 0, 0, 1}));
}

TEST_CASE("relabel splits disconnected islands of one label", "[superpixel]") {
    REQUIRE(relabel_connected(LabelMap(1, 3, {1, 0, 1})) == LabelMap(1, 3, {0, 1, 2}));
    // Diagonal contact is not 4-connectivity.
    REQUIRE(relabel_connected(LabelMap(2, 2, {3, 0, 0, 3})) == LabelMap(2, 2, {0, 1, 2, 3}));
}

TEST_CASE("relabel properties on random maps", "[superpixel]") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 20; ++round) {
        const std::size_t rows = 1 + rng() % 12;
        const std::size_t cols = 1 + rng() % 12;
        const LabelMap m = testutil::random_label_map(rng, rows, cols, 3);
        const LabelMap r = relabel_connected(m);

        require_canonical_labels(r);
        // One output label per flood-fill component, partition refined.
        REQUIRE(label_set(r).size() == testutil::count_components(m));
        REQUIRE(label_set(r).size() >= label_set(m).size());
        // Idempotent up to identity: a relabeled map is already canonical.
        REQUIRE(relabel_connected(r) == r);

        // Permuting input labels leaves the induced pixel partition intact.
        std::vector<Label> permuted(m.data());
        for (auto& v : permuted) v = 7 - v;
        const LabelMap p = relabel_connected(LabelMap(rows, cols, std::move(permuted)));
        REQUIRE(testutil::partition_signature(p) == testutil::partition_signature(r));
    }
}

TEST_CASE("slic single pixel", "[superpixel]") {
    REQUIRE(slic_segment(constant_image(1, 1, 0.5f), {1, 10.0, 10}) == LabelMap(1, 1, {0}));
}

TEST_CASE("slic on a constant 8x8 yields 4 balanced connected labels", "[superpixel]") {
    const LabelMap m = slic_segment(constant_image(8, 8, 0.25f), {4, 10.0, 10});
    require_canonical_labels(m);
    const auto sizes = label_sizes(m);
    REQUIRE(sizes.size() == 4);
    for (const auto& [label, size] : sizes) {
        REQUIRE(size >= 8);
        REQUIRE(size <= 24);
    }
    REQUIRE(testutil::count_components(m) == 4);
}

TEST_CASE("slic respects a hard vertical edge", "[superpixel]") {
    std::vector<float> data(8 * 8, 0.0f);
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 4; c < 8; ++c) data[r * 8 + c] = 1.0f;
    const LabelMap m = slic_segment(Image(8, 8, 1, std::move(data)), {2, 10.0, 10});
    REQUIRE(label_set(m).size() == 2);
    // The two labels split along a vertical boundary within one pixel of
    // column 4: everything left of column 3 is one label, everything right
    // of column 5 the other, per row.
    for (std::size_t r = 0; r < 8; ++r) {
        REQUIRE(m(r, 0) == m(0, 0));
        REQUIRE(m(r, 7) == m(0, 7));
        std::size_t flips = 0;
        for (std::size_t c = 1; c < 8; ++c) {
            if (m(r, c) != m(r, c - 1)) {
                ++flips;
                REQUIRE(c >= 3);
                REQUIRE(c <= 5);
            }
        }
        REQUIRE(flips == 1);
    }
    REQUIRE(m(0, 0) != m(0, 7));
}

TEST_CASE("slic output is a connected canonical partition", "[superpixel]") {
    std::mt19937_64 rng(12);
    for (const std::size_t channels : {std::size_t(1), std::size_t(3)}) {
        const Image img = random_image(rng, 24, 18, channels);
        const LabelMap m = slic_segment(img, {12, 10.0, 10});
        REQUIRE(m.rows() == 24);
        REQUIRE(m.cols() == 18);
        require_canonical_labels(m);
        // Every label one 4-connected region.
        REQUIRE(testutil::count_components(m) == label_set(m).size());
        // Deterministic.
        REQUIRE(slic_segment(img, {12, 10.0, 10}) == m);
    }
}

TEST_CASE("slic with one seed per pixel keeps every pixel separate", "[superpixel]") {
    const LabelMap m = slic_segment(constant_image(4, 4, 0.5f), {16, 10.0, 10});
    REQUIRE(label_set(m).size() == 16);
}

TEST_CASE("slic parameter validation", "[superpixel]") {
    const Image img = constant_image(4, 4, 0.5f);
    REQUIRE_THROWS_AS(slic_segment(img, {0, 10.0, 10}), ArgumentError);
    REQUIRE_THROWS_AS(slic_segment(img, {17, 10.0, 10}), ArgumentError);
    REQUIRE_THROWS_AS(slic_segment(img, {4, 0.0, 10}), ArgumentError);
    REQUIRE_THROWS_AS(slic_segment(img, {4, -1.0, 10}), ArgumentError);
    REQUIRE_THROWS_AS(slic_segment(img, {4, 10.0, 0}), ArgumentError);
}

TEST_CASE("slic keeps distinct color quadrants apart", "[superpixel]") {
    // Four uniform quadrants of very different colors, one seed in each.
    std::vector<float> data(8 * 8 * 3, 0.0f);
    const float palette[4][3] = {
        {0.9f, 0.1f, 0.1f}, {0.1f, 0.9f, 0.1f}, {0.1f, 0.1f, 0.9f}, {0.9f, 0.9f, 0.1f}};
    for (std::size_t r = 0; r < 8; ++r) {
        for (std::size_t c = 0; c < 8; ++c) {
            const std::size_t quad = (r / 4) * 2 + (c / 4);
            for (std::size_t ch = 0; ch < 3; ++ch)
                data[(r * 8 + c) * 3 + ch] = palette[quad][ch];
        }
    }
    const LabelMap m = slic_segment(Image(8, 8, 3, std::move(data)), {4, 10.0, 10});
    const auto sizes = label_sizes(m);
    REQUIRE(sizes.size() == 4);
    for (const auto& [label, size] : sizes) REQUIRE(size == 16);
    // Quadrants are exactly recovered.
    REQUIRE(m(0, 0) == m(3, 3));
    REQUIRE(m(0, 7) == m(3, 4));
    REQUIRE(m(0, 0) != m(0, 7));
    REQUIRE(m(0, 0) != m(7, 0));
    REQUIRE(m(7, 7) != m(0, 7));
}
