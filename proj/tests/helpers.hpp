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

#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "fillin/core.hpp"

namespace testutil {

inline fillin::LabelMap random_label_map(std::mt19937_64& rng, std::size_t rows,
                                         std::size_t cols, fillin::Label max_label) {
    std::uniform_int_distribution<fillin::Label> pick(0, max_label);
    std::vector<fillin::Label> data(rows * cols);
    for (auto& v : data) v = pick(rng);
    return fillin::LabelMap(rows, cols, std::move(data));
}

inline fillin::FeatureMap random_feature_map(std::mt19937_64& rng, std::size_t rows,
                                             std::size_t cols, std::size_t channels,
                                             float lo = -8.0f, float hi = 8.0f) {
    std::uniform_real_distribution<float> pick(lo, hi);
    std::vector<float> data(rows * cols * channels);
    for (auto& v : data) {
        v = pick(rng);
        if (v == 0.0f) v = 0.5f;  // keep signed-zero quirks out of bitwise checks
    }
    return fillin::FeatureMap(rows, cols, channels, std::move(data));
}

// Independent flood fill: number of 4-connected components of equal labels.
inline std::size_t count_components(const fillin::LabelMap& m) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    std::vector<char> seen(m.size(), 0);
    std::vector<std::size_t> stack;
    std::size_t components = 0;
    for (std::size_t start = 0; start < m.size(); ++start) {
        if (seen[start]) continue;
        ++components;
        seen[start] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t at = stack.back();
            stack.pop_back();
            const std::size_t r = at / cols;
            const std::size_t c = at % cols;
            const std::size_t nbrs[4] = {
                r > 0 ? at - cols : at,
                r + 1 < rows ? at + cols : at,
                c > 0 ? at - 1 : at,
                c + 1 < cols ? at + 1 : at,
            };
            for (const std::size_t n : nbrs) {
                if (n != at && !seen[n] && m.data()[n] == m.data()[at]) {
                    seen[n] = 1;
                    stack.push_back(n);
                }
            }
        }
    }
    return components;
}

// Canonical form of the pixel partition induced by a label map: each pixel
// mapped to the flat index of the first pixel sharing its label. Two maps
// induce the same partition iff their signatures are equal.
inline std::vector<std::size_t> partition_signature(const fillin::LabelMap& m) {
    std::vector<std::size_t> sig(m.size());
    std::map<fillin::Label, std::size_t> firsts;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const auto [it, inserted] = firsts.emplace(m.data()[i], i);
        sig[i] = it->second;
    }
    return sig;
}

inline bool bitwise_equal(const fillin::FeatureMap& a, const fillin::FeatureMap& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.channels() != b.channels())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::bit_cast<std::uint32_t>(a.data()[i]) != std::bit_cast<std::uint32_t>(b.data()[i]))
            return false;
    }
    return true;
}

}  // namespace testutil
