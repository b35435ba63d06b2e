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
//
// Brute-force reference implementations used to validate the optimized
// paths. They deliberately share no helper code with the rest of the
// library (only the core types), stay single-threaded, and accept only
// small inputs. Keep them obviously correct; never optimize them.

#pragma once

#include <set>
#include <string>
#include <vector>

#include "fillin/core.hpp"

namespace fillin {

namespace detail {

inline void oracle_size_check(std::size_t rows, std::size_t cols, const char* who) {
    if (rows > 256 || cols > 256)
        throw ArgumentError(std::string(who) + ": oracles accept at most 256x256 inputs, got " +
                            std::to_string(rows) + "x" + std::to_string(cols));
}

}  // namespace detail

/// Point sampling with stride t: out[i][j] = s[min(i*t, rows-1)][min(j*t, cols-1)],
/// output is ceil(rows/t) x ceil(cols/t). Explicit double loop.
inline LabelMap oracle_downsample(const LabelMap& s, std::size_t t) {
    detail::oracle_size_check(s.rows(), s.cols(), "oracle_downsample");
    if (t == 0) throw ArgumentError("oracle_downsample: stride must be >= 1");
    std::size_t out_rows = s.rows() / t;
    if (out_rows * t < s.rows()) ++out_rows;
    std::size_t out_cols = s.cols() / t;
    if (out_cols * t < s.cols()) ++out_cols;
    std::vector<Label> data;
    for (std::size_t i = 0; i < out_rows; ++i) {
        for (std::size_t j = 0; j < out_cols; ++j) {
            std::size_t r = i * t;
            if (r > s.rows() - 1) r = s.rows() - 1;
            std::size_t c = j * t;
            if (c > s.cols() - 1) c = s.cols() - 1;
            data.push_back(s(r, c));
        }
    }
    return LabelMap(out_rows, out_cols, std::move(data));
}

/// Labels still present after point sampling at stride p, collected by
/// visiting every sampled cell directly.
inline std::set<Label> oracle_survivors(const LabelMap& s, std::size_t p) {
    detail::oracle_size_check(s.rows(), s.cols(), "oracle_survivors");
    if (p == 0) throw ArgumentError("oracle_survivors: stride must be >= 1");
    std::size_t out_rows = s.rows() / p;
    if (out_rows * p < s.rows()) ++out_rows;
    std::size_t out_cols = s.cols() / p;
    if (out_cols * p < s.cols()) ++out_cols;
    std::set<Label> survivors;
    for (std::size_t i = 0; i < out_rows; ++i) {
        for (std::size_t j = 0; j < out_cols; ++j) {
            std::size_t r = i * p;
            if (r > s.rows() - 1) r = s.rows() - 1;
            std::size_t c = j * p;
            if (c > s.cols() - 1) c = s.cols() - 1;
            survivors.insert(s(r, c));
        }
    }
    return survivors;
}

/// The literal multiply-add fusion: out = f_low * (1 - h) + f_high * h per
/// element, evaluated in float arithmetic.
inline FeatureMap oracle_fuse(const FeatureMap& f_low, const FeatureMap& f_high,
                              const BinaryMask& h) {
    detail::oracle_size_check(f_low.rows(), f_low.cols(), "oracle_fuse");
    if (f_low.rows() != f_high.rows() || f_low.cols() != f_high.cols() ||
        f_low.channels() != f_high.channels() || h.rows() != f_low.rows() ||
        h.cols() != f_low.cols())
        throw ContractError("oracle_fuse: shape mismatch");
    std::vector<float> out(f_low.size());
    for (std::size_t r = 0; r < f_low.rows(); ++r) {
        for (std::size_t c = 0; c < f_low.cols(); ++c) {
            const float hh = static_cast<float>(h(r, c));
            const float ll = 1.0f - hh;
            for (std::size_t ch = 0; ch < f_low.channels(); ++ch) {
                const std::size_t idx = (r * f_low.cols() + c) * f_low.channels() + ch;
                out[idx] = f_low.data()[idx] * ll + f_high.data()[idx] * hh;
            }
        }
    }
    return FeatureMap(f_low.rows(), f_low.cols(), f_low.channels(), std::move(out));
}

}  // namespace fillin
