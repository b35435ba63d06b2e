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

#include <algorithm>
#include <map>
#include <set>

#include "fillin/core.hpp"

namespace fillin {

/// Per-superpixel survival bits: 1 if the superpixel is still visible after
/// point-sampled downsampling at as_stride, 0 if it vanishes. The bit domain
/// is exactly the label set of the map the signal was computed over.
class AppearanceSignal {
public:
    AppearanceSignal(std::map<Label, std::uint8_t> bits, std::size_t as_stride)
        : bits_(std::move(bits)), as_stride_(as_stride) {
        if (as_stride_ == 0)
            throw ArgumentError("appearance signal: as_stride must be >= 1");
        for (const auto& [label, bit] : bits_)
            if (bit > 1)
                throw ArgumentError("appearance signal: bit for label " + std::to_string(label) +
                                    " is not 0 or 1");
    }

    /// Survival bit for one label; the label must be in the signal's domain.
    std::uint8_t bit(Label x) const {
        const auto it = bits_.find(x);
        if (it == bits_.end())
            throw ContractError("appearance signal: label " + std::to_string(x) +
                                " not in signal domain (signal computed on a different map?)");
        return it->second;
    }

    bool contains(Label x) const { return bits_.count(x) != 0; }

    /// Label -> bit mapping, ascending by label.
    const std::map<Label, std::uint8_t>& bits() const { return bits_; }

    /// The labels the signal is defined over.
    std::set<Label> labels() const {
        std::set<Label> out;
        for (const auto& [label, bit] : bits_) out.insert(label);
        return out;
    }

    std::size_t size() const { return bits_.size(); }
    std::size_t as_stride() const { return as_stride_; }

    bool operator==(const AppearanceSignal&) const = default;

private:
    std::map<Label, std::uint8_t> bits_;
    std::size_t as_stride_;
};

/// Point-samples the top-left cell of every stride x stride block:
/// out[i][j] = s[min(i*stride, rows-1)][min(j*stride, cols-1)], with output
/// dimensions ceil(rows/stride) x ceil(cols/stride). stride 1 is the identity.
inline LabelMap downsample(const LabelMap& s, std::size_t stride) {
    if (stride == 0)
        throw ArgumentError("downsample: stride must be >= 1");
    const std::size_t out_rows = (s.rows() + stride - 1) / stride;
    const std::size_t out_cols = (s.cols() + stride - 1) / stride;
    std::vector<Label> out;
    out.reserve(out_rows * out_cols);
    for (std::size_t i = 0; i < out_rows; ++i) {
        const std::size_t sr = std::min(i * stride, s.rows() - 1);
        for (std::size_t j = 0; j < out_cols; ++j)
            out.push_back(s(sr, std::min(j * stride, s.cols() - 1)));
    }
    return LabelMap(out_rows, out_cols, std::move(out));
}

/// The distinct serial numbers occurring in a map.
inline std::set<Label> label_set(const LabelMap& m) {
    return std::set<Label>(m.data().begin(), m.data().end());
}

/// Simulates downsampling at as_stride and maps every label of s to a
/// survival bit: 1 if the label is still present in the downsampled map,
/// 0 if it vanished.
inline AppearanceSignal compute_signal(const LabelMap& s, std::size_t as_stride) {
    if (as_stride == 0)
        throw ArgumentError("compute_signal: as_stride must be >= 1");
    const std::set<Label> survivors = label_set(downsample(s, as_stride));
    std::map<Label, std::uint8_t> bits;
    for (Label x : label_set(s))
        bits.emplace(x, survivors.count(x) ? std::uint8_t(1) : std::uint8_t(0));
    return AppearanceSignal(std::move(bits), as_stride);
}

/// Complements every bit; domain and stride are unchanged. An involution.
inline AppearanceSignal reverse_signal(const AppearanceSignal& a) {
    std::map<Label, std::uint8_t> bits;
    for (const auto& [label, bit] : a.bits())
        bits.emplace(label, static_cast<std::uint8_t>(1 - bit));
    return AppearanceSignal(std::move(bits), a.as_stride());
}

}  // namespace fillin
