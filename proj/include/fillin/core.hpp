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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fillin {

/// Base class for every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed serialized input (text grids, FMAP payloads, netpbm images).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure; the message names the offending path.
class IoError : public Error {
public:
    using Error::Error;
};

/// A parameter value outside its documented domain (zero stride, oversized
/// superpixel count, out-of-range intensities, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Inputs that are individually valid but inconsistent with each other:
/// shape mismatches, or a signal computed on a different label map.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Superpixel serial number. Values are opaque identifiers: they need not be
/// contiguous, need not start at zero, and are never renumbered on ingestion.
using Label = std::uint32_t;

namespace detail {

// Grids with more cells than the 32-bit serial space are out of scope.
inline constexpr std::uint64_t max_cells = std::numeric_limits<std::uint32_t>::max();

inline std::size_t checked_cells(std::size_t rows, std::size_t cols, std::size_t channels,
                                 const char* what) {
    if (rows == 0 || cols == 0 || channels == 0)
        throw ArgumentError(std::string(what) + ": dimensions must be >= 1");
    std::uint64_t n = rows;
    if (n > max_cells / cols)
        throw ArgumentError(std::string(what) + ": dimension overflow");
    n *= cols;
    if (n > max_cells / channels)
        throw ArgumentError(std::string(what) + ": dimension overflow");
    n *= channels;
    return static_cast<std::size_t>(n);
}

}  // namespace detail

/// 2D grid of superpixel serial numbers, row-major. Immutable once built.
class LabelMap {
public:
    LabelMap(std::size_t rows, std::size_t cols, std::vector<Label> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        const std::size_t cells = detail::checked_cells(rows_, cols_, 1, "label map");
        if (data_.size() != cells)
            throw ArgumentError("label map: expected " + std::to_string(cells) +
                                " values, got " + std::to_string(data_.size()));
    }

    static LabelMap filled(std::size_t rows, std::size_t cols, Label value) {
        const std::size_t cells = detail::checked_cells(rows, cols, 1, "label map");
        return LabelMap(rows, cols, std::vector<Label>(cells, value));
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    Label operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    const std::vector<Label>& data() const { return data_; }

    bool operator==(const LabelMap&) const = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Label> data_;
};

/// 2D {0,1} matrix at feature resolution, row-major.
class BinaryMask {
public:
    BinaryMask(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        const std::size_t cells = detail::checked_cells(rows_, cols_, 1, "binary mask");
        if (data_.size() != cells)
            throw ArgumentError("binary mask: expected " + std::to_string(cells) +
                                " values, got " + std::to_string(data_.size()));
        for (std::size_t i = 0; i < data_.size(); ++i)
            if (data_[i] > 1)
                throw ArgumentError("binary mask: value " + std::to_string(data_[i]) +
                                    " at index " + std::to_string(i) + " is not 0 or 1");
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    std::uint8_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    const std::vector<std::uint8_t>& data() const { return data_; }

    std::size_t ones() const {
        std::size_t n = 0;
        for (std::uint8_t v : data_) n += v;
        return n;
    }

    /// Elementwise 1 - mask.
    BinaryMask complemented() const {
        std::vector<std::uint8_t> out(data_.size());
        for (std::size_t i = 0; i < data_.size(); ++i)
            out[i] = static_cast<std::uint8_t>(1 - data_[i]);
        return BinaryMask(rows_, cols_, std::move(out));
    }

    bool operator==(const BinaryMask&) const = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::uint8_t> data_;
};

/// Dense activation tensor, row-major with channels innermost ("channel-last").
/// Every value is finite; construction rejects NaN and infinities.
class FeatureMap {
public:
    FeatureMap(std::size_t rows, std::size_t cols, std::size_t channels, std::vector<float> data)
        : rows_(rows), cols_(cols), channels_(channels), data_(std::move(data)) {
        const std::size_t cells = detail::checked_cells(rows_, cols_, channels_, "feature map");
        if (data_.size() != cells)
            throw ArgumentError("feature map: expected " + std::to_string(cells) +
                                " values, got " + std::to_string(data_.size()));
        for (std::size_t i = 0; i < data_.size(); ++i)
            if (!std::isfinite(data_[i]))
                throw ArgumentError("feature map: non-finite value at index " + std::to_string(i));
    }

    static FeatureMap filled(std::size_t rows, std::size_t cols, std::size_t channels,
                             float value) {
        const std::size_t cells = detail::checked_cells(rows, cols, channels, "feature map");
        return FeatureMap(rows, cols, channels, std::vector<float>(cells, value));
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t channels() const { return channels_; }
    std::size_t size() const { return data_.size(); }
    float operator()(std::size_t r, std::size_t c, std::size_t ch) const {
        return data_[(r * cols_ + c) * channels_ + ch];
    }
    const std::vector<float>& data() const { return data_; }

    bool operator==(const FeatureMap&) const = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::size_t channels_;
    std::vector<float> data_;
};

/// Named fusion wirings. Bi4 fuses at scale 4, Bi2 at scale 2; Reverse runs
/// two complementary passes meant for downstream concatenation.
enum class Variant { Bi4, Bi2, Reverse };

inline const char* variant_name(Variant v) {
    switch (v) {
        case Variant::Bi4: return "Bi4";
        case Variant::Bi2: return "Bi2";
        case Variant::Reverse: return "Reverse";
    }
    return "?";
}

/// Knobs for one FillIn pass: the scale the masks are built at, the stride of
/// the survival signal, and whether the signal is complemented.
class FusionConfig {
public:
    FusionConfig(std::size_t fillin_scale, std::size_t as_stride, bool reverse, Variant variant)
        : fillin_scale_(fillin_scale), as_stride_(as_stride), reverse_(reverse), variant_(variant) {
        if (fillin_scale_ == 0)
            throw ArgumentError("fusion config: fillin_scale must be >= 1");
        if (as_stride_ == 0)
            throw ArgumentError("fusion config: as_stride must be >= 1");
        if ((variant_ == Variant::Reverse) != reverse_)
            throw ArgumentError("fusion config: the reverse flag is set exactly for the "
                                "Reverse variant");
    }

    static FusionConfig bi4(std::size_t as_stride = 16) {
        return FusionConfig(4, as_stride, false, Variant::Bi4);
    }
    static FusionConfig bi2(std::size_t as_stride = 16) {
        return FusionConfig(2, as_stride, false, Variant::Bi2);
    }
    static FusionConfig reversed(std::size_t fillin_scale = 4, std::size_t as_stride = 16) {
        return FusionConfig(fillin_scale, as_stride, true, Variant::Reverse);
    }

    std::size_t fillin_scale() const { return fillin_scale_; }
    std::size_t as_stride() const { return as_stride_; }
    bool reverse() const { return reverse_; }
    Variant variant() const { return variant_; }

    bool operator==(const FusionConfig&) const = default;

private:
    std::size_t fillin_scale_;
    std::size_t as_stride_;
    bool reverse_;
    Variant variant_;
};

}  // namespace fillin
