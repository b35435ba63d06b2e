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
#include <vector>

#include "fillin/core.hpp"
#include "fillin/parallel.hpp"
#include "fillin/signal.hpp"

namespace fillin {

/// The two complementary region masks at feature resolution. high marks cells
/// whose superpixel survives (filled from the high-level map), low is its
/// elementwise complement.
struct MaskPair {
    BinaryMask high;
    BinaryMask low;
};

/// A fused map together with the mask that produced it (1 = the value was
/// copied from the high-level source).
struct FusedPair {
    FeatureMap fused;
    BinaryMask mask_high;
};

/// Downsamples the full-resolution superpixel map by fillin_scale and turns
/// each cell's survival bit into the high/low masks. Every label surviving
/// the downsample must be in the signal's domain.
inline MaskPair build_masks(const LabelMap& s, std::size_t fillin_scale,
                            const AppearanceSignal& signal) {
    const LabelMap u = downsample(s, fillin_scale);
    std::vector<std::uint8_t> high(u.size());
    std::vector<std::uint8_t> low(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const std::uint8_t bit = signal.bit(u.data()[i]);
        high[i] = bit;
        low[i] = static_cast<std::uint8_t>(1 - bit);
    }
    return MaskPair{BinaryMask(u.rows(), u.cols(), std::move(high)),
                    BinaryMask(u.rows(), u.cols(), std::move(low))};
}

/// Region-exclusive fusion: every output cell is copied whole from exactly
/// one source, the high-level map where mask_high is 1 and the low-level map
/// elsewhere. The same mask applies to every channel, so all channels of a
/// pixel always come from the same level.
inline FusedPair fillin_fuse(const FeatureMap& f_low, const FeatureMap& f_high,
                             const BinaryMask& mask_high) {
    if (f_low.rows() != f_high.rows() || f_low.cols() != f_high.cols())
        throw ContractError("fillin_fuse: low is " + std::to_string(f_low.rows()) + "x" +
                            std::to_string(f_low.cols()) + " but high is " +
                            std::to_string(f_high.rows()) + "x" + std::to_string(f_high.cols()));
    if (f_low.channels() != f_high.channels())
        throw ContractError("fillin_fuse: channel mismatch, " + std::to_string(f_low.channels()) +
                            " vs " + std::to_string(f_high.channels()));
    if (mask_high.rows() != f_low.rows() || mask_high.cols() != f_low.cols())
        throw ContractError("fillin_fuse: mask is " + std::to_string(mask_high.rows()) + "x" +
                            std::to_string(mask_high.cols()) + " but features are " +
                            std::to_string(f_low.rows()) + "x" + std::to_string(f_low.cols()));

    const std::size_t cols = f_low.cols();
    const std::size_t ch = f_low.channels();
    std::vector<float> out(f_low.size());
    detail::parallel_rows(f_low.rows(), [&](std::size_t r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const float* src = mask_high(r, c) ? &f_high.data()[(r * cols + c) * ch]
                                               : &f_low.data()[(r * cols + c) * ch];
            std::copy(src, src + ch, &out[(r * cols + c) * ch]);
        }
    });
    return FusedPair{FeatureMap(f_low.rows(), f_low.cols(), ch, std::move(out)), mask_high};
}

/// Bilinear resize under the half-pixel-center convention:
/// src = (dst + 0.5) * in/out - 0.5, clamped to [0, in-1]. Channel count is
/// preserved; equal input and output dimensions are an exact identity, and
/// every output sample stays within the range of its four source samples.
inline FeatureMap bilinear_upsample(const FeatureMap& f, std::size_t out_rows,
                                    std::size_t out_cols) {
    if (out_rows == 0 || out_cols == 0)
        throw ArgumentError("bilinear_upsample: output dimensions must be >= 1");
    if (out_rows == f.rows() && out_cols == f.cols())
        return f;

    struct Tap {
        std::size_t lo, hi;
        double frac;
    };
    const auto make_taps = [](std::size_t in, std::size_t out) {
        std::vector<Tap> taps(out);
        const double scale = static_cast<double>(in) / static_cast<double>(out);
        for (std::size_t i = 0; i < out; ++i) {
            double src = (static_cast<double>(i) + 0.5) * scale - 0.5;
            src = std::clamp(src, 0.0, static_cast<double>(in - 1));
            const std::size_t lo = static_cast<std::size_t>(src);
            taps[i] = Tap{lo, std::min(lo + 1, in - 1), src - static_cast<double>(lo)};
        }
        return taps;
    };
    const std::vector<Tap> row_taps = make_taps(f.rows(), out_rows);
    const std::vector<Tap> col_taps = make_taps(f.cols(), out_cols);

    const std::size_t ch = f.channels();
    const std::size_t cells = detail::checked_cells(out_rows, out_cols, ch, "feature map");
    std::vector<float> out(cells);
    detail::parallel_rows(out_rows, [&](std::size_t i) {
        const Tap& rt = row_taps[i];
        for (std::size_t j = 0; j < out_cols; ++j) {
            const Tap& ct = col_taps[j];
            for (std::size_t c = 0; c < ch; ++c) {
                const double v00 = f(rt.lo, ct.lo, c);
                const double v01 = f(rt.lo, ct.hi, c);
                const double v10 = f(rt.hi, ct.lo, c);
                const double v11 = f(rt.hi, ct.hi, c);
                const double top = v00 + (v01 - v00) * ct.frac;
                const double bottom = v10 + (v11 - v10) * ct.frac;
                out[(i * out_cols + j) * ch + c] =
                    static_cast<float>(top + (bottom - top) * rt.frac);
            }
        }
    });
    return FeatureMap(out_rows, out_cols, ch, std::move(out));
}

/// Stacks b's channels after a's; spatial dimensions must match.
inline FeatureMap concat_channels(const FeatureMap& a, const FeatureMap& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ContractError("concat_channels: spatial mismatch, " + std::to_string(a.rows()) +
                            "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                            "x" + std::to_string(b.cols()));
    const std::size_t ch = a.channels() + b.channels();
    const std::size_t cells = detail::checked_cells(a.rows(), a.cols(), ch, "feature map");
    std::vector<float> out;
    out.reserve(cells);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            const float* pa = &a.data()[(r * a.cols() + c) * a.channels()];
            const float* pb = &b.data()[(r * b.cols() + c) * b.channels()];
            out.insert(out.end(), pa, pa + a.channels());
            out.insert(out.end(), pb, pb + b.channels());
        }
    }
    return FeatureMap(a.rows(), a.cols(), ch, std::move(out));
}

namespace detail {

inline FeatureMap fit_to(const FeatureMap& f, std::size_t rows, std::size_t cols) {
    if (f.rows() == rows && f.cols() == cols) return f;
    if (f.rows() > rows || f.cols() > cols)
        throw ContractError("run_structure: feature map " + std::to_string(f.rows()) + "x" +
                            std::to_string(f.cols()) + " exceeds the fusion resolution " +
                            std::to_string(rows) + "x" + std::to_string(cols) +
                            "; only upsampling is supported");
    return bilinear_upsample(f, rows, cols);
}

}  // namespace detail

/// Runs one complete structure on a full-resolution superpixel map and two
/// feature maps. Both features are bilinearly upsampled to the mask
/// resolution implied by cfg.fillin_scale, the survival signal is computed at
/// cfg.as_stride, and the maps are fused. Non-reverse variants return one
/// FusedPair; Reverse returns two, the plain pass first and the complemented
/// pass second, ready for downstream concatenation.
inline std::vector<FusedPair> run_structure(const FusionConfig& cfg, const LabelMap& s,
                                            const FeatureMap& f_low, const FeatureMap& f_high) {
    if (f_low.channels() != f_high.channels())
        throw ContractError("run_structure: channel mismatch, " +
                            std::to_string(f_low.channels()) + " vs " +
                            std::to_string(f_high.channels()));
    const std::size_t out_rows = (s.rows() + cfg.fillin_scale() - 1) / cfg.fillin_scale();
    const std::size_t out_cols = (s.cols() + cfg.fillin_scale() - 1) / cfg.fillin_scale();
    const FeatureMap low = detail::fit_to(f_low, out_rows, out_cols);
    const FeatureMap high = detail::fit_to(f_high, out_rows, out_cols);

    const AppearanceSignal signal = compute_signal(s, cfg.as_stride());
    std::vector<FusedPair> result;
    const MaskPair thick = build_masks(s, cfg.fillin_scale(), signal);
    result.push_back(fillin_fuse(low, high, thick.high));
    if (cfg.reverse()) {
        const MaskPair thin = build_masks(s, cfg.fillin_scale(), reverse_signal(signal));
        result.push_back(fillin_fuse(low, high, thin.high));
    }
    return result;
}

}  // namespace fillin
