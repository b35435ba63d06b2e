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
// Synthetic small-object demo: plants simple shapes on a canvas, builds
// one-hot "low level" (full resolution) and "high level" (downsampled then
// bilinearly upsampled) features, fuses them with the survival masks, and
// measures how much of each object each path recovers.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fillin/core.hpp"
#include "fillin/fusion.hpp"
#include "fillin/io.hpp"
#include "fillin/signal.hpp"
#include "fillin/superpixel.hpp"

namespace fillin {

enum class DemoShape { Rect, Disk };

inline const char* demo_shape_name(DemoShape s) {
    return s == DemoShape::Rect ? "rect" : "disk";
}

/// One planted object: a size x size square or the inscribed disk, painted
/// with a nonzero class id. Position is the top-left corner of the bounding
/// box; when absent it is drawn from the spec's seeded generator.
struct DemoObject {
    DemoShape shape = DemoShape::Rect;
    std::size_t size = 1;
    Label class_id = 1;
    std::optional<std::pair<std::size_t, std::size_t>> at;
};

struct DemoSpec {
    std::size_t rows = 64;
    std::size_t cols = 64;
    std::vector<DemoObject> objects;
    std::uint64_t seed = 0;
    std::size_t high_stride = 16;
};

/// How the demo obtains its superpixel map: run SLIC on the rendered image,
/// take the ground-truth class regions (exact isolation), or use a map the
/// caller supplies.
enum class DemoSegmenter { Slic, Truth, File };

struct DemoOptions {
    DemoSegmenter segmenter = DemoSegmenter::Slic;
    SlicParams slic;
    std::size_t as_stride = 16;
    std::optional<LabelMap> external_superpixels;
};

struct DemoObjectReport {
    std::size_t index = 0;
    DemoShape shape = DemoShape::Rect;
    std::size_t size = 0;
    Label class_id = 0;
    std::size_t row = 0;
    std::size_t col = 0;
    std::size_t pixels = 0;
    double mask_high_fraction = 0.0;  // fraction of the object under the H mask
    double fused_recall = 0.0;        // fraction decoded to class_id from the fused map
    double high_only_recall = 0.0;    // same, decoding the high-level map alone
    double low_only_recall = 0.0;     // same, decoding the low-level map alone
};

struct DemoResult {
    LabelMap class_map;
    Image rendered;
    LabelMap superpixels;
    AppearanceSignal signal;
    BinaryMask mask_high;
    LabelMap fused_decode;
    LabelMap high_decode;
    LabelMap low_decode;
    std::vector<DemoObjectReport> objects;
    double background_fused_recall = 0.0;
};

/// One-hot encoding: channel k is 1 where the label equals k, 0 elsewhere.
/// channels must exceed every label in the map.
inline FeatureMap one_hot(const LabelMap& m, std::size_t channels) {
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.data()[i] >= channels)
            throw ArgumentError("one_hot: label " + std::to_string(m.data()[i]) +
                                " needs more than " + std::to_string(channels) + " channels");
    }
    const std::size_t cells = detail::checked_cells(m.rows(), m.cols(), channels, "feature map");
    std::vector<float> data(cells, 0.0f);
    for (std::size_t i = 0; i < m.size(); ++i) data[i * channels + m.data()[i]] = 1.0f;
    return FeatureMap(m.rows(), m.cols(), channels, std::move(data));
}

/// Per-pixel argmax over channels; ties go to the lowest channel index.
inline LabelMap argmax_channels(const FeatureMap& f) {
    std::vector<Label> out(f.rows() * f.cols());
    const std::size_t ch = f.channels();
    for (std::size_t p = 0; p < out.size(); ++p) {
        const float* v = &f.data()[p * ch];
        std::size_t best = 0;
        for (std::size_t c = 1; c < ch; ++c) {
            if (v[c] > v[best]) best = c;
        }
        out[p] = static_cast<Label>(best);
    }
    return LabelMap(f.rows(), f.cols(), std::move(out));
}

namespace detail {

inline bool demo_pixel_in_shape(DemoShape shape, std::size_t size, std::size_t dr,
                                std::size_t dc) {
    if (shape == DemoShape::Rect) return true;
    const double radius = static_cast<double>(size) / 2.0;
    const double center = (static_cast<double>(size) - 1.0) / 2.0;
    const double y = static_cast<double>(dr) - center;
    const double x = static_cast<double>(dc) - center;
    return y * y + x * x <= radius * radius;
}

}  // namespace detail

/// Runs the full synthetic pipeline. The high-level feature is the class
/// map's one-hot after point downsampling by spec.high_stride and bilinear
/// upsampling back, so objects smaller than the stride genuinely vanish from
/// it. Fusion happens at full canvas resolution (scale 1) with the survival
/// signal computed at options.as_stride.
inline DemoResult run_demo(const DemoSpec& spec, const DemoOptions& options = DemoOptions()) {
    if (spec.rows == 0 || spec.cols == 0)
        throw ArgumentError("demo: canvas dimensions must be >= 1");
    if (spec.high_stride == 0) throw ArgumentError("demo: high_stride must be >= 1");
    if (options.as_stride == 0) throw ArgumentError("demo: as_stride must be >= 1");

    // Place and paint objects onto the class map, background class 0.
    // Objects are painted in order; later objects overwrite earlier ones.
    std::mt19937_64 rng(spec.seed);
    std::vector<Label> classes(spec.rows * spec.cols, 0);
    std::vector<std::pair<std::size_t, std::size_t>> placed;
    Label max_class = 0;
    for (std::size_t idx = 0; idx < spec.objects.size(); ++idx) {
        const DemoObject& obj = spec.objects[idx];
        if (obj.class_id == 0)
            throw ArgumentError("demo: object " + std::to_string(idx) +
                                " uses class id 0, which is reserved for the background");
        if (obj.class_id > 63)
            throw ArgumentError("demo: object " + std::to_string(idx) + " class id " +
                                std::to_string(obj.class_id) + " exceeds the supported 63");
        if (obj.size == 0)
            throw ArgumentError("demo: object " + std::to_string(idx) + " has size 0");
        if (obj.size > spec.rows || obj.size > spec.cols)
            throw ArgumentError("demo: object " + std::to_string(idx) + " of size " +
                                std::to_string(obj.size) + " does not fit a " +
                                std::to_string(spec.rows) + "x" + std::to_string(spec.cols) +
                                " canvas");
        std::size_t r0, c0;
        if (obj.at) {
            r0 = obj.at->first;
            c0 = obj.at->second;
            if (r0 + obj.size > spec.rows || c0 + obj.size > spec.cols)
                throw ArgumentError("demo: object " + std::to_string(idx) + " at (" +
                                    std::to_string(r0) + "," + std::to_string(c0) +
                                    ") does not fit the canvas");
        } else {
            r0 = std::uniform_int_distribution<std::size_t>(0, spec.rows - obj.size)(rng);
            c0 = std::uniform_int_distribution<std::size_t>(0, spec.cols - obj.size)(rng);
        }
        placed.emplace_back(r0, c0);
        max_class = std::max(max_class, obj.class_id);
        for (std::size_t dr = 0; dr < obj.size; ++dr) {
            for (std::size_t dc = 0; dc < obj.size; ++dc) {
                if (detail::demo_pixel_in_shape(obj.shape, obj.size, dr, dc))
                    classes[(r0 + dr) * spec.cols + (c0 + dc)] = obj.class_id;
            }
        }
    }
    LabelMap class_map(spec.rows, spec.cols, std::move(classes));

    // Render each class with its palette color so SLIC has real contrast.
    std::vector<float> pixels(spec.rows * spec.cols * 3);
    for (std::size_t p = 0; p < class_map.size(); ++p) {
        const std::array<std::uint8_t, 3> rgb = label_color(class_map.data()[p]);
        for (std::size_t c = 0; c < 3; ++c)
            pixels[p * 3 + c] = static_cast<float>(rgb[c]) / 255.0f;
    }
    Image rendered(spec.rows, spec.cols, 3, std::move(pixels));

    LabelMap superpixels = [&]() -> LabelMap {
        switch (options.segmenter) {
            case DemoSegmenter::Slic:
                return slic_segment(rendered, options.slic);
            case DemoSegmenter::Truth:
                return relabel_connected(class_map);
            case DemoSegmenter::File:
                if (!options.external_superpixels)
                    throw ArgumentError("demo: file segmenter selected but no map supplied");
                if (options.external_superpixels->rows() != spec.rows ||
                    options.external_superpixels->cols() != spec.cols)
                    throw ContractError("demo: supplied superpixel map is " +
                                        std::to_string(options.external_superpixels->rows()) +
                                        "x" +
                                        std::to_string(options.external_superpixels->cols()) +
                                        " but the canvas is " + std::to_string(spec.rows) +
                                        "x" + std::to_string(spec.cols));
                return *options.external_superpixels;
        }
        throw ArgumentError("demo: unknown segmenter");
    }();

    const std::size_t channels = static_cast<std::size_t>(max_class) + 1;
    const FeatureMap low = one_hot(class_map, channels);
    const FeatureMap high = bilinear_upsample(
        one_hot(downsample(class_map, spec.high_stride), channels), spec.rows, spec.cols);

    const AppearanceSignal signal = compute_signal(superpixels, options.as_stride);
    const MaskPair masks = build_masks(superpixels, 1, signal);
    const FusedPair fused = fillin_fuse(low, high, masks.high);

    DemoResult result{std::move(class_map),
                      std::move(rendered),
                      std::move(superpixels),
                      signal,
                      fused.mask_high,
                      argmax_channels(fused.fused),
                      argmax_channels(high),
                      argmax_channels(low),
                      {},
                      0.0};

    for (std::size_t idx = 0; idx < spec.objects.size(); ++idx) {
        const DemoObject& obj = spec.objects[idx];
        DemoObjectReport rep;
        rep.index = idx;
        rep.shape = obj.shape;
        rep.size = obj.size;
        rep.class_id = obj.class_id;
        rep.row = placed[idx].first;
        rep.col = placed[idx].second;
        std::size_t hits_mask = 0, hits_fused = 0, hits_high = 0, hits_low = 0;
        for (std::size_t dr = 0; dr < obj.size; ++dr) {
            for (std::size_t dc = 0; dc < obj.size; ++dc) {
                const std::size_t r = rep.row + dr;
                const std::size_t c = rep.col + dc;
                // Count only pixels still owned by this object, in case a
                // later object overwrote part of it.
                if (result.class_map(r, c) != obj.class_id ||
                    !detail::demo_pixel_in_shape(obj.shape, obj.size, dr, dc))
                    continue;
                ++rep.pixels;
                hits_mask += result.mask_high(r, c);
                hits_fused += result.fused_decode(r, c) == obj.class_id;
                hits_high += result.high_decode(r, c) == obj.class_id;
                hits_low += result.low_decode(r, c) == obj.class_id;
            }
        }
        const double denom = rep.pixels ? static_cast<double>(rep.pixels) : 1.0;
        rep.mask_high_fraction = static_cast<double>(hits_mask) / denom;
        rep.fused_recall = static_cast<double>(hits_fused) / denom;
        rep.high_only_recall = static_cast<double>(hits_high) / denom;
        rep.low_only_recall = static_cast<double>(hits_low) / denom;
        result.objects.push_back(rep);
    }

    std::size_t bg = 0, bg_hit = 0;
    for (std::size_t p = 0; p < result.class_map.size(); ++p) {
        if (result.class_map.data()[p] != 0) continue;
        ++bg;
        bg_hit += result.fused_decode.data()[p] == 0;
    }
    result.background_fused_recall =
        bg ? static_cast<double>(bg_hit) / static_cast<double>(bg) : 1.0;
    return result;
}

}  // namespace fillin
