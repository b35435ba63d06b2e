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
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "fillin/core.hpp"
#include "fillin/parallel.hpp"

namespace fillin {

/// A row-major raster image, 1 channel (grayscale) or 3 channels (RGB),
/// all samples finite and in [0, 1].
class Image {
  public:
    Image(std::size_t rows, std::size_t cols, std::size_t channels, std::vector<float> data)
        : rows_(rows), cols_(cols), channels_(channels), data_(std::move(data)) {
        if (rows_ == 0 || cols_ == 0)
            throw ArgumentError("image dimensions must be >= 1, got " + std::to_string(rows_) +
                                "x" + std::to_string(cols_));
        if (channels_ != 1 && channels_ != 3)
            throw ArgumentError("image must have 1 or 3 channels, got " +
                                std::to_string(channels_));
        const std::size_t cells = detail::checked_cells(rows_, cols_, channels_, "image");
        if (data_.size() != cells)
            throw ArgumentError("image data has " + std::to_string(data_.size()) +
                                " samples, expected " + std::to_string(cells));
        for (std::size_t i = 0; i < data_.size(); ++i) {
            if (!(data_[i] >= 0.0f && data_[i] <= 1.0f))
                throw ArgumentError("image sample at flat index " + std::to_string(i) +
                                    " is outside [0, 1]");
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t channels() const { return channels_; }
    std::size_t size() const { return data_.size(); }

    float operator()(std::size_t r, std::size_t c, std::size_t ch = 0) const {
        return data_[(r * cols_ + c) * channels_ + ch];
    }

    const std::vector<float>& data() const { return data_; }

  private:
    std::size_t rows_;
    std::size_t cols_;
    std::size_t channels_;
    std::vector<float> data_;
};

struct SlicParams {
    std::size_t target_superpixels = 256;
    double compactness = 10.0;
    std::size_t iterations = 10;
};

/// Renumbers the 4-connected components of equal input label to 0..L-1 in
/// raster order of each component's first pixel. Splits any input label
/// whose pixels form several disconnected islands.
inline LabelMap relabel_connected(const LabelMap& m) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    constexpr Label unset = std::numeric_limits<Label>::max();
    std::vector<Label> out(m.size(), unset);
    std::vector<std::size_t> stack;
    Label next = 0;
    for (std::size_t start = 0; start < m.size(); ++start) {
        if (out[start] != unset) continue;
        const Label want = m.data()[start];
        out[start] = next;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t at = stack.back();
            stack.pop_back();
            const std::size_t r = at / cols;
            const std::size_t c = at % cols;
            const std::size_t nbr[4] = {
                r > 0 ? at - cols : at,
                r + 1 < rows ? at + cols : at,
                c > 0 ? at - 1 : at,
                c + 1 < cols ? at + 1 : at,
            };
            for (const std::size_t n : nbr) {
                if (n != at && out[n] == unset && m.data()[n] == want) {
                    out[n] = next;
                    stack.push_back(n);
                }
            }
        }
        ++next;
    }
    return LabelMap(rows, cols, std::move(out));
}

namespace detail {

// Color feature used by the clustering: CIELAB for RGB input (sRGB primaries,
// D65 white), and (intensity * 100, 0, 0) for grayscale so the numeric scale
// matches the L channel.
struct LabPixel {
    double l, a, b;
};

inline double srgb_linearize(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
    constexpr double cube = (6.0 / 29.0) * (6.0 / 29.0) * (6.0 / 29.0);
    return t > cube ? std::cbrt(t) : t / (3.0 * (6.0 / 29.0) * (6.0 / 29.0)) + 4.0 / 29.0;
}

inline std::vector<LabPixel> to_lab(const Image& img) {
    std::vector<LabPixel> lab(img.rows() * img.cols());
    const std::size_t cols = img.cols();
    parallel_rows(img.rows(), [&](std::size_t r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (img.channels() == 1) {
                lab[r * cols + c] = LabPixel{100.0 * img(r, c, 0), 0.0, 0.0};
                continue;
            }
            const double rl = srgb_linearize(img(r, c, 0));
            const double gl = srgb_linearize(img(r, c, 1));
            const double bl = srgb_linearize(img(r, c, 2));
            const double x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
            const double y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
            const double z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
            const double fx = lab_f(x / 0.95047);
            const double fy = lab_f(y);
            const double fz = lab_f(z / 1.08883);
            lab[r * cols + c] =
                LabPixel{116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
        }
    });
    return lab;
}

inline double color_dist2(const LabPixel& p, const LabPixel& q) {
    const double dl = p.l - q.l;
    const double da = p.a - q.a;
    const double db = p.b - q.b;
    return dl * dl + da * da + db * db;
}

}  // namespace detail

/// Iterative local k-means over joint (color, position) space on a regular
/// seed grid, followed by connectivity enforcement. The distance between a
/// pixel and a cluster center is
///
///   d2 = d_color^2 + (compactness^2 / S^2) * d_xy^2
///
/// with S the expected superpixel side length. Each pixel only competes
/// among centers seeded within two grid cells of its own, which keeps the
/// assignment local and the result independent of the thread budget.
///
/// Connectivity enforcement repeatedly takes the smallest 4-connected
/// fragment with fewer than rows*cols/(4*K) pixels (K = seeds actually
/// placed; ties broken by smaller fragment id) and merges it into the
/// adjacent fragment sharing the longest boundary with it (ties again by
/// smaller id). Every returned region is therefore 4-connected with at least
/// rows*cols/(4*K) pixels, capping the label count at 4*K; the floor is 1.
/// On spatially coherent images (smooth regions separated by edges) the
/// count stays within [K/2, 2K] of the target; degenerate content with no
/// coherent regions, such as per-pixel noise, merges well below that range.
/// Labels are numbered 0..L-1 in raster order of first occurrence.
inline LabelMap slic_segment(const Image& img, const SlicParams& params = SlicParams()) {
    if (params.target_superpixels == 0)
        throw ArgumentError("slic_segment: target_superpixels must be >= 1");
    if (!(params.compactness > 0.0) || !std::isfinite(params.compactness))
        throw ArgumentError("slic_segment: compactness must be finite and > 0");
    if (params.iterations == 0)
        throw ArgumentError("slic_segment: iterations must be >= 1");

    const std::size_t rows = img.rows();
    const std::size_t cols = img.cols();
    const std::size_t n = rows * cols;
    if (params.target_superpixels > n)
        throw ArgumentError("slic_segment: target_superpixels (" +
                            std::to_string(params.target_superpixels) +
                            ") exceeds the pixel count (" + std::to_string(n) + ")");
    const std::vector<detail::LabPixel> lab = detail::to_lab(img);

    // Seed grid: nr*nc cells approximating the target count with cells as
    // close to square as the aspect ratio allows.
    const double k = static_cast<double>(params.target_superpixels);
    const std::size_t nr = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::lround(
            std::sqrt(k * static_cast<double>(rows) / static_cast<double>(cols)))),
        1, rows);
    const std::size_t nc = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::lround(k / static_cast<double>(nr))), 1, cols);
    const std::size_t seeds = nr * nc;

    struct Center {
        detail::LabPixel color;
        double r, c;
    };
    std::vector<Center> centers(seeds);
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t j = 0; j < nc; ++j) {
            std::size_t sr = (2 * i + 1) * rows / (2 * nr);
            std::size_t sc = (2 * j + 1) * cols / (2 * nc);
            // Nudge the seed to the lowest-gradient spot in its 3x3
            // neighborhood so it does not start on an edge. Ties keep the
            // initial position.
            double best = std::numeric_limits<double>::infinity();
            std::size_t br = sr;
            std::size_t bc = sc;
            const auto gradient = [&](std::size_t r, std::size_t c) {
                const std::size_t rl = r > 0 ? r - 1 : r;
                const std::size_t rh = r + 1 < rows ? r + 1 : r;
                const std::size_t cl = c > 0 ? c - 1 : c;
                const std::size_t ch = c + 1 < cols ? c + 1 : c;
                return detail::color_dist2(lab[r * cols + cl], lab[r * cols + ch]) +
                       detail::color_dist2(lab[rl * cols + c], lab[rh * cols + c]);
            };
            best = gradient(sr, sc);
            for (std::size_t dr = 0; dr < 3; ++dr) {
                for (std::size_t dc = 0; dc < 3; ++dc) {
                    if (sr + dr < 1 || sr + dr > rows || sc + dc < 1 || sc + dc > cols) continue;
                    const std::size_t r = sr + dr - 1;
                    const std::size_t c = sc + dc - 1;
                    const double g = gradient(r, c);
                    if (g < best) {
                        best = g;
                        br = r;
                        bc = c;
                    }
                }
            }
            centers[i * nc + j] =
                Center{lab[br * cols + bc], static_cast<double>(br), static_cast<double>(bc)};
        }
    }

    const double side = std::sqrt(static_cast<double>(n) / static_cast<double>(seeds));
    const double spatial_w = (params.compactness * params.compactness) / (side * side);

    std::vector<Label> assign(n, 0);
    for (std::size_t iter = 0; iter < params.iterations; ++iter) {
        detail::parallel_rows(rows, [&](std::size_t r) {
            const std::size_t gr = r * nr / rows;
            const std::size_t i_lo = gr >= 2 ? gr - 2 : 0;
            const std::size_t i_hi = std::min(gr + 2, nr - 1);
            for (std::size_t c = 0; c < cols; ++c) {
                const std::size_t gc = c * nc / cols;
                const std::size_t j_lo = gc >= 2 ? gc - 2 : 0;
                const std::size_t j_hi = std::min(gc + 2, nc - 1);
                const detail::LabPixel& px = lab[r * cols + c];
                double best = std::numeric_limits<double>::infinity();
                Label best_id = 0;
                for (std::size_t i = i_lo; i <= i_hi; ++i) {
                    for (std::size_t j = j_lo; j <= j_hi; ++j) {
                        const Center& ct = centers[i * nc + j];
                        const double dr = static_cast<double>(r) - ct.r;
                        const double dc = static_cast<double>(c) - ct.c;
                        const double d =
                            detail::color_dist2(px, ct.color) + spatial_w * (dr * dr + dc * dc);
                        // <= so exact ties go to the largest grid index; this
                        // splits perfectly symmetric inputs into balanced
                        // cells instead of biasing toward low indices.
                        if (d <= best) {
                            best = d;
                            best_id = static_cast<Label>(i * nc + j);
                        }
                    }
                }
                assign[r * cols + c] = best_id;
            }
        });

        // Recompute centers as the mean of their members, accumulated in
        // raster order. Empty clusters keep their previous center.
        std::vector<double> sum(seeds * 5, 0.0);
        std::vector<std::size_t> count(seeds, 0);
        for (std::size_t p = 0; p < n; ++p) {
            const std::size_t id = assign[p];
            double* s = &sum[id * 5];
            s[0] += lab[p].l;
            s[1] += lab[p].a;
            s[2] += lab[p].b;
            s[3] += static_cast<double>(p / cols);
            s[4] += static_cast<double>(p % cols);
            ++count[id];
        }
        for (std::size_t id = 0; id < seeds; ++id) {
            if (count[id] == 0) continue;
            const double inv = 1.0 / static_cast<double>(count[id]);
            const double* s = &sum[id * 5];
            centers[id] = Center{detail::LabPixel{s[0] * inv, s[1] * inv, s[2] * inv},
                                 s[3] * inv, s[4] * inv};
        }
    }

    // Connectivity enforcement as documented above: one merge per pass until
    // every fragment clears the size floor.
    const double min_size =
        static_cast<double>(n) / (4.0 * static_cast<double>(seeds));
    LabelMap frags = relabel_connected(LabelMap(rows, cols, std::move(assign)));
    while (true) {
        Label max_label = 0;
        for (std::size_t p = 0; p < n; ++p) max_label = std::max(max_label, frags.data()[p]);
        const std::size_t count_frags = static_cast<std::size_t>(max_label) + 1;
        if (count_frags == 1) break;

        std::vector<std::size_t> sizes(count_frags, 0);
        for (std::size_t p = 0; p < n; ++p) ++sizes[frags.data()[p]];

        Label victim = 0;
        bool found = false;
        for (Label id = 0; id < count_frags; ++id) {
            if (static_cast<double>(sizes[id]) >= min_size) continue;
            if (!found || sizes[id] < sizes[victim]) {
                victim = id;
                found = true;
            }
        }
        if (!found) break;

        // Boundary length against each adjacent fragment, counting 4-adjacent
        // pixel pairs that cross the victim's border.
        std::vector<std::size_t> shared(count_frags, 0);
        for (std::size_t p = 0; p < n; ++p) {
            if (frags.data()[p] != victim) continue;
            const std::size_t r = p / cols;
            const std::size_t c = p % cols;
            const std::size_t nbr[4] = {
                r > 0 ? p - cols : p,
                r + 1 < rows ? p + cols : p,
                c > 0 ? p - 1 : p,
                c + 1 < cols ? p + 1 : p,
            };
            for (const std::size_t q : nbr) {
                if (q != p && frags.data()[q] != victim) ++shared[frags.data()[q]];
            }
        }
        Label target = victim;
        std::size_t best_shared = 0;
        for (Label id = 0; id < count_frags; ++id) {
            if (shared[id] > best_shared) {
                best_shared = shared[id];
                target = id;
            }
        }

        std::vector<Label> merged(frags.data());
        for (std::size_t p = 0; p < n; ++p) {
            if (merged[p] == victim) merged[p] = target;
        }
        frags = relabel_connected(LabelMap(rows, cols, std::move(merged)));
    }
    return frags;
}

}  // namespace fillin
