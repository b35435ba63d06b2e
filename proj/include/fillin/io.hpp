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

#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fillin/core.hpp"
#include "fillin/superpixel.hpp"

namespace fillin {

namespace detail {

inline void append_u32_le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline std::uint32_t read_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

/// Parses the label map text format: a `<rows> <cols>` header line, then
/// rows lines of cols space-separated non-negative decimal labels. Labels
/// are taken verbatim, never renumbered. Errors carry the 0-based (row, col)
/// grid position of the offending token.
inline LabelMap read_label_map(const std::string& bytes) {
    std::istringstream in(bytes);
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("label map: empty input, expected a '<rows> <cols>' header");

    const auto parse_dim = [&](std::string_view token, const char* name) {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc() || ptr != token.data() + token.size())
            throw ParseError("label map: malformed header, bad " + std::string(name) +
                             " token \"" + std::string(token) + "\"");
        return v;
    };
    std::istringstream header(line);
    std::string tok_rows, tok_cols, extra;
    if (!(header >> tok_rows >> tok_cols) || (header >> extra))
        throw ParseError("label map: malformed header \"" + line +
                         "\", expected '<rows> <cols>'");
    const std::uint64_t rows = parse_dim(tok_rows, "rows");
    const std::uint64_t cols = parse_dim(tok_cols, "cols");
    if (rows == 0 || cols == 0)
        throw ParseError("label map: dimensions must be >= 1, got " + std::to_string(rows) +
                         "x" + std::to_string(cols));
    if (cols > detail::max_cells || rows > detail::max_cells / cols)
        throw ParseError("label map: dimension overflow, " + std::to_string(rows) + "x" +
                         std::to_string(cols) + " exceeds " +
                         std::to_string(detail::max_cells) + " cells");

    std::vector<Label> data;
    data.reserve(static_cast<std::size_t>(rows * cols));
    for (std::uint64_t r = 0; r < rows; ++r) {
        if (!std::getline(in, line))
            throw ParseError("label map: expected " + std::to_string(rows) +
                             " label rows, found " + std::to_string(r));
        std::uint64_t c = 0;
        std::size_t at = 0;
        while (at < line.size()) {
            while (at < line.size() && line[at] == ' ') ++at;
            if (at == line.size()) break;
            std::size_t end = at;
            while (end < line.size() && line[end] != ' ') ++end;
            const std::string_view token(line.data() + at, end - at);
            const std::string pos =
                " at (" + std::to_string(r) + "," + std::to_string(c) + ")";
            if (c >= cols)
                throw ParseError("label map: row " + std::to_string(r) + " has more than " +
                                 std::to_string(cols) + " labels");
            if (token.front() == '-')
                throw ParseError("label map: negative label " + std::string(token) + pos);
            std::uint64_t v = 0;
            const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
            if (ec == std::errc::result_out_of_range || v > std::numeric_limits<Label>::max())
                throw ParseError("label map: label " + std::string(token) + " out of range" +
                                 pos);
            if (ec != std::errc() || ptr != token.data() + token.size())
                throw ParseError("label map: non-integer token \"" + std::string(token) + "\"" +
                                 pos);
            data.push_back(static_cast<Label>(v));
            ++c;
            at = end;
        }
        if (c < cols)
            throw ParseError("label map: row " + std::to_string(r) + " has " +
                             std::to_string(c) + " labels, expected " + std::to_string(cols));
    }
    while (std::getline(in, line)) {
        if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos)
            throw ParseError("label map: unexpected content after row " +
                             std::to_string(rows - 1) + ": \"" + line + "\"");
    }
    return LabelMap(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols),
                    std::move(data));
}

inline std::string write_label_map(const LabelMap& m) {
    std::string out = std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) out.push_back(' ');
            out += std::to_string(m(r, c));
        }
        out.push_back('\n');
    }
    return out;
}

/// Parses the binary feature map format: magic `FMAP`, rows/cols/channels as
/// unsigned 32-bit little-endian, then the samples as IEEE-754 binary32
/// little-endian in row-major, channel-last order. Bit-exact round trip with
/// write_feature_map.
inline FeatureMap read_feature_map(const std::string& bytes) {
    if (bytes.size() < 4 || bytes.compare(0, 4, "FMAP") != 0)
        throw ParseError("feature map: bad magic, expected 'FMAP'");
    if (bytes.size() < 16)
        throw ParseError("feature map: truncated header, have " +
                         std::to_string(bytes.size()) + " bytes, expected at least 16");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint32_t rows = detail::read_u32_le(p + 4);
    const std::uint32_t cols = detail::read_u32_le(p + 8);
    const std::uint32_t channels = detail::read_u32_le(p + 12);
    if (rows == 0 || cols == 0 || channels == 0)
        throw ParseError("feature map: dimensions must be >= 1, got " + std::to_string(rows) +
                         "x" + std::to_string(cols) + "x" + std::to_string(channels));
    const std::uint64_t cells =
        static_cast<std::uint64_t>(rows) * cols * channels;
    if (static_cast<std::uint64_t>(rows) * cols > detail::max_cells ||
        cells > detail::max_cells)
        throw ParseError("feature map: dimension overflow, " + std::to_string(rows) + "x" +
                         std::to_string(cols) + "x" + std::to_string(channels) + " exceeds " +
                         std::to_string(detail::max_cells) + " cells");
    const std::uint64_t want = 16 + cells * 4;
    if (bytes.size() < want)
        throw ParseError("feature map: truncated payload, have " +
                         std::to_string(bytes.size()) + " bytes, expected " +
                         std::to_string(want));
    if (bytes.size() > want)
        throw ParseError("feature map: " + std::to_string(bytes.size() - want) +
                         " trailing bytes after the payload");

    std::vector<float> data(static_cast<std::size_t>(cells));
    for (std::size_t i = 0; i < data.size(); ++i) {
        const float v = std::bit_cast<float>(detail::read_u32_le(p + 16 + i * 4));
        if (!std::isfinite(v))
            throw ParseError("feature map: non-finite value at flat index " +
                             std::to_string(i));
        data[i] = v;
    }
    return FeatureMap(rows, cols, channels, std::move(data));
}

inline std::string write_feature_map(const FeatureMap& f) {
    std::string out;
    out.reserve(16 + f.size() * 4);
    out += "FMAP";
    detail::append_u32_le(out, static_cast<std::uint32_t>(f.rows()));
    detail::append_u32_le(out, static_cast<std::uint32_t>(f.cols()));
    detail::append_u32_le(out, static_cast<std::uint32_t>(f.channels()));
    for (const float v : f.data()) detail::append_u32_le(out, std::bit_cast<std::uint32_t>(v));
    return out;
}

namespace detail {

// Reads one netpbm header token, skipping whitespace and '#' comments.
inline std::string pnm_token(const std::string& bytes, std::size_t& at) {
    while (at < bytes.size()) {
        const char ch = bytes[at];
        if (ch == '#') {
            while (at < bytes.size() && bytes[at] != '\n') ++at;
        } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
            ++at;
        } else {
            break;
        }
    }
    const std::size_t start = at;
    while (at < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[at]))) ++at;
    if (start == at) throw ParseError("image: truncated netpbm header");
    return bytes.substr(start, at - start);
}

inline std::uint64_t pnm_number(const std::string& bytes, std::size_t& at, const char* name) {
    const std::string token = pnm_token(bytes, at);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw ParseError("image: bad " + std::string(name) + " token \"" + token + "\"");
    return v;
}

}  // namespace detail

/// Decodes an 8-bit binary PGM (`P5`, 1 channel) or PPM (`P6`, 3 channels)
/// with maxval 255; intensities map to [0,1] by division by 255.
inline Image read_image_pnm(const std::string& bytes) {
    std::size_t at = 0;
    const std::string magic = detail::pnm_token(bytes, at);
    std::size_t channels = 0;
    if (magic == "P5")
        channels = 1;
    else if (magic == "P6")
        channels = 3;
    else
        throw ParseError("image: unsupported netpbm magic \"" + magic +
                         "\", expected P5 or P6");
    const std::uint64_t cols = detail::pnm_number(bytes, at, "width");
    const std::uint64_t rows = detail::pnm_number(bytes, at, "height");
    const std::uint64_t maxval = detail::pnm_number(bytes, at, "maxval");
    if (rows == 0 || cols == 0)
        throw ParseError("image: dimensions must be >= 1, got " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    if (maxval != 255)
        throw ParseError("image: unsupported maxval " + std::to_string(maxval) +
                         ", expected 255");
    if (at >= bytes.size()) throw ParseError("image: truncated netpbm header");
    ++at;  // single whitespace byte separates the header from the raster
    if (cols > detail::max_cells || rows > detail::max_cells / cols ||
        rows * cols > detail::max_cells / channels)
        throw ParseError("image: dimension overflow, " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    const std::uint64_t want = rows * cols * channels;
    if (bytes.size() - at < want)
        throw ParseError("image: truncated raster, have " + std::to_string(bytes.size() - at) +
                         " bytes, expected " + std::to_string(want));
    if (bytes.size() - at > want)
        throw ParseError("image: " + std::to_string(bytes.size() - at - want) +
                         " trailing bytes after the raster");

    std::vector<float> data(static_cast<std::size_t>(want));
    for (std::size_t i = 0; i < data.size(); ++i)
        data[i] = static_cast<float>(static_cast<unsigned char>(bytes[at + i])) / 255.0f;
    return Image(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), channels,
                 std::move(data));
}

/// Encodes as binary PGM (1 channel) or PPM (3 channels), maxval 255,
/// rounding each intensity to the nearest of the 256 levels.
inline std::string write_image_pnm(const Image& img) {
    std::string out = img.channels() == 1 ? "P5" : "P6";
    out += "\n" + std::to_string(img.cols()) + " " + std::to_string(img.rows()) + "\n255\n";
    out.reserve(out.size() + img.size());
    for (const float v : img.data())
        out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0f))));
    return out;
}

/// Mask visualization: binary PGM with 0 ↦ 0 and 1 ↦ 255.
inline std::string write_mask_pgm(const BinaryMask& m) {
    std::string out =
        "P5\n" + std::to_string(m.cols()) + " " + std::to_string(m.rows()) + "\n255\n";
    out.reserve(out.size() + m.size());
    for (const std::uint8_t b : m.data()) out.push_back(b ? static_cast<char>(255) : '\0');
    return out;
}

/// Deterministic palette color for a label id: hue walks the circle by the
/// golden ratio per id, at fixed saturation and value, so nearby ids get
/// well-separated colors.
inline std::array<std::uint8_t, 3> label_color(Label id) {
    const double golden = 0.6180339887498949;
    const double h = std::fmod(static_cast<double>(id) * golden, 1.0) * 6.0;
    const double s = 0.62;
    const double v = 0.95;
    const int sector = static_cast<int>(h) % 6;
    const double f = h - std::floor(h);
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    double rgb[3] = {0, 0, 0};
    switch (sector) {
        case 0: rgb[0] = v; rgb[1] = t; rgb[2] = p; break;
        case 1: rgb[0] = q; rgb[1] = v; rgb[2] = p; break;
        case 2: rgb[0] = p; rgb[1] = v; rgb[2] = t; break;
        case 3: rgb[0] = p; rgb[1] = q; rgb[2] = v; break;
        case 4: rgb[0] = t; rgb[1] = p; rgb[2] = v; break;
        default: rgb[0] = v; rgb[1] = p; rgb[2] = q; break;
    }
    return {static_cast<std::uint8_t>(std::lround(rgb[0] * 255.0)),
            static_cast<std::uint8_t>(std::lround(rgb[1] * 255.0)),
            static_cast<std::uint8_t>(std::lround(rgb[2] * 255.0))};
}

/// Color-coded label map visualization as binary PPM.
inline std::string write_label_ppm(const LabelMap& m) {
    std::string out =
        "P6\n" + std::to_string(m.cols()) + " " + std::to_string(m.rows()) + "\n255\n";
    out.reserve(out.size() + m.size() * 3);
    for (const Label id : m.data()) {
        const std::array<std::uint8_t, 3> rgb = label_color(id);
        out.push_back(static_cast<char>(rgb[0]));
        out.push_back(static_cast<char>(rgb[1]));
        out.push_back(static_cast<char>(rgb[2]));
    }
    return out;
}

inline std::string load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failure on file: " + path);
    return std::move(buf).str();
}

inline void save_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failure on file: " + path);
}

}  // namespace fillin
