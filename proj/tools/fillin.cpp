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
// Command line front end: segment images into superpixels, compute survival
// signals, fuse feature maps, and run the synthetic small-object demo.
// Exit codes: 0 success, 2 input/format error, 3 shape/contract error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fillin/fillin.hpp"

namespace {

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// Upsamples a feature map to the fusion resolution; anything larger than the
// target is a wiring mistake, not something to silently shrink.
fillin::FeatureMap fit_feature(const fillin::FeatureMap& f, std::size_t rows, std::size_t cols,
                               const char* which) {
    if (f.rows() > rows || f.cols() > cols)
        throw fillin::ContractError(std::string(which) + " map is " + std::to_string(f.rows()) +
                                    "x" + std::to_string(f.cols()) +
                                    " but the fusion resolution is " + std::to_string(rows) +
                                    "x" + std::to_string(cols) + "; only upsampling is supported");
    return fillin::bilinear_upsample(f, rows, cols);
}

struct SegmentOptions {
    std::string image_path;
    std::string out_path;
    std::string ppm_path;
    fillin::SlicParams params;
};

void run_segment(const SegmentOptions& o) {
    const fillin::Image img = fillin::read_image_pnm(fillin::load_file(o.image_path));
    const fillin::LabelMap labels = fillin::slic_segment(img, o.params);
    fillin::save_file(o.out_path, fillin::write_label_map(labels));
    const std::string ppm_path = o.ppm_path.empty() ? o.out_path + ".ppm" : o.ppm_path;
    fillin::save_file(ppm_path, fillin::write_label_ppm(labels));
    std::cout << "segmented " << o.image_path << ": " << labels.rows() << "x" << labels.cols()
              << " into " << fillin::label_set(labels).size() << " superpixels\n";
}

struct SignalOptions {
    std::string labelmap_path;
    std::size_t as_stride = 16;
    bool reverse = false;
    std::string out_path;
};

void run_signal(const SignalOptions& o) {
    const fillin::LabelMap s = fillin::read_label_map(fillin::load_file(o.labelmap_path));
    fillin::AppearanceSignal signal = fillin::compute_signal(s, o.as_stride);
    if (o.reverse) signal = fillin::reverse_signal(signal);
    std::string out;
    for (const auto& [label, bit] : signal.bits())
        out += std::to_string(label) + " " + std::to_string(int(bit)) + "\n";
    if (o.out_path.empty())
        std::cout << out;
    else
        fillin::save_file(o.out_path, out);
}

struct FuseOptions {
    std::string superpixels_path;
    std::string low_path;
    std::string high_path;
    std::size_t fillin_scale = 4;
    std::size_t as_stride = 16;
    bool reverse = false;
    std::string out_path;
    std::string mask_out_path;
};

void run_fuse(const FuseOptions& o) {
    if (o.fillin_scale == 0) throw fillin::ArgumentError("--fillin-scale must be >= 1");
    const fillin::LabelMap s = fillin::read_label_map(fillin::load_file(o.superpixels_path));
    const fillin::FeatureMap low = fillin::read_feature_map(fillin::load_file(o.low_path));
    const fillin::FeatureMap high = fillin::read_feature_map(fillin::load_file(o.high_path));

    const std::size_t rows = (s.rows() + o.fillin_scale - 1) / o.fillin_scale;
    const std::size_t cols = (s.cols() + o.fillin_scale - 1) / o.fillin_scale;
    if (low.channels() != high.channels())
        throw fillin::ContractError("channel mismatch: low has " +
                                    std::to_string(low.channels()) + ", high has " +
                                    std::to_string(high.channels()));
    const fillin::FeatureMap low_fit = fit_feature(low, rows, cols, "low");
    const fillin::FeatureMap high_fit = fit_feature(high, rows, cols, "high");

    fillin::AppearanceSignal signal = fillin::compute_signal(s, o.as_stride);
    if (o.reverse) signal = fillin::reverse_signal(signal);
    const fillin::MaskPair masks = fillin::build_masks(s, o.fillin_scale, signal);
    const fillin::FusedPair fused = fillin::fillin_fuse(low_fit, high_fit, masks.high);

    fillin::save_file(o.out_path, fillin::write_feature_map(fused.fused));
    if (!o.mask_out_path.empty())
        fillin::save_file(o.mask_out_path, fillin::write_mask_pgm(fused.mask_high));
    std::cout << "fused " << rows << "x" << cols << "x" << fused.fused.channels()
              << " (high cells: " << fused.mask_high.ones() << "/" << fused.mask_high.size()
              << ")\n";
}

struct DemoCmdOptions {
    std::string spec_path;
    std::string canvas = "64x64";
    std::vector<std::string> objects;
    std::uint64_t seed = 0;
    std::size_t high_stride = 16;
    std::size_t as_stride = 16;
    std::string segmenter = "slic";
    std::string superpixel_map_path;
    fillin::SlicParams slic;
    std::string out_dir = "fillin-demo";
};

std::pair<std::size_t, std::size_t> parse_canvas(const std::string& text) {
    const std::size_t x = text.find('x');
    std::size_t rows = 0, cols = 0;
    try {
        if (x == std::string::npos || x == 0 || x + 1 >= text.size()) throw std::exception();
        rows = std::stoul(text.substr(0, x));
        cols = std::stoul(text.substr(x + 1));
    } catch (const std::exception&) {
        throw fillin::ArgumentError("bad --canvas \"" + text + "\", expected <rows>x<cols>");
    }
    return {rows, cols};
}

fillin::DemoObject parse_object_flag(const std::string& text) {
    const auto fail = [&]() -> void {
        throw fillin::ArgumentError("bad --object \"" + text +
                                    "\", expected shape:size:class[@row,col]");
    };
    fillin::DemoObject obj;
    const std::size_t c1 = text.find(':');
    const std::size_t c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
    if (c2 == std::string::npos) fail();
    const std::string shape = text.substr(0, c1);
    if (shape == "rect")
        obj.shape = fillin::DemoShape::Rect;
    else if (shape == "disk")
        obj.shape = fillin::DemoShape::Disk;
    else
        fail();
    std::string rest = text.substr(c2 + 1);
    std::string at;
    const std::size_t at_pos = rest.find('@');
    if (at_pos != std::string::npos) {
        at = rest.substr(at_pos + 1);
        rest = rest.substr(0, at_pos);
    }
    try {
        obj.size = std::stoul(text.substr(c1 + 1, c2 - c1 - 1));
        obj.class_id = static_cast<fillin::Label>(std::stoul(rest));
        if (!at.empty()) {
            const std::size_t comma = at.find(',');
            if (comma == std::string::npos) fail();
            obj.at = {std::stoul(at.substr(0, comma)), std::stoul(at.substr(comma + 1))};
        }
    } catch (const fillin::Error&) {
        throw;
    } catch (const std::exception&) {
        fail();
    }
    return obj;
}

fillin::DemoSpec spec_from_json(const std::string& bytes) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw fillin::ParseError(std::string("demo spec: not valid JSON: ") + e.what());
    }
    fillin::DemoSpec spec;
    try {
        if (j.contains("canvas")) {
            spec.rows = j.at("canvas").at(0).get<std::size_t>();
            spec.cols = j.at("canvas").at(1).get<std::size_t>();
        }
        spec.seed = j.value("seed", spec.seed);
        spec.high_stride = j.value("high_stride", spec.high_stride);
        for (const nlohmann::json& jo : j.value("objects", nlohmann::json::array())) {
            fillin::DemoObject obj;
            const std::string shape = jo.value("shape", "rect");
            if (shape == "rect")
                obj.shape = fillin::DemoShape::Rect;
            else if (shape == "disk")
                obj.shape = fillin::DemoShape::Disk;
            else
                throw fillin::ParseError("demo spec: unknown shape \"" + shape + "\"");
            obj.size = jo.value("size", std::size_t(1));
            obj.class_id = jo.at("class").get<fillin::Label>();
            if (jo.contains("at"))
                obj.at = {jo.at("at").at(0).get<std::size_t>(),
                          jo.at("at").at(1).get<std::size_t>()};
            spec.objects.push_back(obj);
        }
    } catch (const nlohmann::json::exception& e) {
        throw fillin::ParseError(std::string("demo spec: ") + e.what());
    }
    return spec;
}

void run_demo_cmd(const DemoCmdOptions& o) {
    fillin::DemoSpec spec;
    if (!o.spec_path.empty()) {
        spec = spec_from_json(fillin::load_file(o.spec_path));
    } else {
        const auto [rows, cols] = parse_canvas(o.canvas);
        spec.rows = rows;
        spec.cols = cols;
        spec.seed = o.seed;
        spec.high_stride = o.high_stride;
        for (const std::string& text : o.objects) spec.objects.push_back(parse_object_flag(text));
    }

    fillin::DemoOptions options;
    options.as_stride = o.as_stride;
    options.slic = o.slic;
    if (o.segmenter == "slic") {
        options.segmenter = fillin::DemoSegmenter::Slic;
    } else if (o.segmenter == "truth") {
        options.segmenter = fillin::DemoSegmenter::Truth;
    } else if (o.segmenter == "file") {
        options.segmenter = fillin::DemoSegmenter::File;
        if (o.superpixel_map_path.empty())
            throw fillin::ArgumentError("--segmenter file requires --superpixel-map");
        options.external_superpixels =
            fillin::read_label_map(fillin::load_file(o.superpixel_map_path));
    } else {
        throw fillin::ArgumentError("unknown --segmenter \"" + o.segmenter +
                                    "\", expected slic, truth, or file");
    }

    const fillin::DemoResult result = fillin::run_demo(spec, options);

    std::size_t survivors = 0;
    for (const auto& [label, bit] : result.signal.bits()) survivors += bit;
    std::string report = "demo canvas=" + std::to_string(spec.rows) + "x" +
                         std::to_string(spec.cols) + " objects=" +
                         std::to_string(spec.objects.size()) + " seed=" +
                         std::to_string(spec.seed) + " high_stride=" +
                         std::to_string(spec.high_stride) + " as_stride=" +
                         std::to_string(o.as_stride) + " segmenter=" + o.segmenter +
                         " superpixels=" + std::to_string(result.signal.size()) +
                         " survivors=" + std::to_string(survivors) + "\n";
    for (const fillin::DemoObjectReport& rep : result.objects) {
        const char* source = "MIXED";
        if (rep.mask_high_fraction == 0.0) source = "LOW";
        if (rep.mask_high_fraction == 1.0) source = "HIGH";
        report += "object index=" + std::to_string(rep.index) + " shape=" +
                  fillin::demo_shape_name(rep.shape) + " size=" + std::to_string(rep.size) +
                  " class=" + std::to_string(rep.class_id) + " at=" + std::to_string(rep.row) +
                  "," + std::to_string(rep.col) + " pixels=" + std::to_string(rep.pixels) +
                  " source=" + source + " mask_high=" + fmt6(rep.mask_high_fraction) +
                  " fused_recall=" + fmt6(rep.fused_recall) + " high_only_recall=" +
                  fmt6(rep.high_only_recall) + " low_only_recall=" + fmt6(rep.low_only_recall) +
                  "\n";
    }
    report += "background fused_recall=" + fmt6(result.background_fused_recall) + "\n";

    std::cout << report;
    if (!o.out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(o.out_dir, ec);
        if (ec)
            throw fillin::IoError("cannot create output directory " + o.out_dir + ": " +
                                  ec.message());
        const auto path = [&](const char* name) {
            return (std::filesystem::path(o.out_dir) / name).string();
        };
        fillin::save_file(path("rendered.ppm"), fillin::write_image_pnm(result.rendered));
        fillin::save_file(path("class_map.ppm"), fillin::write_label_ppm(result.class_map));
        fillin::save_file(path("superpixels.ppm"), fillin::write_label_ppm(result.superpixels));
        fillin::save_file(path("mask_high.pgm"), fillin::write_mask_pgm(result.mask_high));
        fillin::save_file(path("fused_decode.ppm"), fillin::write_label_ppm(result.fused_decode));
        fillin::save_file(path("high_decode.ppm"), fillin::write_label_ppm(result.high_decode));
        fillin::save_file(path("low_decode.ppm"), fillin::write_label_ppm(result.low_decode));
        fillin::save_file(path("report.txt"), report);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Superpixel-guided exclusive fusion of low/high level feature maps"};
    app.require_subcommand(1);

    SegmentOptions seg;
    CLI::App* segment = app.add_subcommand("segment", "Segment a PGM/PPM image into superpixels");
    segment->add_option("image", seg.image_path, "Input image (binary PGM or PPM)")->required();
    segment->add_option("-k,--superpixels", seg.params.target_superpixels,
                        "Target superpixel count")->capture_default_str();
    segment->add_option("--compactness", seg.params.compactness,
                        "Spatial vs color weight")->capture_default_str();
    segment->add_option("--iterations", seg.params.iterations, "Refinement iterations")->capture_default_str();
    segment->add_option("-o,--out", seg.out_path, "Output label map (text)")->required();
    segment->add_option("--ppm-out", seg.ppm_path,
                        "Palette visualization path (default: <out>.ppm)");
    segment->callback([&] { run_segment(seg); });

    SignalOptions sig;
    CLI::App* signal =
        app.add_subcommand("signal", "Compute the per-superpixel survival signal");
    signal->add_option("labelmap", sig.labelmap_path, "Superpixel label map (text)")->required();
    signal->add_option("-p,--as-stride", sig.as_stride, "Signal sampling stride")->capture_default_str();
    signal->add_flag("--reverse", sig.reverse, "Complement every bit");
    signal->add_option("-o,--out", sig.out_path, "Write to file instead of stdout");
    signal->callback([&] { run_signal(sig); });

    FuseOptions fus;
    CLI::App* fuse = app.add_subcommand("fuse", "Fuse low/high feature maps over superpixels");
    fuse->add_option("-s,--superpixels", fus.superpixels_path,
                     "Full-resolution superpixel label map (text)")
        ->required();
    fuse->add_option("--low", fus.low_path, "Low level feature map (FMAP)")->required();
    fuse->add_option("--high", fus.high_path, "High level feature map (FMAP)")->required();
    fuse->add_option("-t,--fillin-scale", fus.fillin_scale,
                     "Mask resolution divisor relative to the label map")->capture_default_str();
    fuse->add_option("-p,--as-stride", fus.as_stride, "Signal sampling stride")->capture_default_str();
    fuse->add_flag("--reverse", fus.reverse, "Fuse with the complemented signal");
    fuse->add_option("-o,--out", fus.out_path, "Fused feature map output (FMAP)")->required();
    fuse->add_option("--mask-out", fus.mask_out_path, "Also write the H mask as PGM");
    fuse->callback([&] { run_fuse(fus); });

    DemoCmdOptions dem;
    CLI::App* demo = app.add_subcommand("demo", "Synthetic small-object recovery demo");
    demo->add_option("--spec", dem.spec_path, "JSON demo spec (overrides the flags below)");
    demo->add_option("--canvas", dem.canvas, "Canvas size <rows>x<cols>")->capture_default_str();
    demo->add_option("--object", dem.objects,
                     "Planted object shape:size:class[@row,col]; repeatable");
    demo->add_option("--seed", dem.seed, "Placement seed")->capture_default_str();
    demo->add_option("--high-stride", dem.high_stride,
                     "Simulated encoder downsample stride")->capture_default_str();
    demo->add_option("-p,--as-stride", dem.as_stride, "Signal sampling stride")->capture_default_str();
    demo->add_option("--segmenter", dem.segmenter, "slic, truth, or file")->capture_default_str();
    demo->add_option("--superpixel-map", dem.superpixel_map_path,
                     "Label map for --segmenter file");
    demo->add_option("-k,--superpixels", dem.slic.target_superpixels,
                     "SLIC target superpixel count")->capture_default_str();
    demo->add_option("--compactness", dem.slic.compactness, "SLIC spatial vs color weight")->capture_default_str();
    demo->add_option("--iterations", dem.slic.iterations, "SLIC refinement iterations")->capture_default_str();
    demo->add_option("--out-dir", dem.out_dir,
                     "Directory for report.txt and visualization images; empty disables")->capture_default_str();
    demo->callback([&] { run_demo_cmd(dem); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const fillin::ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const fillin::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
