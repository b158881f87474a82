// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <map>

#include "purnet/image_io.hpp"

namespace purnet::io {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

void require_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw InvalidArgument("missing directory " + dir.string());
}

std::map<std::string, std::filesystem::path> by_stem(const std::filesystem::path& dir,
                                                     const std::vector<std::string>& extensions) {
    std::map<std::string, std::filesystem::path> out;
    for (const auto& p : list_images(dir, extensions)) {
        const std::string stem = p.stem().string();
        if (!out.emplace(stem, p).second) {
            throw InvalidArgument("duplicate stem " + stem + " in " + dir.string());
        }
    }
    return out;
}

const std::vector<std::string> kImageExtensions{".png", ".jpg", ".jpeg"};
const std::vector<std::string> kMaskExtensions{".png"};

}  // namespace

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir,
                                               const std::vector<std::string>& extensions) {
    require_dir(dir);
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const std::string ext = lower(e.path().extension().string());
        if (std::find(extensions.begin(), extensions.end(), ext) != extensions.end()) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.stem().string() < b.stem().string() || (a.stem() == b.stem() && a < b);
    });
    return out;
}

std::vector<Sample> load_dataset(const std::filesystem::path& root) {
    const auto images = by_stem(root / "images", kImageExtensions);
    const auto masks = by_stem(root / "masks", kMaskExtensions);
    for (const auto& [stem, path] : masks) {
        if (!images.count(stem)) throw InvalidArgument("mask without image: " + stem);
    }
    std::vector<Sample> out;
    for (const auto& [stem, path] : images) {
        auto m = masks.find(stem);
        if (m == masks.end()) throw InvalidArgument("image without mask: " + stem);
        Sample s;
        s.id = stem;
        s.image = read_rgb(path);
        s.mask = binarize_mask(read_gray(m->second));
        validate_sample(s);
        out.push_back(std::move(s));
    }
    if (out.empty()) throw InvalidArgument("dataset " + root.string() + " contains no images");
    return out;
}

void write_dataset(const std::filesystem::path& root, const std::vector<Sample>& samples) {
    for (const Sample& s : samples) {
        validate_sample(s);
        write_rgb(root / "images" / (s.id + ".png"), s.image);
        write_map(root / "masks" / (s.id + ".png"), s.mask);
    }
}

PairedMaps load_prediction_pairs(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir) {
    const auto preds = by_stem(pred_dir, kMaskExtensions);
    const auto gts = by_stem(gt_dir, kMaskExtensions);
    for (const auto& [stem, path] : gts) {
        if (!preds.count(stem)) throw InvalidArgument("ground truth without prediction: " + stem);
    }
    PairedMaps out;
    for (const auto& [stem, path] : preds) {
        auto g = gts.find(stem);
        if (g == gts.end()) throw InvalidArgument("prediction without ground truth: " + stem);
        Tensor p = read_map(path);
        Tensor m = binarize_mask(read_gray(g->second));
        if (!(p.shape() == m.shape())) {
            throw ShapeError(stem + ": prediction " + to_string(p.shape()) + " and mask " + to_string(m.shape()) +
                             " differ in size");
        }
        out.ids.push_back(stem);
        out.predictions.push_back(std::move(p));
        out.masks.push_back(std::move(m));
    }
    if (out.ids.empty()) throw InvalidArgument("no prediction maps in " + pred_dir.string());
    return out;
}

}  // namespace purnet::io
