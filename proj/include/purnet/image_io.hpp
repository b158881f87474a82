// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "purnet/data.hpp"
#include "purnet/metrics.hpp"

namespace purnet::io {

/// RGB image scaled to [0, 1], HxWx3.
Tensor read_rgb(const std::filesystem::path& path);
/// 8-bit grayscale levels as doubles in [0, 255], HxWx1.
Tensor read_gray(const std::filesystem::path& path);
/// Grayscale map in [0, 1] divided by 255, HxWx1.
Tensor read_map(const std::filesystem::path& path);

/// round(255 v), clamped, written as an 8-bit grayscale PNG.
void write_map(const std::filesystem::path& path, const Tensor& map);
void write_rgb(const std::filesystem::path& path, const Tensor& rgb);

/// Files with one of the given (lower-case, dotted) extensions, sorted by stem.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir,
                                               const std::vector<std::string>& extensions);

/// root/images/*.{png,jpg,jpeg} paired with root/masks/<stem>.png, in
/// lexicographic stem order. Masks are binarized from 128 up.
std::vector<Sample> load_dataset(const std::filesystem::path& root);

/// Writes images/<id>.png and masks/<id>.png under root.
void write_dataset(const std::filesystem::path& root, const std::vector<Sample>& samples);

struct PairedMaps {
    std::vector<std::string> ids;
    std::vector<Tensor> predictions;
    std::vector<Tensor> masks;
};

/// Pairs <pred_dir>/<stem>.png with <gt_dir>/<stem>.png. Any file without a
/// partner (in either direction) is an error naming it.
PairedMaps load_prediction_pairs(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir);

struct CurveSeries {
    std::string label;
    metrics::FMeasureCurve curve;
};

/// Reads a table written by metrics::curve_csv.
metrics::FMeasureCurve read_curve_csv(const std::filesystem::path& path);

/// F-measure against threshold, one line per series, drawn to a PNG.
void plot_curves(const std::filesystem::path& out, const std::vector<CurveSeries>& series, int width = 800,
                 int height = 600);

}  // namespace purnet::io
