// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "purnet/autograd.hpp"

namespace purnet {

/// Region labeling of an image. Labels are dense in [0, region_count) and the
/// pixels of every label form one 4-connected component.
struct SuperpixelSegmentation {
    int height = 0;
    int width = 0;
    int region_count = 0;
    std::vector<int> labels;  // row-major

    int at(int y, int x) const { return labels[static_cast<std::size_t>(y) * width + x]; }
    std::vector<int> region_sizes() const;

    friend bool operator==(const SuperpixelSegmentation&, const SuperpixelSegmentation&) = default;
};

struct SlicParams {
    int n_regions = 256;
    double compactness = 10.0;
    int iterations = 10;
};

struct SlicTrace {
    /// Clustering objective after every assignment step.
    std::vector<double> objective;
};

/// SLIC over-segmentation in CIELAB space, grid seeded, with a final
/// connectivity pass that merges orphaned fragments into their largest
/// neighbouring region. image: HxWx3 RGB in [0, 1].
SuperpixelSegmentation slic(const Tensor& image, const SlicParams& params = {}, SlicTrace* trace = nullptr);

/// sRGB (D65) to CIELAB, per pixel.
Tensor rgb_to_lab(const Tensor& rgb);

SuperpixelSegmentation flip_horizontal(const SuperpixelSegmentation& seg);

/// True if every label's pixels form a single 4-connected component.
bool regions_connected(const SuperpixelSegmentation& seg);

/// Mean of `map` (HxWx1) over each region, as a region_count x 1 x 1 tensor.
Tensor region_means(const Tensor& map, const SuperpixelSegmentation& seg);
ag::Var region_means(const ag::Var& map, const SuperpixelSegmentation& seg);

/// On-disk cache of segmentations keyed by image content and SLIC parameters.
/// Entries are zlib-compressed int32 label grids.
class SegmentationCache {
public:
    explicit SegmentationCache(std::filesystem::path dir);

    std::optional<SuperpixelSegmentation> load(const Tensor& image, const SlicParams& params) const;
    void store(const Tensor& image, const SlicParams& params, const SuperpixelSegmentation& seg) const;
    /// load() or compute-and-store.
    SuperpixelSegmentation get(const Tensor& image, const SlicParams& params) const;
    std::filesystem::path entry_path(const Tensor& image, const SlicParams& params) const;

private:
    std::filesystem::path dir_;
};

}  // namespace purnet
