// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "purnet/layers.hpp"
#include "purnet/superpixel.hpp"

namespace purnet {

struct Sample {
    std::string id;
    Tensor image;  // HxWx3 in [0, 1]
    Tensor mask;   // HxWx1 in {0, 1}
    std::optional<SuperpixelSegmentation> segmentation;
};

/// 8-bit gray levels (0..255) to {0, 1}, foreground from 128 up.
Tensor binarize_mask(const Tensor& gray);

/// Throws ShapeError naming the sample if image and mask disagree in size.
void validate_sample(const Sample& s);

/// Bilinear image resize and nearest mask resize to size x size. A cached
/// segmentation is dropped unless it already matches the target size.
Sample resize_sample(const Sample& s, int size);

/// Mirrors image, mask and segmentation together with probability 0.5.
Sample augment(const Sample& s, Rng& rng);

/// resize_sample, then augment in training mode.
Sample preprocess(const Sample& s, int size, bool train, Rng& rng);

/// Index batches over a dataset: a fresh seeded shuffle every epoch, with the
/// final short batch kept.
class BatchSampler {
public:
    BatchSampler(std::size_t dataset_size, std::size_t batch_size, std::uint64_t seed);

    std::vector<std::size_t> next();
    std::size_t epoch() const noexcept { return epoch_; }

private:
    void reshuffle();

    std::size_t batch_size_;
    Rng rng_;
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
    std::size_t epoch_ = 0;
};

}  // namespace purnet
