// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "purnet/data.hpp"

#include <algorithm>
#include <numeric>

namespace purnet {

Tensor binarize_mask(const Tensor& gray) {
    if (gray.channels() != 1) throw ShapeError("mask must be single-channel, got " + to_string(gray.shape()));
    Tensor m(gray.shape());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = gray[i] >= 128.0 ? 1.0 : 0.0;
    return m;
}

void validate_sample(const Sample& s) {
    if (s.image.channels() != 3) throw ShapeError(s.id + ": image must have 3 channels");
    if (!s.image.shape().same_spatial(s.mask.shape()) || s.mask.channels() != 1) {
        throw ShapeError(s.id + ": image " + to_string(s.image.shape()) + " and mask " + to_string(s.mask.shape()) +
                         " differ in size");
    }
}

Sample resize_sample(const Sample& s, int size) {
    validate_sample(s);
    if (size < 1) throw InvalidArgument("resize target must be positive");
    Sample out;
    out.id = s.id;
    if (s.image.height() == size && s.image.width() == size) {
        out.image = s.image;
        out.mask = s.mask;
        out.segmentation = s.segmentation;
        return out;
    }
    out.image = resize_bilinear(s.image, size, size);
    for (double& v : out.image.values()) v = std::clamp(v, 0.0, 1.0);
    out.mask = resize_nearest(s.mask, size, size);
    return out;
}

Sample augment(const Sample& s, Rng& rng) {
    const bool flip = (rng() >> 63) != 0;
    if (!flip) return s;
    Sample out;
    out.id = s.id;
    out.image = flip_horizontal(s.image);
    out.mask = flip_horizontal(s.mask);
    if (s.segmentation) out.segmentation = flip_horizontal(*s.segmentation);
    return out;
}

Sample preprocess(const Sample& s, int size, bool train, Rng& rng) {
    Sample r = resize_sample(s, size);
    return train ? augment(r, rng) : r;
}

BatchSampler::BatchSampler(std::size_t dataset_size, std::size_t batch_size, std::uint64_t seed)
    : batch_size_(batch_size), rng_(seed), order_(dataset_size) {
    if (dataset_size == 0) throw InvalidArgument("BatchSampler needs a nonempty dataset");
    if (batch_size == 0) throw InvalidArgument("batch size must be positive");
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    reshuffle();
}

void BatchSampler::reshuffle() {
    std::sort(order_.begin(), order_.end());
    std::shuffle(order_.begin(), order_.end(), rng_);
    cursor_ = 0;
}

std::vector<std::size_t> BatchSampler::next() {
    if (cursor_ >= order_.size()) {
        ++epoch_;
        reshuffle();
    }
    const std::size_t end = std::min(order_.size(), cursor_ + batch_size_);
    std::vector<std::size_t> batch(order_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                                   order_.begin() + static_cast<std::ptrdiff_t>(end));
    cursor_ = end;
    return batch;
}

}  // namespace purnet
