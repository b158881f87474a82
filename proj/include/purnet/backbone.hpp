// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "purnet/layers.hpp"

namespace purnet {

inline constexpr int kLevels = 5;

template <typename T>
using Levels = std::array<T, kLevels>;

/// Layout of the five-stage encoder. Strides are cumulative output strides
/// relative to the input image.
struct EncoderConfig {
    Levels<int> stage_channels{64, 128, 256, 512, 512};
    Levels<int> stage_strides{2, 4, 8, 16, 16};
    Levels<int> stage_dilations{1, 1, 1, 2, 4};
    int lateral_channels = 128;

    /// Throws InvalidArgument on any violated invariant.
    void validate() const;
    int final_stride() const { return stage_strides[kLevels - 1]; }
    /// Stride of stage i relative to stage i - 1 (the input for i == 0).
    int relative_stride(int level) const;

    /// Small layout used for desk-scale experiments and tests.
    static EncoderConfig tiny();
    friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

/// Encoder outputs E1..E5, finest first.
struct EncoderFeatures {
    Levels<ag::Var> levels;
};

/// Lateral projections of E1..E5, each with lateral_channels channels.
struct LateralFeatures {
    Levels<ag::Var> levels;
};

/// Decoded features D1..D5 of one subnetwork.
struct DecoderFeatures {
    Levels<ag::Var> levels;
};

/// Plain residual encoder: each stage is Conv3x3(stride, dilation) -> ReLU ->
/// Conv3x3(dilation) -> +skip -> ReLU.
class Encoder {
public:
    Encoder(const EncoderConfig& cfg, ParameterRegistry& reg, Rng& rng);

    /// image: HxWx3 with values in [0, 1]; H and W divisible by the final stride.
    EncoderFeatures encode(const ag::Var& image) const;
    const EncoderConfig& config() const noexcept { return cfg_; }

private:
    struct Stage {
        Conv first;
        Conv second;
    };
    EncoderConfig cfg_;
    Levels<Stage> stages_;
};

class LateralProjection {
public:
    LateralProjection(const EncoderConfig& cfg, ParameterRegistry& reg, Rng& rng);

    LateralFeatures project(const EncoderFeatures& enc) const;
    Conv& level(int i) { return convs_[static_cast<std::size_t>(i)]; }

private:
    Levels<Conv> convs_;
};

/// Top-down pathway: D5 = Conv3x3(L5), D_i = Conv3x3(L_i + Up(D_{i+1})), where
/// Up is a learnable 2x deconvolution when the two levels differ in resolution
/// and the identity when they match. Each subnetwork owns one instance.
class TopDownDecoder {
public:
    TopDownDecoder(const EncoderConfig& cfg, ParameterRegistry& reg, Rng& rng, const std::string& prefix,
                   ParamGroup group);

    DecoderFeatures decode(const LateralFeatures& laterals) const;

    /// Called on each decoded level D_i (coarsest first); its result, rather
    /// than D_i, is what the pathway carries to the next finer level.
    using Refine = std::function<ag::Var(int level, const ag::Var& decoded)>;
    DecoderFeatures decode(const LateralFeatures& laterals, const Refine& refine) const;

private:
    Levels<Conv> convs_;
    std::array<std::optional<Deconv>, kLevels - 1> upsamplers_;
};

}  // namespace purnet
