// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "purnet/backbone.hpp"

namespace purnet {

void EncoderConfig::validate() const {
    int previous = 1;
    for (int i = 0; i < kLevels; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (stage_channels[k] < 1) throw InvalidArgument("encoder stage_channels must be positive");
        if (stage_dilations[k] < 1) throw InvalidArgument("encoder stage_dilations must be >= 1");
        const int s = stage_strides[k];
        if (s < previous || s % previous != 0) {
            throw InvalidArgument("encoder stage_strides must be non-decreasing multiples of each other");
        }
        const int ratio = s / previous;
        if (i > 0 && ratio > 2) {
            throw InvalidArgument("encoder stage_strides may at most double between stages (decoder uses 2x upsampling)");
        }
        previous = s;
    }
    if (lateral_channels < 1) throw InvalidArgument("lateral_channels must be positive");
}

int EncoderConfig::relative_stride(int level) const {
    const auto k = static_cast<std::size_t>(level);
    return level == 0 ? stage_strides[0] : stage_strides[k] / stage_strides[k - 1];
}

EncoderConfig EncoderConfig::tiny() {
    EncoderConfig c;
    c.stage_channels = {8, 16, 16, 32, 32};
    c.lateral_channels = 16;
    return c;
}

Encoder::Encoder(const EncoderConfig& cfg, ParameterRegistry& reg, Rng& rng) : cfg_(cfg) {
    cfg_.validate();
    int in = 3;
    for (int i = 0; i < kLevels; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const std::string name = "encoder.stage" + std::to_string(i + 1);
        const int out = cfg_.stage_channels[k];
        const int dil = cfg_.stage_dilations[k];
        stages_[k].first = make_conv(reg, rng, name + ".conv_a", ParamGroup::Backbone, in, out, 3,
                                     cfg_.relative_stride(i), dil);
        stages_[k].second = make_conv(reg, rng, name + ".conv_b", ParamGroup::Backbone, out, out, 3, 1, dil);
        in = out;
    }
}

EncoderFeatures Encoder::encode(const ag::Var& image) const {
    const Shape s = image->value.shape();
    if (s.c != 3) throw DimensionError("encoder expects 3 input channels, got " + to_string(s));
    const int stride = cfg_.final_stride();
    if (s.h % stride != 0 || s.w % stride != 0 || s.h == 0 || s.w == 0) {
        throw DimensionError("input " + to_string(s) + " not divisible by encoder stride " + std::to_string(stride));
    }
    for (double v : image->value.values()) {
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("encoder input values must lie in [0, 1]");
    }
    EncoderFeatures out;
    ag::Var x = image;
    for (std::size_t k = 0; k < stages_.size(); ++k) {
        ag::Var a = ag::relu(stages_[k].first(x));
        x = ag::relu(ag::add(stages_[k].second(a), a));
        out.levels[k] = x;
    }
    return out;
}

LateralProjection::LateralProjection(const EncoderConfig& cfg, ParameterRegistry& reg, Rng& rng) {
    for (int i = 0; i < kLevels; ++i) {
        const auto k = static_cast<std::size_t>(i);
        convs_[k] = make_conv(reg, rng, "lateral" + std::to_string(i + 1), ParamGroup::Backbone,
                              cfg.stage_channels[k], cfg.lateral_channels, 1, 1, 1, kLinearGain);
    }
}

LateralFeatures LateralProjection::project(const EncoderFeatures& enc) const {
    LateralFeatures out;
    for (std::size_t k = 0; k < convs_.size(); ++k) out.levels[k] = convs_[k](enc.levels[k]);
    return out;
}

TopDownDecoder::TopDownDecoder(const EncoderConfig& cfg, ParameterRegistry& reg, Rng& rng, const std::string& prefix,
                               ParamGroup group) {
    const int c = cfg.lateral_channels;
    for (int i = 0; i < kLevels; ++i) {
        const auto k = static_cast<std::size_t>(i);
        convs_[k] = make_conv(reg, rng, prefix + ".decode" + std::to_string(i + 1), group, c, c, 3, 1, 1, kLinearGain);
        if (i + 1 < kLevels && cfg.relative_stride(i + 1) == 2) {
            upsamplers_[k] = make_deconv(reg, rng, prefix + ".up" + std::to_string(i + 2) + "to" + std::to_string(i + 1),
                                         group, c, c);
        }
    }
}

DecoderFeatures TopDownDecoder::decode(const LateralFeatures& laterals) const {
    return decode(laterals, [](int, const ag::Var& d) { return d; });
}

DecoderFeatures TopDownDecoder::decode(const LateralFeatures& laterals, const Refine& refine) const {
    DecoderFeatures out;
    out.levels[kLevels - 1] = convs_[kLevels - 1](laterals.levels[kLevels - 1]);
    ag::Var coarse = refine(kLevels - 1, out.levels[kLevels - 1]);
    for (int i = kLevels - 2; i >= 0; --i) {
        const auto k = static_cast<std::size_t>(i);
        ag::Var up = upsamplers_[k] ? (*upsamplers_[k])(coarse) : coarse;
        if (!(up->value.shape() == laterals.levels[k]->value.shape())) {
            throw ShapeError("decoder level " + std::to_string(i + 1) + ": upsampled " + to_string(up->value.shape()) +
                             " does not align with lateral " + to_string(laterals.levels[k]->value.shape()));
        }
        out.levels[k] = convs_[k](ag::add(laterals.levels[k], up));
        coarse = refine(i, out.levels[k]);
    }
    return out;
}

}  // namespace purnet
