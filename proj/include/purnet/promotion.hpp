// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "purnet/backbone.hpp"

namespace purnet {

/// Promotion attention of a feature map: a per-channel spatial softmax times
/// the channel softmax of the globally pooled features. Strictly positive,
/// total mass 1 over all H x W x C elements.
ag::Var promotion_attention(const ag::Var& features);

/// features * attention + features.
ag::Var apply_promotion(const ag::Var& features, const ag::Var& attention);

struct PromotionOutputs {
    Levels<ag::Var> attention;
    Levels<ag::Var> sides;  // HxWx1 saliency in [0, 1] at input resolution
};

class PromotionSubnet {
public:
    PromotionSubnet(const EncoderConfig& cfg, ParameterRegistry& reg, Rng& rng);

    DecoderFeatures decode(const LateralFeatures& laterals) const { return decoder_.decode(laterals); }
    /// Attention and deeply supervised side output for every level.
    PromotionOutputs forward(const DecoderFeatures& dec, int out_h, int out_w) const;

private:
    TopDownDecoder decoder_;
    Levels<Head> classifiers_;
};

/// Sum of per-level pixel-summed BCE against the ground-truth mask.
ag::Var promotion_loss(const Levels<ag::Var>& sides, const Tensor& mask);

}  // namespace purnet
