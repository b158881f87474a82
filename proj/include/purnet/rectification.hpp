// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "purnet/backbone.hpp"

namespace purnet {

/// Outputs of the rectification branch at one decoder level. Feature maps and
/// the attention live at the level's resolution; the two predictions are
/// resampled to the input resolution.
struct RectificationBundle {
    ag::Var gross_feats;   // HxWx1
    ag::Var object_feats;  // HxWx1
    ag::Var error_feats;   // gross - object
    ag::Var attention;     // tanh(error_feats), in [-1, 1]
    ag::Var object_pred;   // saliency in [0, 1]
    ag::Var error_pred;    // signed error in [-1, 1]
};

/// Conv3x3(width) -> ReLU -> Conv3x3(width) -> ReLU -> Conv1x1(1).
struct FeatureBranch {
    Conv conv_a;
    Conv conv_b;
    Conv out;

    ag::Var operator()(const ag::Var& x) const;
};

FeatureBranch make_feature_branch(ParameterRegistry& reg, Rng& rng, const std::string& name, ParamGroup group,
                                  int in, int width);

class RectificationBranch {
public:
    RectificationBranch(ParameterRegistry& reg, Rng& rng, const std::string& name, int channels);

    RectificationBundle operator()(const ag::Var& features, int out_h, int out_w) const;

private:
    FeatureBranch gross_;
    FeatureBranch object_;
    Head classifier_;
    Head regressor_;
};

/// tanh(gross - object).
ag::Var rectification_attention(const ag::Var& gross, const ag::Var& object);

class RectificationSubnet {
public:
    RectificationSubnet(const EncoderConfig& cfg, ParameterRegistry& reg, Rng& rng);

    DecoderFeatures decode(const LateralFeatures& laterals) const { return decoder_.decode(laterals); }
    Levels<RectificationBundle> forward(const DecoderFeatures& dec, int out_h, int out_w) const;

private:
    TopDownDecoder decoder_;
    Levels<RectificationBranch> branches_;
};

/// G - object_pred, with the prediction taken as a constant.
Tensor error_target(const Tensor& mask, const Tensor& object_pred);

struct RectificationLosses {
    ag::Var object;  // sum of per-level BCE of the object predictions
    ag::Var error;   // sum of per-level KL between normalized error maps
};

RectificationLosses rectification_losses(const Levels<RectificationBundle>& bundles, const Tensor& mask);

}  // namespace purnet
