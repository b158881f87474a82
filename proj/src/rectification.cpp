// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "purnet/rectification.hpp"

#include "purnet/losses.hpp"

namespace purnet {

ag::Var FeatureBranch::operator()(const ag::Var& x) const { return out(ag::relu(conv_b(ag::relu(conv_a(x))))); }

FeatureBranch make_feature_branch(ParameterRegistry& reg, Rng& rng, const std::string& name, ParamGroup group,
                                  int in, int width) {
    FeatureBranch b;
    b.conv_a = make_conv(reg, rng, name + ".conv_a", group, in, width, 3);
    b.conv_b = make_conv(reg, rng, name + ".conv_b", group, width, width, 3);
    b.out = make_conv(reg, rng, name + ".out", group, width, 1, 1, 1, 1, kLinearGain);
    return b;
}

ag::Var rectification_attention(const ag::Var& gross, const ag::Var& object) {
    return ag::tanh(ag::sub(gross, object));
}

RectificationBranch::RectificationBranch(ParameterRegistry& reg, Rng& rng, const std::string& name, int channels)
    : gross_(make_feature_branch(reg, rng, name + ".gross", ParamGroup::Rectification, channels, channels)),
      object_(make_feature_branch(reg, rng, name + ".object", ParamGroup::Rectification, channels, channels)),
      classifier_(make_head(reg, rng, name + ".classifier", ParamGroup::Rectification, 1, channels)),
      regressor_(make_head(reg, rng, name + ".regressor", ParamGroup::Rectification, 1, channels)) {}

RectificationBundle RectificationBranch::operator()(const ag::Var& features, int out_h, int out_w) const {
    RectificationBundle b;
    b.gross_feats = gross_(features);
    b.object_feats = object_(features);
    b.error_feats = ag::sub(b.gross_feats, b.object_feats);
    b.attention = ag::tanh(b.error_feats);
    ag::Var weighted = ag::add(ag::mul(b.object_feats, b.attention), b.object_feats);
    b.object_pred = saliency_output(classifier_, weighted, out_h, out_w);
    b.error_pred = ag::upsample_bilinear(ag::tanh(regressor_.logits(b.error_feats)), out_h, out_w);
    return b;
}

namespace {

Levels<RectificationBranch> make_branches(const EncoderConfig& cfg, ParameterRegistry& reg, Rng& rng) {
    auto make = [&](int i) {
        return RectificationBranch(reg, rng, "rectification.branch" + std::to_string(i + 1), cfg.lateral_channels);
    };
    return {make(0), make(1), make(2), make(3), make(4)};
}

}  // namespace

RectificationSubnet::RectificationSubnet(const EncoderConfig& cfg, ParameterRegistry& reg, Rng& rng)
    : decoder_(cfg, reg, rng, "rectification", ParamGroup::Rectification), branches_(make_branches(cfg, reg, rng)) {}

Levels<RectificationBundle> RectificationSubnet::forward(const DecoderFeatures& dec, int out_h, int out_w) const {
    Levels<RectificationBundle> out;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = branches_[k](dec.levels[k], out_h, out_w);
    return out;
}

Tensor error_target(const Tensor& mask, const Tensor& object_pred) {
    require_same_shape(mask, object_pred, "error_target");
    Tensor e(mask.shape());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = mask[i] - object_pred[i];
    return e;
}

RectificationLosses rectification_losses(const Levels<RectificationBundle>& bundles, const Tensor& mask) {
    std::vector<ag::Var> object_terms;
    std::vector<ag::Var> error_terms;
    for (const RectificationBundle& b : bundles) {
        object_terms.push_back(bce(b.object_pred, mask));
        const Tensor target = to_positive(error_target(mask, b.object_pred->value));
        error_terms.push_back(kl_div(target, to_positive(b.error_pred)));
    }
    return {ag::sum_scalars(object_terms), ag::sum_scalars(error_terms)};
}

}  // namespace purnet
