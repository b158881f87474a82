// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "purnet/promotion.hpp"

#include "purnet/losses.hpp"

namespace purnet {

ag::Var promotion_attention(const ag::Var& features) {
    ag::Var spatial = ag::spatial_softmax(features);
    ag::Var channel = ag::channel_softmax(ag::global_avg_pool(features));
    return ag::scale_channels(spatial, channel);
}

ag::Var apply_promotion(const ag::Var& features, const ag::Var& attention) {
    return ag::add(ag::mul(features, attention), features);
}

PromotionSubnet::PromotionSubnet(const EncoderConfig& cfg, ParameterRegistry& reg, Rng& rng)
    : decoder_(cfg, reg, rng, "promotion", ParamGroup::Promotion) {
    for (int i = 0; i < kLevels; ++i) {
        classifiers_[static_cast<std::size_t>(i)] =
            make_head(reg, rng, "promotion.classifier" + std::to_string(i + 1), ParamGroup::Promotion,
                      cfg.lateral_channels, cfg.lateral_channels);
    }
}

PromotionOutputs PromotionSubnet::forward(const DecoderFeatures& dec, int out_h, int out_w) const {
    PromotionOutputs out;
    for (std::size_t k = 0; k < dec.levels.size(); ++k) {
        out.attention[k] = promotion_attention(dec.levels[k]);
        ag::Var weighted = apply_promotion(dec.levels[k], out.attention[k]);
        out.sides[k] = saliency_output(classifiers_[k], weighted, out_h, out_w);
    }
    return out;
}

ag::Var promotion_loss(const Levels<ag::Var>& sides, const Tensor& mask) {
    std::vector<ag::Var> terms;
    for (const ag::Var& s : sides) terms.push_back(bce(s, mask));
    return ag::sum_scalars(terms);
}

}  // namespace purnet
