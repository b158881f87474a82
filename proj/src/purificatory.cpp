// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "purnet/purificatory.hpp"

#include "purnet/losses.hpp"

namespace purnet {

PurificatoryStage::PurificatoryStage(ParameterRegistry& reg, Rng& rng, const std::string& name, int channels)
    : conv_(make_conv(reg, rng, name + ".conv", ParamGroup::Purificatory, channels, channels, 3, 1, 1,
                          kLinearGain)),
      classifier_(make_head(reg, rng, name + ".classifier", ParamGroup::Purificatory, channels, channels)) {}

PurificatoryStage::Result PurificatoryStage::operator()(const ag::Var& f, const ag::Var& a_p, const ag::Var& a_r,
                                                        int out_h, int out_w) const {
    require_same_shape(f->value, a_p->value, "purificatory promotion attention");
    if (!f->value.shape().same_spatial(a_r->value.shape()) || a_r->value.channels() != 1) {
        throw ShapeError("purificatory rectification attention " + to_string(a_r->value.shape()) +
                         " does not align with features " + to_string(f->value.shape()));
    }
    ag::Var t = ag::add(ag::mul(f, a_p), f);
    ag::Var tc = conv_(t);
    ag::Var m = ag::add(ag::mul_broadcast(tc, a_r), tc);
    return {m, saliency_output(classifier_, m, out_h, out_w)};
}

namespace {

Levels<PurificatoryStage> make_stages(const EncoderConfig& cfg, ParameterRegistry& reg, Rng& rng) {
    auto make = [&](int i) {
        return PurificatoryStage(reg, rng, "purificatory.stage" + std::to_string(i + 1), cfg.lateral_channels);
    };
    return {make(0), make(1), make(2), make(3), make(4)};
}

}  // namespace

PurificatorySubnet::PurificatorySubnet(const EncoderConfig& cfg, ParameterRegistry& reg, Rng& rng)
    : decoder_(cfg, reg, rng, "purificatory", ParamGroup::Purificatory), stages_(make_stages(cfg, reg, rng)) {}

PurificatoryOutputs PurificatorySubnet::forward(const LateralFeatures& laterals,
                                                const Levels<ag::Var>& promotion_attention,
                                                const Levels<ag::Var>& rectification_attention, int out_h,
                                                int out_w) const {
    PurificatoryOutputs out;
    decoder_.decode(laterals, [&](int level, const ag::Var& d) {
        const auto k = static_cast<std::size_t>(level);
        auto r = stages_[k](d, promotion_attention[k], rectification_attention[k], out_h, out_w);
        out.sides[k] = r.side;
        return r.features;
    });
    out.fusion = mean_map({out.sides.begin(), out.sides.end()});
    return out;
}

ag::Var mean_map(const std::vector<ag::Var>& maps) {
    if (maps.empty()) throw InvalidArgument("mean_map needs at least one map");
    ag::Var acc = maps.front();
    for (std::size_t i = 1; i < maps.size(); ++i) acc = ag::add(acc, maps[i]);
    return ag::affine(acc, 1.0 / static_cast<double>(maps.size()), 0.0);
}

ag::Var purificatory_loss(const PurificatoryOutputs& outs, const Tensor& mask, const Levels<Tensor>& error_maps) {
    std::vector<ag::Var> terms;
    for (std::size_t k = 0; k < outs.sides.size(); ++k) terms.push_back(ibce(outs.sides[k], mask, error_maps[k]));
    return ag::sum_scalars(terms);
}

}  // namespace purnet
