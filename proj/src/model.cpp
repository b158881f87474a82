// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "purnet/model.hpp"

namespace purnet {

namespace {

const EncoderConfig& validated(const EncoderConfig& cfg) {
    cfg.validate();
    return cfg;
}

}  // namespace

PurNet::PurNet(const EncoderConfig& cfg, std::uint64_t seed)
    : cfg_(validated(cfg)),
      rng_(seed),
      encoder_(cfg_, registry_, rng_),
      lateral_(cfg_, registry_, rng_),
      promotion_(cfg_, registry_, rng_),
      rectification_(cfg_, registry_, rng_),
      purificatory_(cfg_, registry_, rng_) {}

ForwardResult PurNet::forward(const Tensor& image, bool with_purificatory) const {
    const int h = image.height();
    const int w = image.width();
    LateralFeatures lat = lateral_.project(encoder_.encode(ag::constant(image)));
    ForwardResult r;
    r.promotion = promotion_.forward(promotion_.decode(lat), h, w);
    r.rectification = rectification_.forward(rectification_.decode(lat), h, w);
    if (with_purificatory) {
        Levels<ag::Var> ra;
        for (std::size_t k = 0; k < ra.size(); ++k) ra[k] = r.rectification[k].attention;
        r.purificatory = purificatory_.forward(lat, r.promotion.attention, ra, h, w);
    }
    return r;
}

Tensor PurNet::predict(const Tensor& image) {
    ScopedFreeze freeze(registry_);
    return forward(image).purificatory->sides[0]->value;
}

std::vector<Tensor> PurNet::predict_all(const Tensor& image) {
    ScopedFreeze freeze(registry_);
    const PurificatoryOutputs outs = *forward(image).purificatory;
    std::vector<Tensor> maps;
    for (const ag::Var& s : outs.sides) maps.push_back(s->value);
    maps.push_back(outs.fusion->value);
    return maps;
}

ScopedFreeze::ScopedFreeze(ParameterRegistry& reg) : reg_(reg) {
    for (Parameter& p : reg_.all()) {
        saved_.push_back(p.var->requires_grad);
        p.var->requires_grad = false;
    }
}

ScopedFreeze::~ScopedFreeze() {
    auto& params = reg_.all();
    for (std::size_t i = 0; i < params.size(); ++i) params[i].var->requires_grad = saved_[i];
}

}  // namespace purnet
