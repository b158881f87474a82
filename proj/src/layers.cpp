// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "purnet/layers.hpp"

#include <algorithm>
#include <cmath>

namespace purnet {

const char* to_string(ParamGroup g) noexcept {
    switch (g) {
        case ParamGroup::Backbone: return "backbone";
        case ParamGroup::Promotion: return "promotion";
        case ParamGroup::Rectification: return "rectification";
        case ParamGroup::Purificatory: return "purificatory";
    }
    return "unknown";
}

ag::Var ParameterRegistry::add(std::string name, ParamGroup group, Tensor init) {
    if (find(name) != nullptr) throw InvalidArgument("duplicate parameter name " + name);
    ag::Var v = ag::leaf(std::move(init), true);
    params_.push_back({std::move(name), group, v});
    return v;
}

const Parameter* ParameterRegistry::find(const std::string& name) const {
    auto it = std::find_if(params_.begin(), params_.end(), [&](const Parameter& p) { return p.name == name; });
    return it == params_.end() ? nullptr : &*it;
}

void ParameterRegistry::set_trainable(const std::vector<ParamGroup>& groups) {
    for (Parameter& p : params_) {
        p.var->requires_grad = std::find(groups.begin(), groups.end(), p.group) != groups.end();
    }
}

void ParameterRegistry::zero_grad() {
    for (Parameter& p : params_)
        if (p.var->has_grad()) p.var->grad.fill(0.0);
}

std::size_t ParameterRegistry::scalar_count() const {
    std::size_t n = 0;
    for (const Parameter& p : params_) n += p.var->value.size();
    return n;
}

Tensor he_normal(Shape shape, int fan_in, Rng& rng, double gain) {
    std::normal_distribution<double> dist(0.0, std::sqrt(gain / static_cast<double>(std::max(1, fan_in))));
    Tensor t(shape);
    for (double& v : t.values()) v = dist(rng);
    return t;
}

Conv make_conv(ParameterRegistry& reg, Rng& rng, const std::string& name, ParamGroup group, int in, int out,
               int kernel, int stride, int dilation, double gain) {
    if (in < 1 || out < 1) throw InvalidArgument("conv " + name + " needs positive channel counts");
    kernels::ConvGeometry g{kernel, stride, dilation};
    Conv c;
    c.geometry = g;
    c.weight = reg.add(name + ".weight", group, he_normal({g.taps(), in, out}, g.taps() * in, rng, gain));
    c.bias = reg.add(name + ".bias", group, Tensor(out, 1, 1));
    // Bias tensor is stored as out x 1 x 1; the kernels only read it as a flat span.
    return c;
}

Deconv make_deconv(ParameterRegistry& reg, Rng& rng, const std::string& name, ParamGroup group, int in, int out) {
    Deconv d;
    d.weight = reg.add(name + ".weight", group, he_normal({4, in, out}, in, rng, kLinearGain));
    d.bias = reg.add(name + ".bias", group, Tensor(out, 1, 1));
    return d;
}

ag::Var Head::logits(const ag::Var& x) const { return out(ag::relu(conv1(ag::relu(conv3(x))))); }

Head make_head(ParameterRegistry& reg, Rng& rng, const std::string& name, ParamGroup group, int in, int width) {
    Head h;
    h.conv3 = make_conv(reg, rng, name + ".conv3x3", group, in, width, 3);
    h.conv1 = make_conv(reg, rng, name + ".conv1x1", group, width, width, 1);
    h.out = make_conv(reg, rng, name + ".out", group, width, 1, 1, 1, 1, kOutputGain);
    return h;
}

ag::Var saliency_output(const Head& head, const ag::Var& x, int out_h, int out_w) {
    return ag::upsample_bilinear(ag::sigmoid(head.logits(x)), out_h, out_w);
}

}  // namespace purnet
