// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "purnet/autograd.hpp"

namespace purnet {

/// Optimizer parameter groups. The backbone group (encoder + lateral
/// projections) trains at the base learning rate, the rest at a multiple of it.
enum class ParamGroup { Backbone, Promotion, Rectification, Purificatory };

const char* to_string(ParamGroup g) noexcept;

struct Parameter {
    std::string name;
    ParamGroup group;
    ag::Var var;
};

using Rng = std::mt19937_64;

class ParameterRegistry {
public:
    ag::Var add(std::string name, ParamGroup group, Tensor init);

    const std::vector<Parameter>& all() const noexcept { return params_; }
    std::vector<Parameter>& all() noexcept { return params_; }
    const Parameter* find(const std::string& name) const;

    /// Marks exactly the parameters of the given groups as trainable.
    void set_trainable(const std::vector<ParamGroup>& groups);
    void zero_grad();
    std::size_t scalar_count() const;

private:
    std::vector<Parameter> params_;
};

/// He (fan-in) normal initialization.
/// Weight variance is gain / fan_in.
inline constexpr double kReluGain = 2.0;    // followed by a ReLU
inline constexpr double kLinearGain = 1.0;  // feeds a sum or another linear map
inline constexpr double kOutputGain = 1e-2; // final logit layer, starts near zero

Tensor he_normal(Shape shape, int fan_in, Rng& rng, double gain = kReluGain);

struct Conv {
    ag::Var weight;
    ag::Var bias;
    kernels::ConvGeometry geometry;

    ag::Var operator()(const ag::Var& x) const { return ag::conv2d(x, weight, bias, geometry); }
    int in_channels() const { return weight->value.width(); }
    int out_channels() const { return weight->value.channels(); }
};

Conv make_conv(ParameterRegistry& reg, Rng& rng, const std::string& name, ParamGroup group, int in, int out,
               int kernel, int stride = 1, int dilation = 1, double gain = kReluGain);

struct Deconv {
    ag::Var weight;
    ag::Var bias;

    ag::Var operator()(const ag::Var& x) const { return ag::deconv2x(x, weight, bias); }
};

Deconv make_deconv(ParameterRegistry& reg, Rng& rng, const std::string& name, ParamGroup group, int in, int out);

/// Conv3x3(width) -> ReLU -> Conv1x1(width) -> ReLU -> Conv1x1(1): the per-level
/// prediction head shared by every subnetwork (classifier and error regressor).
struct Head {
    Conv conv3;
    Conv conv1;
    Conv out;

    /// Single-channel logits at the input's resolution.
    ag::Var logits(const ag::Var& x) const;
};

Head make_head(ParameterRegistry& reg, Rng& rng, const std::string& name, ParamGroup group, int in, int width);

/// sigmoid(head(x)) resampled to out_h x out_w.
ag::Var saliency_output(const Head& head, const ag::Var& x, int out_h, int out_w);

}  // namespace purnet
