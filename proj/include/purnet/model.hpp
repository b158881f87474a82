// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>

#include "purnet/promotion.hpp"
#include "purnet/purificatory.hpp"
#include "purnet/rectification.hpp"

namespace purnet {

struct ForwardResult {
    PromotionOutputs promotion;
    Levels<RectificationBundle> rectification;
    std::optional<PurificatoryOutputs> purificatory;
};

/// Shared encoder and lateral projections feeding the promotion,
/// rectification and purificatory subnetworks. Parameters are created in a
/// fixed order from `seed`, so two models with equal config and seed are
/// bit-identical.
class PurNet {
public:
    PurNet(const EncoderConfig& cfg, std::uint64_t seed);
    PurNet(const PurNet&) = delete;
    PurNet& operator=(const PurNet&) = delete;

    /// image: HxWx3 in [0, 1]. The purificatory pass is skipped when
    /// with_purificatory is false.
    ForwardResult forward(const Tensor& image, bool with_purificatory = true) const;

    /// Inference map S1, no gradients recorded.
    Tensor predict(const Tensor& image);
    /// S1..S5 followed by the fusion map.
    std::vector<Tensor> predict_all(const Tensor& image);

    ParameterRegistry& parameters() noexcept { return registry_; }
    const ParameterRegistry& parameters() const noexcept { return registry_; }
    const EncoderConfig& config() const noexcept { return cfg_; }

private:
    EncoderConfig cfg_;
    ParameterRegistry registry_;
    Rng rng_;
    Encoder encoder_;
    LateralProjection lateral_;
    PromotionSubnet promotion_;
    RectificationSubnet rectification_;
    PurificatorySubnet purificatory_;
};

/// Restores requires_grad flags on scope exit.
class ScopedFreeze {
public:
    explicit ScopedFreeze(ParameterRegistry& reg);
    ~ScopedFreeze();
    ScopedFreeze(const ScopedFreeze&) = delete;
    ScopedFreeze& operator=(const ScopedFreeze&) = delete;

private:
    ParameterRegistry& reg_;
    std::vector<bool> saved_;
};

}  // namespace purnet
