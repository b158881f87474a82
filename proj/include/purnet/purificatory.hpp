// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "purnet/backbone.hpp"

namespace purnet {

struct PurificatoryOutputs {
    Levels<ag::Var> sides;  // S1..S5 at input resolution; S1 is the inference output
    ag::Var fusion;         // mean of the five sides
};

/// One level of the purificatory decoder:
///   T  = f * a_p + f
///   T' = Conv3x3(T)
///   M  = T' * a_r + T'      (a_r is single-channel, broadcast over channels)
/// and a saliency side output from M.
class PurificatoryStage {
public:
    PurificatoryStage(ParameterRegistry& reg, Rng& rng, const std::string& name, int channels);

    struct Result {
        ag::Var features;  // M
        ag::Var side;
    };
    Result operator()(const ag::Var& f, const ag::Var& a_p, const ag::Var& a_r, int out_h, int out_w) const;

    Head& classifier() noexcept { return classifier_; }

private:
    Conv conv_;
    Head classifier_;
};

class PurificatorySubnet {
public:
    PurificatorySubnet(const EncoderConfig& cfg, ParameterRegistry& reg, Rng& rng);

    /// Runs the top-down pathway, passing each level's purified features M_i
    /// (instead of the raw decoded level) on to the next finer level.
    PurificatoryOutputs forward(const LateralFeatures& laterals, const Levels<ag::Var>& promotion_attention,
                                const Levels<ag::Var>& rectification_attention, int out_h, int out_w) const;

    PurificatoryStage& stage(int level) { return stages_[static_cast<std::size_t>(level)]; }

private:
    TopDownDecoder decoder_;
    Levels<PurificatoryStage> stages_;
};

/// Elementwise mean.
ag::Var mean_map(const std::vector<ag::Var>& maps);

/// Sum over levels of IBCE(S_i, G, E_i); the error maps are constants.
ag::Var purificatory_loss(const PurificatoryOutputs& outs, const Tensor& mask, const Levels<Tensor>& error_maps);

}  // namespace purnet
