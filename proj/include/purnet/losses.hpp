// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "purnet/autograd.hpp"
#include "purnet/backbone.hpp"
#include "purnet/superpixel.hpp"

namespace purnet {

/// Probability clamp used by the cross-entropy terms.
inline constexpr double kProbabilityEpsilon = 1e-7;
/// Smoothing added to every entry before a map is normalized into a distribution.
inline constexpr double kDistributionEpsilon = 1e-6;

// Each loss has a differentiable form over ag::Var and a value-only form over
// Tensor. Targets (masks, error weights, target distributions) are constants.

/// -sum_i [g log p + (1 - g) log(1 - p)], p clamped to [eps, 1 - eps].
ag::Var bce(const ag::Var& p, const Tensor& g);
double bce(const Tensor& p, const Tensor& g);

/// BCE with per-pixel weight (1 + |e|); e is treated as a constant.
ag::Var ibce(const ag::Var& p, const Tensor& g, const Tensor& e);
double ibce(const Tensor& p, const Tensor& g, const Tensor& e);

/// KL(target || pred) after both are normalized to unit sum. Inputs must be
/// nonnegative with positive total.
ag::Var kl_div(const Tensor& target, const ag::Var& pred);
double kl_div(const Tensor& target, const Tensor& pred);

/// (x + 1) / 2 + eps: maps a [-1, 1] field onto a strictly positive one,
/// ready for unit-sum normalization.
ag::Var to_positive(const ag::Var& signed_map);
Tensor to_positive(const Tensor& signed_map);

/// m[i][j] = v[i] - v[j] for a region vector v (N x 1 x 1); result is N x N x 1.
ag::Var structural_matrix(const ag::Var& v);
Tensor structural_matrix(const Tensor& v);

/// Structural similarity between a prediction and a mask over a region graph:
/// KL between the normalized structural matrices of their region means.
ag::Var ssl(const ag::Var& p, const Tensor& g, const SuperpixelSegmentation& seg);
double ssl(const Tensor& p, const Tensor& g, const SuperpixelSegmentation& seg);

ag::Var ssl_deep(const Levels<ag::Var>& sides, const Tensor& g, const SuperpixelSegmentation& seg);

struct LossBundle {
    double l_p = 0.0;
    double l_ro = 0.0;
    double l_re = 0.0;
    double l_rm = 0.0;
    double l_ss = 0.0;
    double total = 0.0;

    bool all_finite() const;
};

}  // namespace purnet
