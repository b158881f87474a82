// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "purnet/kernels.hpp"
#include "purnet/tensor.hpp"

// Minimal tape-free reverse-mode differentiation. Every op allocates a Node that
// keeps its inputs alive; backward() walks the DAG below a scalar root in reverse
// topological order. Parameters are long-lived leaf nodes whose grad buffers
// accumulate across backward() calls until the optimizer clears them.

namespace purnet::ag {

struct Node;
using Var = std::shared_ptr<Node>;

struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    std::vector<Var> parents;
    std::function<void(Node&)> backward;

    /// Gradient buffer, zero-initialized on first use.
    Tensor& grad_buffer();
    bool has_grad() const noexcept { return !grad.empty(); }
};

Var constant(Tensor value);
Var leaf(Tensor value, bool requires_grad);
/// Same value, cut from the graph.
Var detach(const Var& v);

/// Accumulates d(root)/d(node) * seed into every reachable node that requires grad.
/// The root must be a 1x1x1 scalar.
void backward(const Var& root, double seed = 1.0);

inline double scalar(const Var& v) { return v->value[0]; }

// ---- differentiable ops -------------------------------------------------

Var conv2d(const Var& x, const Var& weight, const Var& bias, kernels::ConvGeometry g);
/// Learnable 2x upsampling: 2x2 kernel, stride 2.
Var deconv2x(const Var& x, const Var& weight, const Var& bias);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
/// a (HxWxC) times m (HxWx1) broadcast over channels.
Var mul_broadcast(const Var& a, const Var& m);
/// a (HxWxC) times v (1x1xC) broadcast over positions.
Var scale_channels(const Var& a, const Var& v);
/// scale * x + shift, elementwise.
Var affine(const Var& x, double scale, double shift);

Var relu(const Var& x);
Var sigmoid(const Var& x);
Var tanh(const Var& x);

/// Softmax over all spatial positions, independently for every channel.
Var spatial_softmax(const Var& x);
/// Global average pooling to 1x1xC.
Var global_avg_pool(const Var& x);
/// Softmax over the channels of a 1x1xC vector.
Var channel_softmax(const Var& v);

Var upsample_bilinear(const Var& x, int out_h, int out_w);

/// Sum of 1x1x1 scalars.
Var sum_scalars(const std::vector<Var>& terms);

}  // namespace purnet::ag
