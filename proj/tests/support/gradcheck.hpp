// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "purnet/autograd.hpp"

namespace purnet::testing {

inline Tensor random_tensor(Shape s, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Tensor t(s);
    for (double& v : t.values()) v = u(rng);
    return t;
}

inline Tensor random_mask(Shape s, std::mt19937_64& rng) {
    Tensor t(s);
    for (double& v : t.values()) v = static_cast<double>(rng() & 1U);
    return t;
}

/// Central differences of a scalar function of one tensor.
inline Tensor numeric_gradient(const std::function<double(const Tensor&)>& f, const Tensor& x, double h = 1e-6) {
    Tensor g(x.shape());
    Tensor probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + h;
        const double up = f(probe);
        probe[i] = x[i] - h;
        const double down = f(probe);
        probe[i] = x[i];
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

/// Reverse-mode gradient of a scalar graph with respect to one input.
inline Tensor analytic_gradient(const std::function<ag::Var(const ag::Var&)>& f, const Tensor& x) {
    ag::Var leaf = ag::leaf(x, true);
    ag::backward(f(leaf));
    return leaf->has_grad() ? leaf->grad : Tensor(x.shape());
}

/// ||a - b|| / max(||a||, ||b||); 0 when both vanish.
inline double relative_error(const Tensor& a, const Tensor& b) {
    double diff = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    const double scale = std::sqrt(std::max(na, nb));
    return scale == 0.0 ? 0.0 : std::sqrt(diff) / scale;
}

/// Relative error between the analytic and the numeric gradient of f at x.
inline double gradient_error(const std::function<ag::Var(const ag::Var&)>& f, const Tensor& x, double h = 1e-6) {
    const Tensor a = analytic_gradient(f, x);
    const Tensor n = numeric_gradient([&](const Tensor& t) { return ag::scalar(f(ag::constant(t))); }, x, h);
    return relative_error(a, n);
}

}  // namespace purnet::testing
