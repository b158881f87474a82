// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "purnet/losses.hpp"

#include <algorithm>
#include <cmath>

namespace purnet {

namespace {

void require_map_pair(const Tensor& p, const Tensor& g, const char* what) {
    if (!p.shape().same_spatial(g.shape()) || p.channels() != 1 || g.channels() != 1) {
        throw ShapeError(std::string(what) + ": prediction " + to_string(p.shape()) + " vs target " +
                         to_string(g.shape()));
    }
}

double clamp_prob(double p) { return std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon); }

double bce_term(double p, double g) {
    const double q = clamp_prob(p);
    return -(g * std::log(q) + (1.0 - g) * std::log(1.0 - q));
}

// d bce_term / dp, zero where the clamp is active.
double bce_slope(double p, double g) {
    if (p <= kProbabilityEpsilon || p >= 1.0 - kProbabilityEpsilon) return 0.0;
    return -g / p + (1.0 - g) / (1.0 - p);
}

ag::Var weighted_bce(const ag::Var& p, const Tensor& g, const Tensor* e) {
    require_map_pair(p->value, g, "bce");
    if (e) require_map_pair(*e, g, "ibce error map");
    Tensor weight(g.shape(), 1.0);
    if (e)
        for (std::size_t i = 0; i < weight.size(); ++i) weight[i] = 1.0 + std::abs((*e)[i]);
    double total = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) total += bce_term(p->value[i], g[i]) * weight[i];
    ag::Var out = ag::constant(Tensor(1, 1, 1, total));
    if (!p->requires_grad) return out;
    out->requires_grad = true;
    out->parents = {p};
    out->backward = [g, weight](ag::Node& self) {
        const ag::Var& pv = self.parents[0];
        Tensor& grad = pv->grad_buffer();
        const double up = self.grad[0];
        for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += up * weight[i] * bce_slope(pv->value[i], g[i]);
    };
    return out;
}

double normalizer(const Tensor& t, const char* what) {
    double z = 0.0;
    for (double v : t.values()) {
        if (!(v >= 0.0)) throw InvalidArgument(std::string(what) + " must be nonnegative");
        z += v;
    }
    if (!(z > 0.0)) throw InvalidArgument(std::string(what) + " cannot be normalized (zero total)");
    return z;
}

}  // namespace

ag::Var bce(const ag::Var& p, const Tensor& g) { return weighted_bce(p, g, nullptr); }
double bce(const Tensor& p, const Tensor& g) { return ag::scalar(bce(ag::constant(p), g)); }

ag::Var ibce(const ag::Var& p, const Tensor& g, const Tensor& e) { return weighted_bce(p, g, &e); }
double ibce(const Tensor& p, const Tensor& g, const Tensor& e) { return ag::scalar(ibce(ag::constant(p), g, e)); }

ag::Var kl_div(const Tensor& target, const ag::Var& pred) {
    require_same_shape(target, pred->value, "kl_div");
    const double zt = normalizer(target, "kl_div target");
    const double zp = normalizer(pred->value, "kl_div prediction");
    double total = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double t = target[i] / zt;
        if (t > 0.0) total += t * std::log(t / (pred->value[i] / zp));
    }
    ag::Var out = ag::constant(Tensor(1, 1, 1, total));
    if (!pred->requires_grad) return out;
    out->requires_grad = true;
    out->parents = {pred};
    // With q = u / Z and a unit-mass target t: dKL/du_k = 1/Z - t_k / u_k.
    out->backward = [target, zt, zp](ag::Node& self) {
        const ag::Var& pv = self.parents[0];
        Tensor& grad = pv->grad_buffer();
        const double up = self.grad[0];
        for (std::size_t i = 0; i < grad.size(); ++i) {
            grad[i] += up * (1.0 / zp - (target[i] / zt) / pv->value[i]);
        }
    };
    return out;
}

double kl_div(const Tensor& target, const Tensor& pred) { return ag::scalar(kl_div(target, ag::constant(pred))); }

ag::Var to_positive(const ag::Var& signed_map) { return ag::affine(signed_map, 0.5, 0.5 + kDistributionEpsilon); }
Tensor to_positive(const Tensor& signed_map) { return to_positive(ag::constant(signed_map))->value; }

ag::Var structural_matrix(const ag::Var& v) {
    const Shape s = v->value.shape();
    if (s.w != 1 || s.c != 1) throw ShapeError("structural_matrix expects an N x 1 x 1 vector, got " + to_string(s));
    const int n = s.h;
    Tensor m(n, n, 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j, 0) = v->value[static_cast<std::size_t>(i)] - v->value[static_cast<std::size_t>(j)];
    ag::Var out = ag::constant(std::move(m));
    if (!v->requires_grad) return out;
    out->requires_grad = true;
    out->parents = {v};
    out->backward = [n](ag::Node& self) {
        Tensor& g = self.parents[0]->grad_buffer();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double d = self.grad(i, j, 0);
                g[static_cast<std::size_t>(i)] += d;
                g[static_cast<std::size_t>(j)] -= d;
            }
    };
    return out;
}

Tensor structural_matrix(const Tensor& v) { return structural_matrix(ag::constant(v))->value; }

ag::Var ssl(const ag::Var& p, const Tensor& g, const SuperpixelSegmentation& seg) {
    require_map_pair(p->value, g, "ssl");
    const Tensor target = to_positive(structural_matrix(region_means(g, seg)));
    return kl_div(target, to_positive(structural_matrix(region_means(p, seg))));
}

double ssl(const Tensor& p, const Tensor& g, const SuperpixelSegmentation& seg) {
    return ag::scalar(ssl(ag::constant(p), g, seg));
}

ag::Var ssl_deep(const Levels<ag::Var>& sides, const Tensor& g, const SuperpixelSegmentation& seg) {
    std::vector<ag::Var> terms;
    for (const ag::Var& s : sides) terms.push_back(ssl(s, g, seg));
    return ag::sum_scalars(terms);
}

bool LossBundle::all_finite() const {
    return std::isfinite(l_p) && std::isfinite(l_ro) && std::isfinite(l_re) && std::isfinite(l_rm) &&
           std::isfinite(l_ss) && std::isfinite(total);
}

}  // namespace purnet
