// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "purnet/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace purnet::ag {

Tensor& Node::grad_buffer() {
    if (grad.empty()) grad = Tensor(value.shape());
    return grad;
}

namespace {

Var make_node(Tensor value, std::vector<Var> parents, std::function<void(Node&)> fn) {
    auto node = std::make_shared<Node>();
    node->value = std::move(value);
    node->requires_grad = std::any_of(parents.begin(), parents.end(), [](const Var& p) { return p->requires_grad; });
    if (node->requires_grad) {
        node->parents = std::move(parents);
        node->backward = std::move(fn);
    }
    return node;
}

bool wants(const Var& v) { return v->requires_grad; }

void require_same(const Var& a, const Var& b, const char* what) { require_same_shape(a->value, b->value, what); }

}  // namespace

Var constant(Tensor value) {
    auto node = std::make_shared<Node>();
    node->value = std::move(value);
    return node;
}

Var leaf(Tensor value, bool requires_grad) {
    auto node = constant(std::move(value));
    node->requires_grad = requires_grad;
    return node;
}

Var detach(const Var& v) { return constant(v->value); }

void backward(const Var& root, double seed) {
    if (root->value.size() != 1) throw ShapeError("backward() needs a scalar root, got " + to_string(root->value.shape()));
    if (!root->requires_grad) return;

    // Iterative post-order DFS gives a topological order with parents first.
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, std::size_t>> stack{{root.get(), 0}};
    visited.insert(root.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* p = node->parents[next++].get();
            if (p->requires_grad && visited.insert(p).second) stack.emplace_back(p, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    root->grad_buffer()[0] += seed;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (n->backward && n->has_grad()) n->backward(*n);
    }
}

Var conv2d(const Var& x, const Var& weight, const Var& bias, kernels::ConvGeometry g) {
    const int oh = g.out_size(x->value.height());
    const int ow = g.out_size(x->value.width());
    Tensor out(oh, ow, weight->value.channels());
    kernels::conv2d_forward(x->value, weight->value, bias->value.values(), g, out);
    return make_node(std::move(out), {x, weight, bias}, [g](Node& self) {
        const Var& xin = self.parents[0];
        const Var& w = self.parents[1];
        const Var& b = self.parents[2];
        if (wants(xin)) kernels::conv2d_backward_input(self.grad, w->value, g, xin->grad_buffer());
        if (wants(w)) kernels::conv2d_backward_weight(xin->value, self.grad, g, w->grad_buffer());
        if (wants(b)) {
            Tensor& db = b->grad_buffer();
            const int c = self.grad.channels();
            for (int y = 0; y < self.grad.height(); ++y)
                for (int xx = 0; xx < self.grad.width(); ++xx) {
                    const double* gp = self.grad.pixel(y, xx);
                    for (int k = 0; k < c; ++k) db[static_cast<std::size_t>(k)] += gp[k];
                }
        }
    });
}

Var deconv2x(const Var& x, const Var& weight, const Var& bias) {
    Tensor out(2 * x->value.height(), 2 * x->value.width(), weight->value.channels());
    kernels::deconv2x_forward(x->value, weight->value, bias->value.values(), out);
    return make_node(std::move(out), {x, weight, bias}, [](Node& self) {
        const Var& xin = self.parents[0];
        const Var& w = self.parents[1];
        const Var& b = self.parents[2];
        if (wants(xin)) kernels::deconv2x_backward_input(self.grad, w->value, xin->grad_buffer());
        if (wants(w)) kernels::deconv2x_backward_weight(xin->value, self.grad, w->grad_buffer());
        if (wants(b)) {
            Tensor& db = b->grad_buffer();
            const int c = self.grad.channels();
            for (std::size_t i = 0; i < self.grad.size(); ++i) db[i % static_cast<std::size_t>(c)] += self.grad[i];
        }
    });
}

Var add(const Var& a, const Var& b) {
    require_same(a, b, "add");
    Tensor out(a->value.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->value[i] + b->value[i];
    return make_node(std::move(out), {a, b}, [](Node& self) {
        for (int k = 0; k < 2; ++k) {
            const Var& p = self.parents[static_cast<std::size_t>(k)];
            if (!wants(p)) continue;
            Tensor& g = p->grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
        }
    });
}

Var sub(const Var& a, const Var& b) {
    require_same(a, b, "sub");
    Tensor out(a->value.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->value[i] - b->value[i];
    return make_node(std::move(out), {a, b}, [](Node& self) {
        if (wants(self.parents[0])) {
            Tensor& g = self.parents[0]->grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
        }
        if (wants(self.parents[1])) {
            Tensor& g = self.parents[1]->grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
        }
    });
}

Var mul(const Var& a, const Var& b) {
    require_same(a, b, "mul");
    Tensor out(a->value.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->value[i] * b->value[i];
    return make_node(std::move(out), {a, b}, [](Node& self) {
        const Var& pa = self.parents[0];
        const Var& pb = self.parents[1];
        if (wants(pa)) {
            Tensor& g = pa->grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pb->value[i];
        }
        if (wants(pb)) {
            Tensor& g = pb->grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pa->value[i];
        }
    });
}

Var mul_broadcast(const Var& a, const Var& m) {
    const Shape sa = a->value.shape();
    const Shape sm = m->value.shape();
    if (!sa.same_spatial(sm) || sm.c != 1) {
        throw ShapeError("mul_broadcast: " + to_string(sa) + " vs " + to_string(sm));
    }
    const auto c = static_cast<std::size_t>(sa.c);
    Tensor out(sa);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->value[i] * m->value[i / c];
    return make_node(std::move(out), {a, m}, [c](Node& self) {
        const Var& pa = self.parents[0];
        const Var& pm = self.parents[1];
        if (wants(pa)) {
            Tensor& g = pa->grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pm->value[i / c];
        }
        if (wants(pm)) {
            Tensor& g = pm->grad_buffer();
            for (std::size_t i = 0; i < self.grad.size(); ++i) g[i / c] += self.grad[i] * pa->value[i];
        }
    });
}

Var scale_channels(const Var& a, const Var& v) {
    const Shape sa = a->value.shape();
    const Shape sv = v->value.shape();
    if (sv.h != 1 || sv.w != 1 || sv.c != sa.c) {
        throw ShapeError("scale_channels: " + to_string(sa) + " vs " + to_string(sv));
    }
    const auto c = static_cast<std::size_t>(sa.c);
    Tensor out(sa);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->value[i] * v->value[i % c];
    return make_node(std::move(out), {a, v}, [c](Node& self) {
        const Var& pa = self.parents[0];
        const Var& pv = self.parents[1];
        if (wants(pa)) {
            Tensor& g = pa->grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pv->value[i % c];
        }
        if (wants(pv)) {
            Tensor& g = pv->grad_buffer();
            for (std::size_t i = 0; i < self.grad.size(); ++i) g[i % c] += self.grad[i] * pa->value[i];
        }
    });
}

Var affine(const Var& x, double scale, double shift) {
    Tensor out(x->value.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * x->value[i] + shift;
    return make_node(std::move(out), {x}, [scale](Node& self) {
        Tensor& g = self.parents[0]->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += scale * self.grad[i];
    });
}

Var relu(const Var& x) {
    Tensor out(x->value.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x->value[i] > 0.0 ? x->value[i] : 0.0;
    return make_node(std::move(out), {x}, [](Node& self) {
        const Var& p = self.parents[0];
        Tensor& g = p->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i)
            if (p->value[i] > 0.0) g[i] += self.grad[i];
    });
}

Var sigmoid(const Var& x) {
    Tensor out(x->value.shape());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = x->value[i];
        if (v >= 0.0) {
            out[i] = 1.0 / (1.0 + std::exp(-v));
        } else {
            const double e = std::exp(v);
            out[i] = e / (1.0 + e);
        }
    }
    return make_node(std::move(out), {x}, [](Node& self) {
        Tensor& g = self.parents[0]->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double s = self.value[i];
            g[i] += self.grad[i] * s * (1.0 - s);
        }
    });
}

Var tanh(const Var& x) {
    Tensor out(x->value.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(x->value[i]);
    return make_node(std::move(out), {x}, [](Node& self) {
        Tensor& g = self.parents[0]->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double t = self.value[i];
            g[i] += self.grad[i] * (1.0 - t * t);
        }
    });
}

Var spatial_softmax(const Var& x) {
    const Shape s = x->value.shape();
    if (s.size() == 0) throw ShapeError("spatial_softmax of empty tensor");
    const auto c = static_cast<std::size_t>(s.c);
    const std::size_t n = s.size() / c;
    Tensor out(s);
    for (std::size_t k = 0; k < c; ++k) {
        double mx = x->value[k];
        for (std::size_t p = 1; p < n; ++p) mx = std::max(mx, x->value[p * c + k]);
        double z = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            const double e = std::exp(x->value[p * c + k] - mx);
            out[p * c + k] = e;
            z += e;
        }
        for (std::size_t p = 0; p < n; ++p) out[p * c + k] /= z;
    }
    return make_node(std::move(out), {x}, [c, n](Node& self) {
        Tensor& g = self.parents[0]->grad_buffer();
        for (std::size_t k = 0; k < c; ++k) {
            double dot = 0.0;
            for (std::size_t p = 0; p < n; ++p) dot += self.value[p * c + k] * self.grad[p * c + k];
            for (std::size_t p = 0; p < n; ++p) {
                const std::size_t i = p * c + k;
                g[i] += self.value[i] * (self.grad[i] - dot);
            }
        }
    });
}

Var global_avg_pool(const Var& x) {
    const Shape s = x->value.shape();
    const auto c = static_cast<std::size_t>(s.c);
    const std::size_t n = s.size() / c;
    if (n == 0) throw ShapeError("global_avg_pool of empty tensor");
    Tensor out(1, 1, s.c);
    for (std::size_t i = 0; i < x->value.size(); ++i) out[i % c] += x->value[i];
    for (std::size_t k = 0; k < c; ++k) out[k] /= static_cast<double>(n);
    return make_node(std::move(out), {x}, [c, n](Node& self) {
        Tensor& g = self.parents[0]->grad_buffer();
        const double inv = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i % c] * inv;
    });
}

Var channel_softmax(const Var& v) {
    const Shape s = v->value.shape();
    if (s.h != 1 || s.w != 1 || s.c < 1) throw ShapeError("channel_softmax expects 1x1xC, got " + to_string(s));
    Tensor out(s);
    double mx = v->value[0];
    for (std::size_t k = 1; k < out.size(); ++k) mx = std::max(mx, v->value[k]);
    double z = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = std::exp(v->value[k] - mx);
        z += out[k];
    }
    for (std::size_t k = 0; k < out.size(); ++k) out[k] /= z;
    return make_node(std::move(out), {v}, [](Node& self) {
        Tensor& g = self.parents[0]->grad_buffer();
        double dot = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) dot += self.value[k] * self.grad[k];
        for (std::size_t k = 0; k < g.size(); ++k) g[k] += self.value[k] * (self.grad[k] - dot);
    });
}

Var upsample_bilinear(const Var& x, int out_h, int out_w) {
    const Shape s = x->value.shape();
    if (s.h == out_h && s.w == out_w) return x;
    Tensor out = resize_bilinear(x->value, out_h, out_w);
    return make_node(std::move(out), {x}, [out_h, out_w](Node& self) {
        const Var& p = self.parents[0];
        Tensor& g = p->grad_buffer();
        const auto ty = bilinear_taps(p->value.height(), out_h);
        const auto tx = bilinear_taps(p->value.width(), out_w);
        const int c = p->value.channels();
        for (int y = 0; y < out_h; ++y) {
            const auto& vy = ty[static_cast<std::size_t>(y)];
            for (int xx = 0; xx < out_w; ++xx) {
                const auto& vx = tx[static_cast<std::size_t>(xx)];
                const double* go = self.grad.pixel(y, xx);
                const double w00 = (1.0 - vy.w1) * (1.0 - vx.w1);
                const double w01 = (1.0 - vy.w1) * vx.w1;
                const double w10 = vy.w1 * (1.0 - vx.w1);
                const double w11 = vy.w1 * vx.w1;
                double* a = g.pixel(vy.i0, vx.i0);
                double* b = g.pixel(vy.i0, vx.i1);
                double* d = g.pixel(vy.i1, vx.i0);
                double* e = g.pixel(vy.i1, vx.i1);
                for (int k = 0; k < c; ++k) {
                    a[k] += w00 * go[k];
                    b[k] += w01 * go[k];
                    d[k] += w10 * go[k];
                    e[k] += w11 * go[k];
                }
            }
        }
    });
}

Var sum_scalars(const std::vector<Var>& terms) {
    Tensor out(1, 1, 1);
    for (const Var& t : terms) {
        if (t->value.size() != 1) throw ShapeError("sum_scalars expects scalars");
        out[0] += t->value[0];
    }
    return make_node(std::move(out), terms, [](Node& self) {
        for (const Var& p : self.parents)
            if (wants(p)) p->grad_buffer()[0] += self.grad[0];
    });
}

}  // namespace purnet::ag
