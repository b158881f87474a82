// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "purnet/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace purnet {

std::string to_string(const Shape& s) {
    return std::to_string(s.h) + "x" + std::to_string(s.w) + "x" + std::to_string(s.c);
}

Tensor::Tensor(Shape shape, double fill) : shape_(shape) {
    if (shape.h < 0 || shape.w < 0 || shape.c < 0) {
        throw InvalidArgument("negative tensor dimension " + to_string(shape));
    }
    data_.assign(shape.size(), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> values) : shape_(shape), data_(std::move(values)) {
    if (data_.size() != shape.size()) {
        throw ShapeError("tensor of shape " + to_string(shape) + " given " + std::to_string(data_.size()) +
                         " values");
    }
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

double Tensor::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

bool Tensor::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!(a.shape() == b.shape())) {
        throw ShapeError(std::string(what) + ": " + to_string(a.shape()) + " vs " + to_string(b.shape()));
    }
}

std::vector<LinearTap> bilinear_taps(int in, int out) {
    std::vector<LinearTap> taps(static_cast<std::size_t>(out));
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    for (int o = 0; o < out; ++o) {
        double src = (o + 0.5) * scale - 0.5;
        if (src < 0.0) src = 0.0;
        int i0 = static_cast<int>(std::floor(src));
        if (i0 > in - 1) i0 = in - 1;
        const int i1 = std::min(i0 + 1, in - 1);
        taps[static_cast<std::size_t>(o)] = {i0, i1, i1 == i0 ? 0.0 : src - i0};
    }
    return taps;
}

Tensor resize_bilinear(const Tensor& src, int out_h, int out_w) {
    if (out_h <= 0 || out_w <= 0) throw InvalidArgument("resize target must be positive");
    if (src.empty()) throw InvalidArgument("resize of empty tensor");
    const auto ty = bilinear_taps(src.height(), out_h);
    const auto tx = bilinear_taps(src.width(), out_w);
    const int c = src.channels();
    Tensor dst(out_h, out_w, c);
    for (int y = 0; y < out_h; ++y) {
        const auto& vy = ty[static_cast<std::size_t>(y)];
        for (int x = 0; x < out_w; ++x) {
            const auto& vx = tx[static_cast<std::size_t>(x)];
            const double* a = src.pixel(vy.i0, vx.i0);
            const double* b = src.pixel(vy.i0, vx.i1);
            const double* d = src.pixel(vy.i1, vx.i0);
            const double* e = src.pixel(vy.i1, vx.i1);
            double* out = dst.pixel(y, x);
            for (int k = 0; k < c; ++k) {
                const double top = a[k] + vx.w1 * (b[k] - a[k]);
                const double bot = d[k] + vx.w1 * (e[k] - d[k]);
                out[k] = top + vy.w1 * (bot - top);
            }
        }
    }
    return dst;
}

Tensor resize_nearest(const Tensor& src, int out_h, int out_w) {
    if (out_h <= 0 || out_w <= 0) throw InvalidArgument("resize target must be positive");
    Tensor dst(out_h, out_w, src.channels());
    for (int y = 0; y < out_h; ++y) {
        const int sy = std::min(src.height() - 1, static_cast<int>(std::floor((y + 0.5) * src.height() / out_h)));
        for (int x = 0; x < out_w; ++x) {
            const int sx = std::min(src.width() - 1, static_cast<int>(std::floor((x + 0.5) * src.width() / out_w)));
            std::copy_n(src.pixel(sy, sx), src.channels(), dst.pixel(y, x));
        }
    }
    return dst;
}

Tensor flip_horizontal(const Tensor& src) {
    Tensor dst(src.shape());
    const int w = src.width();
    for (int y = 0; y < src.height(); ++y) {
        for (int x = 0; x < w; ++x) {
            std::copy_n(src.pixel(y, x), src.channels(), dst.pixel(y, w - 1 - x));
        }
    }
    return dst;
}

}  // namespace purnet
