// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

// Per-pixel bodies shared by the serial and OpenMP kernel builds. Keeping the
// innermost arithmetic in one place is what makes the two builds agree bit for bit.

#pragma once

#include <span>
#include <vector>

#include "purnet/kernels.hpp"

namespace purnet::kernels::detail {

/// out[i] += v * row[i]. Each element sees the same single multiply-add in
/// every build, so vectorizing this loop does not change results.
inline void axpy(double* __restrict out, const double* __restrict row, double v, int n) {
    for (int i = 0; i < n; ++i) out[i] += v * row[i];
}

struct ConvDims {
    int ih, iw, ic, oh, ow, oc;
};

struct DeconvDims {
    int ih, iw, ic, oc;
};

inline ConvDims conv_dims(const Tensor& x, const Tensor& w, ConvGeometry g) {
    if (g.kernel < 1 || g.stride < 1 || g.dilation < 1) throw InvalidArgument("invalid convolution geometry");
    if (w.height() != g.taps() || w.width() != x.channels()) {
        throw ShapeError("conv weight " + to_string(w.shape()) + " does not match input " + to_string(x.shape()) +
                         " with kernel " + std::to_string(g.kernel));
    }
    return {x.height(), x.width(), x.channels(), g.out_size(x.height()), g.out_size(x.width()), w.channels()};
}

inline ConvDims check_conv(const Tensor& x, const Tensor& w, std::span<const double> bias, ConvGeometry g,
                           const Tensor& y) {
    const ConvDims d = conv_dims(x, w, g);
    if (!bias.empty() && static_cast<int>(bias.size()) != d.oc) throw ShapeError("conv bias length mismatch");
    if (y.height() != d.oh || y.width() != d.ow || y.channels() != d.oc) {
        throw ShapeError("conv output buffer " + to_string(y.shape()) + " expected " +
                         to_string(Shape{d.oh, d.ow, d.oc}));
    }
    return d;
}

inline ConvDims check_conv_backward(const Tensor& x, const Tensor& w, ConvGeometry g, const Tensor& dy) {
    const ConvDims d = conv_dims(x, w, g);
    if (dy.height() != d.oh || dy.width() != d.ow || dy.channels() != d.oc) {
        throw ShapeError("conv output gradient " + to_string(dy.shape()) + " expected " +
                         to_string(Shape{d.oh, d.ow, d.oc}));
    }
    return d;
}

inline void conv_pixel(const Tensor& x, const Tensor& w, std::span<const double> bias, ConvGeometry g,
                       const ConvDims& d, int oy, int ox, double* out) {
    const int pad = g.pad();
    for (int co = 0; co < d.oc; ++co) out[co] = bias.empty() ? 0.0 : bias[static_cast<std::size_t>(co)];
    for (int ky = 0; ky < g.kernel; ++ky) {
        const int iy = oy * g.stride - pad + ky * g.dilation;
        if (iy < 0 || iy >= d.ih) continue;
        for (int kx = 0; kx < g.kernel; ++kx) {
            const int ix = ox * g.stride - pad + kx * g.dilation;
            if (ix < 0 || ix >= d.iw) continue;
            const double* in = x.pixel(iy, ix);
            const double* wk = w.data() + static_cast<std::size_t>(ky * g.kernel + kx) * d.ic * d.oc;
            for (int ci = 0; ci < d.ic; ++ci) {
                const double v = in[ci];
                const double* row = wk + static_cast<std::size_t>(ci) * d.oc;
                axpy(out, row, v, d.oc);
            }
        }
    }
}

/// Weights re-laid out as {taps, out_channels, in_channels} for the input-gradient gather.
inline std::vector<double> transpose_taps(const Tensor& w) {
    const int taps = w.height(), ic = w.width(), oc = w.channels();
    std::vector<double> t(w.size());
    for (int k = 0; k < taps; ++k)
        for (int ci = 0; ci < ic; ++ci)
            for (int co = 0; co < oc; ++co)
                t[(static_cast<std::size_t>(k) * oc + co) * ic + ci] = w(k, ci, co);
    return t;
}

inline void conv_grad_input_pixel(const Tensor& dy, const std::vector<double>& wt, ConvGeometry g,
                                  const ConvDims& d, int iy, int ix, double* out) {
    const int pad = g.pad();
    for (int ky = 0; ky < g.kernel; ++ky) {
        const int ny = iy + pad - ky * g.dilation;
        if (ny < 0 || ny % g.stride != 0) continue;
        const int oy = ny / g.stride;
        if (oy >= d.oh) continue;
        for (int kx = 0; kx < g.kernel; ++kx) {
            const int nx = ix + pad - kx * g.dilation;
            if (nx < 0 || nx % g.stride != 0) continue;
            const int ox = nx / g.stride;
            if (ox >= d.ow) continue;
            const double* grad = dy.pixel(oy, ox);
            const double* wk = wt.data() + static_cast<std::size_t>(ky * g.kernel + kx) * d.oc * d.ic;
            for (int co = 0; co < d.oc; ++co) {
                const double v = grad[co];
                const double* row = wk + static_cast<std::size_t>(co) * d.ic;
                axpy(out, row, v, d.ic);
            }
        }
    }
}

inline DeconvDims deconv_dims(const Tensor& x, const Tensor& w) {
    if (w.height() != 4 || w.width() != x.channels()) {
        throw ShapeError("deconv weight " + to_string(w.shape()) + " does not match input " + to_string(x.shape()));
    }
    return {x.height(), x.width(), x.channels(), w.channels()};
}

inline DeconvDims check_deconv(const Tensor& x, const Tensor& w, std::span<const double> bias, const Tensor& y) {
    const DeconvDims d = deconv_dims(x, w);
    if (!bias.empty() && static_cast<int>(bias.size()) != d.oc) throw ShapeError("deconv bias length mismatch");
    if (y.height() != 2 * d.ih || y.width() != 2 * d.iw || y.channels() != d.oc) {
        throw ShapeError("deconv output buffer " + to_string(y.shape()));
    }
    return d;
}

inline DeconvDims check_deconv_backward(const Tensor& x, const Tensor& w, const Tensor& dy) {
    const DeconvDims d = deconv_dims(x, w);
    if (dy.height() != 2 * d.ih || dy.width() != 2 * d.iw || dy.channels() != d.oc) {
        throw ShapeError("deconv output gradient " + to_string(dy.shape()));
    }
    return d;
}

inline void deconv_pixel(const Tensor& x, const Tensor& w, std::span<const double> bias, const DeconvDims& d,
                         int iy, int ix, Tensor& y) {
    const double* in = x.pixel(iy, ix);
    for (int tap = 0; tap < 4; ++tap) {
        double* out = y.pixel(2 * iy + tap / 2, 2 * ix + tap % 2);
        for (int co = 0; co < d.oc; ++co) out[co] = bias.empty() ? 0.0 : bias[static_cast<std::size_t>(co)];
        const double* wk = w.data() + static_cast<std::size_t>(tap) * d.ic * d.oc;
        for (int ci = 0; ci < d.ic; ++ci) {
            const double v = in[ci];
            const double* row = wk + static_cast<std::size_t>(ci) * d.oc;
            axpy(out, row, v, d.oc);
        }
    }
}

inline void deconv_grad_input_pixel(const Tensor& dy, const std::vector<double>& wt, const DeconvDims& d, int iy,
                                    int ix, double* out) {
    for (int tap = 0; tap < 4; ++tap) {
        const double* grad = dy.pixel(2 * iy + tap / 2, 2 * ix + tap % 2);
        const double* wk = wt.data() + static_cast<std::size_t>(tap) * d.oc * d.ic;
        for (int co = 0; co < d.oc; ++co) {
            const double v = grad[co];
            const double* row = wk + static_cast<std::size_t>(co) * d.ic;
            axpy(out, row, v, d.ic);
        }
    }
}

}  // namespace purnet::kernels::detail
