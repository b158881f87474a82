// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <vector>

#include "kernels_common.hpp"
#include "purnet/kernels.hpp"

namespace purnet::kernels {

namespace {
std::atomic<ExecMode> g_mode{ExecMode::Parallel};
}

void set_exec_mode(ExecMode mode) noexcept { g_mode.store(mode); }
ExecMode exec_mode() noexcept { return g_mode.load(); }

namespace serial {

void conv2d_forward(const Tensor& x, const Tensor& w, std::span<const double> bias, ConvGeometry g, Tensor& y) {
    const detail::ConvDims d = detail::check_conv(x, w, bias, g, y);
    for (int oy = 0; oy < d.oh; ++oy) {
        for (int ox = 0; ox < d.ow; ++ox) {
            detail::conv_pixel(x, w, bias, g, d, oy, ox, y.pixel(oy, ox));
        }
    }
}

void conv2d_backward_input(const Tensor& dy, const Tensor& w, ConvGeometry g, Tensor& dx) {
    const detail::ConvDims d = detail::check_conv_backward(dx, w, g, dy);
    const std::vector<double> wt = detail::transpose_taps(w);
    for (int iy = 0; iy < d.ih; ++iy) {
        for (int ix = 0; ix < d.iw; ++ix) {
            detail::conv_grad_input_pixel(dy, wt, g, d, iy, ix, dx.pixel(iy, ix));
        }
    }
}

void conv2d_backward_weight(const Tensor& x, const Tensor& dy, ConvGeometry g, Tensor& dw) {
    const detail::ConvDims d = detail::check_conv_backward(x, dw, g, dy);
    const int pad = g.pad();
    for (int oy = 0; oy < d.oh; ++oy) {
        for (int ox = 0; ox < d.ow; ++ox) {
            const double* grad = dy.pixel(oy, ox);
            for (int ky = 0; ky < g.kernel; ++ky) {
                const int iy = oy * g.stride - pad + ky * g.dilation;
                if (iy < 0 || iy >= d.ih) continue;
                for (int kx = 0; kx < g.kernel; ++kx) {
                    const int ix = ox * g.stride - pad + kx * g.dilation;
                    if (ix < 0 || ix >= d.iw) continue;
                    const double* in = x.pixel(iy, ix);
                    double* wk = dw.data() + static_cast<std::size_t>(ky * g.kernel + kx) * d.ic * d.oc;
                    for (int ci = 0; ci < d.ic; ++ci) {
                        const double v = in[ci];
                        double* row = wk + static_cast<std::size_t>(ci) * d.oc;
                        detail::axpy(row, grad, v, d.oc);
                    }
                }
            }
        }
    }
}

void deconv2x_forward(const Tensor& x, const Tensor& w, std::span<const double> bias, Tensor& y) {
    const detail::DeconvDims d = detail::check_deconv(x, w, bias, y);
    for (int iy = 0; iy < d.ih; ++iy) {
        for (int ix = 0; ix < d.iw; ++ix) {
            detail::deconv_pixel(x, w, bias, d, iy, ix, y);
        }
    }
}

void deconv2x_backward_input(const Tensor& dy, const Tensor& w, Tensor& dx) {
    const detail::DeconvDims d = detail::check_deconv_backward(dx, w, dy);
    const std::vector<double> wt = detail::transpose_taps(w);
    for (int iy = 0; iy < d.ih; ++iy) {
        for (int ix = 0; ix < d.iw; ++ix) {
            detail::deconv_grad_input_pixel(dy, wt, d, iy, ix, dx.pixel(iy, ix));
        }
    }
}

void deconv2x_backward_weight(const Tensor& x, const Tensor& dy, Tensor& dw) {
    const detail::DeconvDims d = detail::check_deconv_backward(x, dw, dy);
    for (int iy = 0; iy < d.ih; ++iy) {
        for (int ix = 0; ix < d.iw; ++ix) {
            const double* in = x.pixel(iy, ix);
            for (int tap = 0; tap < 4; ++tap) {
                const double* grad = dy.pixel(2 * iy + tap / 2, 2 * ix + tap % 2);
                double* wk = dw.data() + static_cast<std::size_t>(tap) * d.ic * d.oc;
                for (int ci = 0; ci < d.ic; ++ci) {
                    const double v = in[ci];
                    double* row = wk + static_cast<std::size_t>(ci) * d.oc;
                    detail::axpy(row, grad, v, d.oc);
                }
            }
        }
    }
}

}  // namespace serial

void conv2d_forward(const Tensor& x, const Tensor& w, std::span<const double> bias, ConvGeometry g, Tensor& y) {
    if (exec_mode() == ExecMode::Reference) return serial::conv2d_forward(x, w, bias, g, y);
    omp::conv2d_forward(x, w, bias, g, y);
}
void conv2d_backward_input(const Tensor& dy, const Tensor& w, ConvGeometry g, Tensor& dx) {
    if (exec_mode() == ExecMode::Reference) return serial::conv2d_backward_input(dy, w, g, dx);
    omp::conv2d_backward_input(dy, w, g, dx);
}
void conv2d_backward_weight(const Tensor& x, const Tensor& dy, ConvGeometry g, Tensor& dw) {
    if (exec_mode() == ExecMode::Reference) return serial::conv2d_backward_weight(x, dy, g, dw);
    omp::conv2d_backward_weight(x, dy, g, dw);
}
void deconv2x_forward(const Tensor& x, const Tensor& w, std::span<const double> bias, Tensor& y) {
    if (exec_mode() == ExecMode::Reference) return serial::deconv2x_forward(x, w, bias, y);
    omp::deconv2x_forward(x, w, bias, y);
}
void deconv2x_backward_input(const Tensor& dy, const Tensor& w, Tensor& dx) {
    if (exec_mode() == ExecMode::Reference) return serial::deconv2x_backward_input(dy, w, dx);
    omp::deconv2x_backward_input(dy, w, dx);
}
void deconv2x_backward_weight(const Tensor& x, const Tensor& dy, Tensor& dw) {
    if (exec_mode() == ExecMode::Reference) return serial::deconv2x_backward_weight(x, dy, dw);
    omp::deconv2x_backward_weight(x, dy, dw);
}

}  // namespace purnet::kernels
