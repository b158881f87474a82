// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kernels_common.hpp"
#include "purnet/kernels.hpp"

namespace purnet::kernels {

int max_threads() noexcept {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace omp {

namespace {
// Minimum multiply-adds for a parallel region.
constexpr long kParallelThreshold = 1L << 15;
}

void conv2d_forward(const Tensor& x, const Tensor& w, std::span<const double> bias, ConvGeometry g, Tensor& y) {
    const detail::ConvDims d = detail::check_conv(x, w, bias, g, y);
    const long work = static_cast<long>(d.oh) * d.ow * g.taps() * d.ic * d.oc;
#pragma omp parallel for schedule(static) if (work > kParallelThreshold)
    for (int oy = 0; oy < d.oh; ++oy) {
        for (int ox = 0; ox < d.ow; ++ox) {
            detail::conv_pixel(x, w, bias, g, d, oy, ox, y.pixel(oy, ox));
        }
    }
}

void conv2d_backward_input(const Tensor& dy, const Tensor& w, ConvGeometry g, Tensor& dx) {
    const detail::ConvDims d = detail::check_conv_backward(dx, w, g, dy);
    const std::vector<double> wt = detail::transpose_taps(w);
    const long work = static_cast<long>(d.oh) * d.ow * g.taps() * d.ic * d.oc;
#pragma omp parallel for schedule(static) if (work > kParallelThreshold)
    for (int iy = 0; iy < d.ih; ++iy) {
        for (int ix = 0; ix < d.iw; ++ix) {
            detail::conv_grad_input_pixel(dy, wt, g, d, iy, ix, dx.pixel(iy, ix));
        }
    }
}

void conv2d_backward_weight(const Tensor& x, const Tensor& dy, ConvGeometry g, Tensor& dw) {
    const detail::ConvDims d = detail::check_conv_backward(x, dw, g, dy);
    const int pad = g.pad();
    const int rows = g.taps() * d.ic;
    const long work = static_cast<long>(d.oh) * d.ow * rows * d.oc;
    // Each (tap, in-channel) row of dw is owned by one thread and still
    // accumulates over output pixels in raster order, as in the serial kernel.
#pragma omp parallel for schedule(static) if (work > kParallelThreshold)
    for (int r = 0; r < rows; ++r) {
        const int tap = r / d.ic;
        const int ci = r % d.ic;
        const int ky = tap / g.kernel;
        const int kx = tap % g.kernel;
        double* row = dw.data() + static_cast<std::size_t>(r) * d.oc;
        for (int oy = 0; oy < d.oh; ++oy) {
            const int iy = oy * g.stride - pad + ky * g.dilation;
            if (iy < 0 || iy >= d.ih) continue;
            for (int ox = 0; ox < d.ow; ++ox) {
                const int ix = ox * g.stride - pad + kx * g.dilation;
                if (ix < 0 || ix >= d.iw) continue;
                const double v = x(iy, ix, ci);
                const double* grad = dy.pixel(oy, ox);
                detail::axpy(row, grad, v, d.oc);
            }
        }
    }
}

void deconv2x_forward(const Tensor& x, const Tensor& w, std::span<const double> bias, Tensor& y) {
    const detail::DeconvDims d = detail::check_deconv(x, w, bias, y);
    const long work = static_cast<long>(d.ih) * d.iw * 4 * d.ic * d.oc;
#pragma omp parallel for schedule(static) if (work > kParallelThreshold)
    for (int iy = 0; iy < d.ih; ++iy) {
        for (int ix = 0; ix < d.iw; ++ix) {
            detail::deconv_pixel(x, w, bias, d, iy, ix, y);
        }
    }
}

void deconv2x_backward_input(const Tensor& dy, const Tensor& w, Tensor& dx) {
    const detail::DeconvDims d = detail::check_deconv_backward(dx, w, dy);
    const std::vector<double> wt = detail::transpose_taps(w);
    const long work = static_cast<long>(d.ih) * d.iw * 4 * d.ic * d.oc;
#pragma omp parallel for schedule(static) if (work > kParallelThreshold)
    for (int iy = 0; iy < d.ih; ++iy) {
        for (int ix = 0; ix < d.iw; ++ix) {
            detail::deconv_grad_input_pixel(dy, wt, d, iy, ix, dx.pixel(iy, ix));
        }
    }
}

void deconv2x_backward_weight(const Tensor& x, const Tensor& dy, Tensor& dw) {
    const detail::DeconvDims d = detail::check_deconv_backward(x, dw, dy);
    const int rows = 4 * d.ic;
    const long work = static_cast<long>(d.ih) * d.iw * rows * d.oc;
#pragma omp parallel for schedule(static) if (work > kParallelThreshold)
    for (int r = 0; r < rows; ++r) {
        const int tap = r / d.ic;
        const int ci = r % d.ic;
        double* row = dw.data() + static_cast<std::size_t>(r) * d.oc;
        for (int iy = 0; iy < d.ih; ++iy) {
            for (int ix = 0; ix < d.iw; ++ix) {
                const double v = x(iy, ix, ci);
                const double* grad = dy.pixel(2 * iy + tap / 2, 2 * ix + tap % 2);
                detail::axpy(row, grad, v, d.oc);
            }
        }
    }
}

}  // namespace omp
}  // namespace purnet::kernels
