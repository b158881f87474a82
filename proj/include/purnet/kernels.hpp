// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "purnet/tensor.hpp"

// Convolution kernels come in two builds with identical signatures:
//   kernels::serial  - plain loops, the reference used by tests
//   kernels::omp     - OpenMP-parallel over independent output rows / weight taps
// Both accumulate every output element in the same order, so their results are
// bitwise identical. The unqualified kernels::* entry points dispatch on the
// process-wide execution mode.

namespace purnet::kernels {

/// Square "same"-padded convolution geometry.
struct ConvGeometry {
    int kernel = 3;
    int stride = 1;
    int dilation = 1;

    int pad() const noexcept { return dilation * (kernel - 1) / 2; }
    int out_size(int in) const noexcept { return (in + 2 * pad() - dilation * (kernel - 1) - 1) / stride + 1; }
    int taps() const noexcept { return kernel * kernel; }
};

enum class ExecMode { Reference, Parallel };

void set_exec_mode(ExecMode mode) noexcept;
ExecMode exec_mode() noexcept;

/// RAII switch of the execution mode.
class ScopedExecMode {
public:
    explicit ScopedExecMode(ExecMode mode) noexcept : previous_(exec_mode()) { set_exec_mode(mode); }
    ~ScopedExecMode() { set_exec_mode(previous_); }
    ScopedExecMode(const ScopedExecMode&) = delete;
    ScopedExecMode& operator=(const ScopedExecMode&) = delete;

private:
    ExecMode previous_;
};

// Weight layout: {taps, in_channels, out_channels}; tap = ky * kernel + kx.
// Deconvolution (2x2, stride 2) uses the same layout with taps = 4, tap = dy * 2 + dx.

#define PURNET_KERNEL_DECLS                                                                                       \
    void conv2d_forward(const Tensor& x, const Tensor& w, std::span<const double> bias, ConvGeometry g,        \
                        Tensor& y);                                                                            \
    void conv2d_backward_input(const Tensor& dy, const Tensor& w, ConvGeometry g, Tensor& dx);                \
    void conv2d_backward_weight(const Tensor& x, const Tensor& dy, ConvGeometry g, Tensor& dw);               \
    void deconv2x_forward(const Tensor& x, const Tensor& w, std::span<const double> bias, Tensor& y);          \
    void deconv2x_backward_input(const Tensor& dy, const Tensor& w, Tensor& dx);                              \
    void deconv2x_backward_weight(const Tensor& x, const Tensor& dy, Tensor& dw);

namespace serial {
PURNET_KERNEL_DECLS
}
namespace omp {
PURNET_KERNEL_DECLS
}
PURNET_KERNEL_DECLS

#undef PURNET_KERNEL_DECLS

// All outputs must be pre-sized. Forward kernels overwrite y; backward kernels
// accumulate (+=) into dx / dw.

/// Number of worker threads the OpenMP build will use (1 without OpenMP).
int max_threads() noexcept;

}  // namespace purnet::kernels
