// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstring>

#include "gradcheck.hpp"
#include "purnet/kernels.hpp"

using namespace purnet;
using kernels::ConvGeometry;

namespace {

// Direct definition: y[oy,ox,co] = b[co] + sum w[ky*k+kx, ci, co] x[oy*s - p + ky*d, ox*s - p + kx*d, ci].
Tensor naive_conv(const Tensor& x, const Tensor& w, const Tensor& b, ConvGeometry g) {
    const int oh = g.out_size(x.height()), ow = g.out_size(x.width()), oc = w.channels();
    Tensor y(oh, ow, oc);
    for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox)
            for (int co = 0; co < oc; ++co) {
                long double s = b[static_cast<std::size_t>(co)];
                for (int ky = 0; ky < g.kernel; ++ky)
                    for (int kx = 0; kx < g.kernel; ++kx) {
                        const int iy = oy * g.stride - g.pad() + ky * g.dilation;
                        const int ix = ox * g.stride - g.pad() + kx * g.dilation;
                        if (iy < 0 || ix < 0 || iy >= x.height() || ix >= x.width()) continue;
                        for (int ci = 0; ci < x.channels(); ++ci) s += w(ky * g.kernel + kx, ci, co) * x(iy, ix, ci);
                    }
                y(oy, ox, co) = static_cast<double>(s);
            }
    return y;
}

Tensor naive_deconv(const Tensor& x, const Tensor& w, const Tensor& b) {
    Tensor y(2 * x.height(), 2 * x.width(), w.channels());
    for (int oy = 0; oy < y.height(); ++oy)
        for (int ox = 0; ox < y.width(); ++ox)
            for (int co = 0; co < y.channels(); ++co) {
                double s = b[static_cast<std::size_t>(co)];
                const int tap = (oy % 2) * 2 + ox % 2;
                for (int ci = 0; ci < x.channels(); ++ci) s += w(tap, ci, co) * x(oy / 2, ox / 2, ci);
                y(oy, ox, co) = s;
            }
    return y;
}

double dot(const Tensor& a, const Tensor& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

bool same_bits(const Tensor& a, const Tensor& b) {
    return a.shape() == b.shape() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

void check_close(const Tensor& a, const Tensor& b, double tol) {
    REQUIRE(a.shape() == b.shape());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(tol).scale(1.0));
}

}  // namespace

TEST_CASE("conv geometry keeps size for stride 1 and halves it for stride 2") {
    CHECK(ConvGeometry{3, 1, 1}.out_size(17) == 17);
    CHECK(ConvGeometry{3, 1, 4}.out_size(17) == 17);
    CHECK(ConvGeometry{1, 1, 1}.out_size(5) == 5);
    CHECK(ConvGeometry{3, 2, 1}.out_size(16) == 8);
}

TEST_CASE("convolution kernels match the direct definition and each other") {
    std::mt19937_64 rng(11);
    const ConvGeometry geoms[] = {{3, 1, 1}, {3, 2, 1}, {3, 1, 2}, {1, 1, 1}, {3, 1, 4}};
    for (const ConvGeometry g : geoms) {
        CAPTURE(g.kernel);
        CAPTURE(g.stride);
        CAPTURE(g.dilation);
        const Tensor x = testing::random_tensor({12, 10, 5}, rng);
        const Tensor w = testing::random_tensor({g.taps(), 5, 7}, rng);
        const Tensor b = testing::random_tensor({7, 1, 1}, rng);
        const int oh = g.out_size(12), ow = g.out_size(10);
        Tensor ys(oh, ow, 7), yo(oh, ow, 7);
        kernels::serial::conv2d_forward(x, w, b.values(), g, ys);
        kernels::omp::conv2d_forward(x, w, b.values(), g, yo);
        check_close(ys, naive_conv(x, w, b, g), 1e-12);
        CHECK(same_bits(ys, yo));

        // Adjoint identities: <conv(x), dy> = <x, conv^T(dy)> and likewise for w.
        const Tensor dy = testing::random_tensor({oh, ow, 7}, rng);
        Tensor zero_b(7, 1, 1);
        Tensor y0(oh, ow, 7);
        kernels::serial::conv2d_forward(x, w, zero_b.values(), g, y0);
        Tensor dxs(x.shape()), dxo(x.shape()), dws(w.shape()), dwo(w.shape());
        kernels::serial::conv2d_backward_input(dy, w, g, dxs);
        kernels::omp::conv2d_backward_input(dy, w, g, dxo);
        kernels::serial::conv2d_backward_weight(x, dy, g, dws);
        kernels::omp::conv2d_backward_weight(x, dy, g, dwo);
        CHECK(dot(y0, dy) == doctest::Approx(dot(x, dxs)).epsilon(1e-12));
        CHECK(dot(y0, dy) == doctest::Approx(dot(w, dws)).epsilon(1e-12));
        CHECK(same_bits(dxs, dxo));
        CHECK(same_bits(dws, dwo));
    }
}

TEST_CASE("deconvolution kernels match the direct definition and each other") {
    std::mt19937_64 rng(12);
    const Tensor x = testing::random_tensor({5, 6, 4}, rng);
    const Tensor w = testing::random_tensor({4, 4, 3}, rng);
    const Tensor b = testing::random_tensor({3, 1, 1}, rng);
    Tensor ys(10, 12, 3), yo(10, 12, 3);
    kernels::serial::deconv2x_forward(x, w, b.values(), ys);
    kernels::omp::deconv2x_forward(x, w, b.values(), yo);
    check_close(ys, naive_deconv(x, w, b), 1e-13);
    CHECK(same_bits(ys, yo));

    const Tensor dy = testing::random_tensor({10, 12, 3}, rng);
    Tensor y0(10, 12, 3), zero_b(3, 1, 1);
    kernels::serial::deconv2x_forward(x, w, zero_b.values(), y0);
    Tensor dxs(x.shape()), dxo(x.shape()), dws(w.shape()), dwo(w.shape());
    kernels::serial::deconv2x_backward_input(dy, w, dxs);
    kernels::omp::deconv2x_backward_input(dy, w, dxo);
    kernels::serial::deconv2x_backward_weight(x, dy, dws);
    kernels::omp::deconv2x_backward_weight(x, dy, dwo);
    CHECK(dot(y0, dy) == doctest::Approx(dot(x, dxs)).epsilon(1e-12));
    CHECK(dot(y0, dy) == doctest::Approx(dot(w, dws)).epsilon(1e-12));
    CHECK(same_bits(dxs, dxo));
    CHECK(same_bits(dws, dwo));
}

TEST_CASE("large problems take the parallel path and still agree bitwise") {
    std::mt19937_64 rng(13);
    const ConvGeometry g{3, 1, 1};
    const Tensor x = testing::random_tensor({40, 40, 16}, rng);
    const Tensor w = testing::random_tensor({9, 16, 16}, rng);
    Tensor ys(40, 40, 16), yo(40, 40, 16);
    kernels::serial::conv2d_forward(x, w, {}, g, ys);
    kernels::omp::conv2d_forward(x, w, {}, g, yo);
    CHECK(same_bits(ys, yo));
}

TEST_CASE("dispatch follows the execution mode") {
    CHECK(kernels::exec_mode() == kernels::ExecMode::Parallel);
    {
        kernels::ScopedExecMode scoped(kernels::ExecMode::Reference);
        CHECK(kernels::exec_mode() == kernels::ExecMode::Reference);
    }
    CHECK(kernels::exec_mode() == kernels::ExecMode::Parallel);
}

TEST_CASE("kernels reject inconsistent shapes") {
    const ConvGeometry g{3, 1, 1};
    Tensor x(4, 4, 2), w(9, 3, 2), y(4, 4, 2);
    CHECK_THROWS_AS(kernels::conv2d_forward(x, w, {}, g, y), ShapeError);
    Tensor w2(9, 2, 2), ybad(3, 4, 2);
    CHECK_THROWS_AS(kernels::conv2d_forward(x, w2, {}, g, ybad), ShapeError);
    Tensor dw(4, 2, 2), ydeconv(7, 8, 2);
    CHECK_THROWS_AS(kernels::deconv2x_forward(x, dw, {}, ydeconv), ShapeError);
}
