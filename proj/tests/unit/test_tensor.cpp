// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "gradcheck.hpp"
#include "purnet/tensor.hpp"

using namespace purnet;

TEST_CASE("tensor indexing is channel-fastest") {
    Tensor t(2, 3, 4);
    t(1, 2, 3) = 5.0;
    CHECK(t[(1 * 3 + 2) * 4 + 3] == 5.0);
    CHECK(t.pixel(1, 2)[3] == 5.0);
    CHECK(t.sum() == 5.0);
}

TEST_CASE("shape mismatch is reported") {
    CHECK_THROWS_AS(require_same_shape(Tensor(2, 2, 1), Tensor(2, 3, 1), "x"), ShapeError);
    CHECK_THROWS_AS(Tensor(Shape{2, 2, 1}, std::vector<double>(3)), ShapeError);
}

TEST_CASE("bilinear resize keeps constants and matches half-pixel sampling") {
    Tensor c(5, 7, 2, 0.25);
    Tensor r = resize_bilinear(c, 11, 3);
    for (double v : r.values()) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));

    // 1D ramp 0,1 upsampled to 4 samples: centers at -0.25, 0.25, 0.75, 1.25 clamp to [0, 1].
    Tensor ramp(1, 2, 1);
    ramp(0, 1, 0) = 1.0;
    Tensor up = resize_bilinear(ramp, 1, 4);
    CHECK(up(0, 0, 0) == doctest::Approx(0.0));
    CHECK(up(0, 1, 0) == doctest::Approx(0.25));
    CHECK(up(0, 2, 0) == doctest::Approx(0.75));
    CHECK(up(0, 3, 0) == doctest::Approx(1.0));
}

TEST_CASE("nearest resize preserves binary values") {
    std::mt19937_64 rng(3);
    Tensor m = testing::random_mask({13, 9, 1}, rng);
    Tensor r = resize_nearest(m, 32, 32);
    for (double v : r.values()) CHECK((v == 0.0 || v == 1.0));
    CHECK(resize_nearest(m, 13, 9).values().size() == m.size());
}

TEST_CASE("horizontal flip is an involution") {
    std::mt19937_64 rng(4);
    Tensor t = testing::random_tensor({4, 5, 3}, rng);
    Tensor f = flip_horizontal(t);
    CHECK(f(1, 0, 2) == t(1, 4, 2));
    Tensor ff = flip_horizontal(f);
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(ff[i] == t[i]);
}
