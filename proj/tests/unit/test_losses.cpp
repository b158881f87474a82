// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "gradcheck.hpp"
#include "purnet/losses.hpp"
#include "purnet/rectification.hpp"

using namespace purnet;
using testing::gradient_error;
using testing::random_mask;
using testing::random_tensor;

namespace {

// Four 2x2 blocks of a 4x4 grid.
SuperpixelSegmentation quadrants() {
    SuperpixelSegmentation s{4, 4, 4, std::vector<int>(16)};
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) s.labels[static_cast<std::size_t>(y * 4 + x)] = (y / 2) * 2 + x / 2;
    return s;
}

Tensor vec(std::vector<double> v) {
    const int n = static_cast<int>(v.size());
    return Tensor(Shape{n, 1, 1}, std::move(v));
}

double naive_kl(std::vector<double> t, std::vector<double> u, double eps = 0.0) {
    double st = 0.0, su = 0.0;
    for (double& v : t) st += (v += eps);
    for (double& v : u) su += (v += eps);
    double kl = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) kl += t[i] / st * std::log((t[i] / st) / (u[i] / su));
    return kl;
}

}  // namespace

TEST_CASE("bce of a single pixel") {
    Tensor p(1, 1, 1, 0.25), g(1, 1, 1, 1.0);
    CHECK(bce(p, g) == doctest::Approx(-std::log(0.25)).epsilon(1e-12));
    p[0] = 0.0;
    CHECK(bce(p, g) == doctest::Approx(-std::log(kProbabilityEpsilon)).epsilon(1e-12));
    CHECK(std::isfinite(bce(p, g)));
}

TEST_CASE("bce sums over pixels") {
    std::mt19937_64 rng(1);
    const Tensor p = random_tensor({3, 5, 1}, rng, 0.01, 0.99);
    const Tensor g = random_mask({3, 5, 1}, rng);
    double ref = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) ref -= g[i] * std::log(p[i]) + (1 - g[i]) * std::log(1 - p[i]);
    CHECK(bce(p, g) == doctest::Approx(ref).epsilon(1e-13));
    CHECK(ag::scalar(bce(ag::constant(p), g)) == bce(p, g));
}

TEST_CASE("ibce weights pixels by one plus the error magnitude") {
    Tensor p(1, 1, 1, 0.5), g(1, 1, 1, 1.0), e(1, 1, 1, -1.0);
    CHECK(ibce(p, g, e) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
    std::mt19937_64 rng(2);
    const Tensor pr = random_tensor({4, 4, 1}, rng, 0.0, 1.0);
    const Tensor gr = random_mask({4, 4, 1}, rng);
    CHECK(ibce(pr, gr, Tensor(4, 4, 1)) == bce(pr, gr));
    CHECK(ibce(pr, gr, random_tensor({4, 4, 1}, rng)) >= bce(pr, gr));
    CHECK_THROWS_AS(ibce(pr, gr, Tensor(2, 2, 1)), ShapeError);
}

TEST_CASE("kl divergence of normalized maps") {
    Tensor t(1, 2, 1, 0.5), u(1, 2, 1);
    u[0] = 0.25, u[1] = 0.75;
    CHECK(kl_div(t, u) == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)).epsilon(1e-5));
    CHECK(kl_div(t, u) == doctest::Approx(naive_kl({0.5, 0.5}, {0.25, 0.75})).epsilon(1e-14));
    CHECK(kl_div(u, u) == doctest::Approx(0.0).epsilon(1e-15));
    // Scale invariance from unit-sum normalization.
    Tensor t3(1, 2, 1, 1.5);
    CHECK(kl_div(t3, u) == doctest::Approx(kl_div(t, u)).epsilon(1e-12));
    CHECK_THROWS_AS(kl_div(Tensor(1, 2, 1, -1.0), u), InvalidArgument);
    CHECK_THROWS_AS(kl_div(t, Tensor(1, 3, 1, 1.0)), ShapeError);
}

TEST_CASE("kl divergence is nonnegative") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const Tensor a = random_tensor({3, 3, 1}, rng, 0.0, 1.0);
        const Tensor b = random_tensor({3, 3, 1}, rng, 0.0, 1.0);
        CHECK(kl_div(a, b) >= 0.0);
    }
}

TEST_CASE("to_positive maps signed values onto [0, 1]") {
    Tensor e(1, 3, 1);
    e[0] = -1.0, e[1] = 0.0, e[2] = 1.0;
    const Tensor n = to_positive(e);
    CHECK(n[0] == doctest::Approx(kDistributionEpsilon));
    CHECK(n[1] == doctest::Approx(0.5 + kDistributionEpsilon));
    CHECK(n[2] == doctest::Approx(1.0 + kDistributionEpsilon));
}

TEST_CASE("structural matrix") {
    const Tensor m = structural_matrix(vec({0.8, 0.2}));
    CHECK(m.shape() == Shape{2, 2, 1});
    CHECK(m(0, 0, 0) == 0.0);
    CHECK(m(0, 1, 0) == doctest::Approx(0.6));
    CHECK(m(1, 0, 0) == doctest::Approx(-0.6));
    CHECK(m(1, 1, 0) == 0.0);
    const Tensor flat = structural_matrix(vec({0.3, 0.3, 0.3}));
    for (double v : flat.values()) CHECK(v == 0.0);
    std::mt19937_64 rng(4);
    const Tensor r = structural_matrix(random_tensor({7, 1, 1}, rng));
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) CHECK(r(i, j, 0) == -r(j, i, 0));
}

TEST_CASE("ssl two-region oracle") {
    SuperpixelSegmentation seg{1, 2, 2, {0, 1}};
    Tensor g(1, 2, 1), p(1, 2, 1);
    g[0] = 1.0, g[1] = 0.0;
    p[0] = 0.6, p[1] = 0.4;
    const double oracle = naive_kl({0.5, 1.0, 0.0, 0.5}, {0.5, 0.6, 0.4, 0.5}, kDistributionEpsilon);
    CHECK(std::abs(ssl(p, g, seg) - oracle) < 1e-12);
}

TEST_CASE("ssl depends only on region structure") {
    const SuperpixelSegmentation seg = quadrants();
    std::mt19937_64 rng(5);
    const Tensor g = random_mask({4, 4, 1}, rng);
    CHECK(ssl(g, g, seg) < 1e-12);
    CHECK(ssl(Tensor(4, 4, 1, 0.2), Tensor(4, 4, 1, 0.9), seg) < 1e-12);

    // Same region means, different pixels.
    Tensor p(4, 4, 1, 0.5), q(4, 4, 1, 0.5);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) p(y, x, 0) = (x % 2 == 0) ? 0.3 : 0.7;
    }
    CHECK(ssl(p, q, seg) < 1e-12);

    // Joint shift of both maps.
    const Tensor a = random_tensor({4, 4, 1}, rng, 0.2, 0.6);
    const Tensor b = random_tensor({4, 4, 1}, rng, 0.2, 0.6);
    Tensor a2 = a, b2 = b;
    for (double& v : a2.values()) v += 0.3;
    for (double& v : b2.values()) v += 0.3;
    CHECK(ssl(a, b, seg) == doctest::Approx(ssl(a2, b2, seg)).epsilon(1e-12));

    SuperpixelSegmentation one{4, 4, 1, std::vector<int>(16, 0)};
    CHECK(ssl(a, b, one) == 0.0);
    CHECK_THROWS_AS(ssl(Tensor(2, 2, 1), Tensor(2, 2, 1), seg), ShapeError);
}

TEST_CASE("loss gradients match finite differences") {
    std::mt19937_64 rng(6);
    const Tensor g = random_mask({4, 4, 1}, rng);
    const Tensor e = random_tensor({4, 4, 1}, rng);
    const Tensor p = random_tensor({4, 4, 1}, rng, 0.05, 0.95);
    const SuperpixelSegmentation seg = quadrants();
    CHECK(gradient_error([&](const ag::Var& v) { return bce(v, g); }, p) < 1e-6);
    CHECK(gradient_error([&](const ag::Var& v) { return ibce(v, g, e); }, p) < 1e-6);
    CHECK(gradient_error([&](const ag::Var& v) { return kl_div(to_positive(e), to_positive(v)); },
                         random_tensor({4, 4, 1}, rng)) < 1e-6);
    CHECK(gradient_error([&](const ag::Var& v) { return ssl(v, g, seg); }, p) < 1e-6);
    const Tensor target = to_positive(structural_matrix(random_tensor({4, 1, 1}, rng, 0.0, 1.0)));
    CHECK(gradient_error([&](const ag::Var& v) { return kl_div(target, to_positive(structural_matrix(v))); },
                         random_tensor({4, 1, 1}, rng, 0.0, 1.0)) < 1e-6);
}

TEST_CASE("ibce passes no gradient into its error map") {
    std::mt19937_64 rng(7);
    const ag::Var p = ag::leaf(random_tensor({2, 2, 1}, rng, 0.1, 0.9), true);
    const ag::Var e = ag::leaf(random_tensor({2, 2, 1}, rng), true);
    ag::backward(ibce(p, Tensor(2, 2, 1, 1.0), e->value));
    CHECK(p->has_grad());
    CHECK_FALSE(e->has_grad());
}

TEST_CASE("clamped probabilities have zero gradient") {
    const ag::Var p = ag::leaf(Tensor(1, 2, 1, 0.0), true);
    p->value[1] = 0.5;
    ag::backward(bce(p, Tensor(1, 2, 1, 1.0)));
    CHECK(p->grad[0] == 0.0);
    CHECK(p->grad[1] == doctest::Approx(-2.0));
}

TEST_CASE("loss bundle finiteness") {
    LossBundle b{1, 2, 3, 4, 5, 15};
    CHECK(b.all_finite());
    b.l_ss = std::nan("");
    CHECK_FALSE(b.all_finite());
}
