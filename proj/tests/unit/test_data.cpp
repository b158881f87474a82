// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "gradcheck.hpp"
#include "purnet/image_io.hpp"
#include "purnet/synthetic.hpp"

using namespace purnet;

namespace {

Sample random_sample(int h, int w, std::mt19937_64& rng) {
    return {"s", testing::random_tensor({h, w, 3}, rng, 0.0, 1.0), testing::random_mask({h, w, 1}, rng),
            std::nullopt};
}

std::filesystem::path fresh_dir(const char* name) {
    const auto d = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("mask binarization") {
    Tensor gray(Shape{1, 4, 1}, {0.0, 127.0, 128.0, 255.0});
    const Tensor m = binarize_mask(gray);
    CHECK(m[0] == 0.0);
    CHECK(m[1] == 0.0);
    CHECK(m[2] == 1.0);
    CHECK(m[3] == 1.0);
    CHECK_THROWS_AS(binarize_mask(Tensor(2, 2, 3)), ShapeError);
}

TEST_CASE("resize to the training resolution") {
    std::mt19937_64 rng(1);
    const Sample s = random_sample(48, 64, rng);
    const Sample r = resize_sample(s, 32);
    CHECK(r.image.shape() == Shape{32, 32, 3});
    CHECK(r.mask.shape() == Shape{32, 32, 1});
    for (double v : r.mask.values()) CHECK((v == 0.0 || v == 1.0));
    for (double v : r.image.values()) CHECK((v >= 0.0 && v <= 1.0));
    CHECK_FALSE(r.segmentation.has_value());

    Sample same = random_sample(16, 16, rng);
    same.segmentation = SuperpixelSegmentation{16, 16, 1, std::vector<int>(256, 0)};
    const Sample kept = resize_sample(same, 16);
    CHECK(kept.segmentation.has_value());
    for (std::size_t i = 0; i < same.image.size(); ++i) CHECK(kept.image[i] == same.image[i]);

    Sample bad = s;
    bad.mask = Tensor(10, 10, 1);
    CHECK_THROWS_AS(resize_sample(bad, 32), ShapeError);
    CHECK_THROWS_AS(resize_sample(s, 0), InvalidArgument);
}

TEST_CASE("augmentation flips image, mask and segmentation together") {
    std::mt19937_64 trng(2);
    Sample s = random_sample(4, 5, trng);
    s.segmentation = SuperpixelSegmentation{4, 5, 2, std::vector<int>(20, 0)};
    for (int y = 0; y < 4; ++y) s.segmentation->labels[static_cast<std::size_t>(y * 5)] = 1;
    Rng rng(3);
    int flips = 0;
    for (int k = 0; k < 64; ++k) {
        const Sample a = augment(s, rng);
        const bool flipped = a.image(0, 0, 0) != s.image(0, 0, 0);
        flips += flipped;
        if (!flipped) continue;
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 5; ++x) {
                CHECK(a.image(y, x, 1) == s.image(y, 4 - x, 1));
                CHECK(a.mask(y, x, 0) == s.mask(y, 4 - x, 0));
                CHECK(a.segmentation->at(y, x) == s.segmentation->at(y, 4 - x));
            }
    }
    CHECK(flips > 16);
    CHECK(flips < 48);
}

TEST_CASE("batch sampler covers each epoch once") {
    BatchSampler sampler(10, 8, 4);
    const auto a = sampler.next();
    const auto b = sampler.next();
    CHECK(a.size() == 8);
    CHECK(b.size() == 2);
    std::set<std::size_t> seen(a.begin(), a.end());
    seen.insert(b.begin(), b.end());
    CHECK(seen.size() == 10);
    CHECK(sampler.epoch() == 0);
    sampler.next();
    CHECK(sampler.epoch() == 1);

    BatchSampler x(10, 3, 9), y(10, 3, 9), z(10, 3, 10);
    bool differs = false;
    for (int k = 0; k < 8; ++k) {
        const auto bx = x.next();
        CHECK(bx == y.next());
        differs = differs || bx != z.next();
    }
    CHECK(differs);
    CHECK_THROWS_AS(BatchSampler(0, 1, 0), InvalidArgument);
    CHECK_THROWS_AS(BatchSampler(3, 0, 0), InvalidArgument);
}

TEST_CASE("synthetic dataset") {
    const std::vector<Sample> a = synthetic_dataset();
    const std::vector<Sample> b = synthetic_dataset();
    REQUIRE(a.size() == 8);
    for (std::size_t k = 0; k < a.size(); ++k) {
        validate_sample(a[k]);
        CHECK(a[k].image.shape() == Shape{64, 64, 3});
        CHECK(a[k].id == b[k].id);
        for (std::size_t i = 0; i < a[k].image.size(); ++i) CHECK(a[k].image[i] == b[k].image[i]);
        const double fg = a[k].mask.sum() / 4096.0;
        CHECK((fg > 0.05 && fg < 0.7));
    }
    CHECK(a[0].id == "synth_000");
}

TEST_CASE("dataset round trip through image files") {
    const auto root = fresh_dir("purnet_test_dataset");
    const std::vector<Sample> s = synthetic_dataset({3, 32, 5});
    io::write_dataset(root, s);
    const std::vector<Sample> back = io::load_dataset(root);
    REQUIRE(back.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(back[k].id == s[k].id);
        for (std::size_t i = 0; i < s[k].mask.size(); ++i) CHECK(back[k].mask[i] == s[k].mask[i]);
        for (std::size_t i = 0; i < s[k].image.size(); ++i)
            CHECK(std::abs(back[k].image[i] - s[k].image[i]) <= 0.5 / 255.0 + 1e-12);
    }

    std::filesystem::copy_file(root / "masks" / "synth_000.png", root / "masks" / "orphan.png");
    CHECK_THROWS_WITH_AS(io::load_dataset(root), doctest::Contains("orphan"), InvalidArgument);
    std::filesystem::remove(root / "masks" / "orphan.png");
    std::filesystem::remove(root / "masks" / "synth_001.png");
    CHECK_THROWS_WITH_AS(io::load_dataset(root), doctest::Contains("synth_001"), InvalidArgument);
    CHECK_THROWS_AS(io::load_dataset(root / "nowhere"), InvalidArgument);
    std::filesystem::remove_all(root);
}

TEST_CASE("map files quantize to eight bits") {
    const auto dir = fresh_dir("purnet_test_maps");
    Tensor m(Shape{1, 4, 1}, {0.0, 0.5, 1.0, 1.7});
    io::write_map(dir / "m.png", m);
    const Tensor r = io::read_map(dir / "m.png");
    CHECK(r[0] == 0.0);
    CHECK(r[1] == doctest::Approx(128.0 / 255.0));
    CHECK(r[2] == 1.0);
    CHECK(r[3] == 1.0);
    CHECK_THROWS_AS(io::read_map(dir / "missing.png"), InvalidArgument);
    std::filesystem::remove_all(dir);
}

TEST_CASE("prediction pairing reports unmatched files") {
    const auto pred = fresh_dir("purnet_test_pred"), gt = fresh_dir("purnet_test_gt");
    io::write_map(pred / "a.png", Tensor(4, 4, 1, 0.5));
    io::write_map(gt / "a.png", Tensor(4, 4, 1, 1.0));
    const io::PairedMaps p = io::load_prediction_pairs(pred, gt);
    CHECK(p.ids == std::vector<std::string>{"a"});
    io::write_map(gt / "b.png", Tensor(4, 4, 1, 1.0));
    CHECK_THROWS_WITH_AS(io::load_prediction_pairs(pred, gt), doctest::Contains("b"), InvalidArgument);
    io::write_map(pred / "b.png", Tensor(4, 5, 1, 1.0));
    CHECK_THROWS_AS(io::load_prediction_pairs(pred, gt), ShapeError);
    std::filesystem::remove_all(pred);
    std::filesystem::remove_all(gt);
}

TEST_CASE("horizontal flip is an involution") {
    std::mt19937_64 rng(6);
    const Tensor t = testing::random_tensor({3, 7, 3}, rng);
    const Tensor back = flip_horizontal(flip_horizontal(t));
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(back[i] == t[i]);
}
