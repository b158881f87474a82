// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>

#include "purnet/config.hpp"

using namespace purnet;
using nlohmann::json;

TEST_CASE("defaults validate") {
    CHECK_NOTHROW(TrainConfig{}.validate());
    ExperimentConfig c;
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("train config validation") {
    TrainConfig c;
    c.stage_iters[1] = -1;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.momentum = 1.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.base_lr = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.batch_size = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    ExperimentConfig e;
    e.train.input_size = 40;
    CHECK_THROWS_WITH_AS(e.validate(), doctest::Contains("final stride"), InvalidArgument);
    e = {};
    e.slic.n_regions = 64 * 64 + 1;
    CHECK_THROWS_AS(e.validate(), InvalidArgument);
}

TEST_CASE("json round trip") {
    ExperimentConfig c;
    c.train.stage_iters = {3, 4, 5};
    c.train.seed = 42;
    c.encoder.lateral_channels = 12;
    c.slic.n_regions = 100;
    c.dataset = "/data/set";
    c.output_dir = "/out";
    c.cache_dir = "/cache";
    const ExperimentConfig back = experiment_config_from_json(to_json(c));
    CHECK(back.train == c.train);
    CHECK(back.encoder == c.encoder);
    CHECK(back.slic.n_regions == 100);
    CHECK(back.dataset == c.dataset);
    CHECK(back.output_dir == c.output_dir);
    CHECK(back.cache_dir == c.cache_dir);
    CHECK(canonical_model_config(back) == canonical_model_config(c));
}

TEST_CASE("strict parsing") {
    const json base = {{"dataset", "d"}};
    CHECK(experiment_config_from_json(base).output_dir == "purnet_out");
    CHECK(experiment_config_from_json(base, "/root/x").dataset == "/root/x/d");
    CHECK(experiment_config_from_json({{"dataset", "/abs"}}, "/root/x").dataset == "/abs");
    CHECK_THROWS_WITH_AS(experiment_config_from_json(json::object()), doctest::Contains("dataset"), InvalidArgument);
    CHECK_THROWS_WITH_AS(experiment_config_from_json({{"dataset", "d"}, {"lr", 1}}), doctest::Contains("'lr'"),
                         InvalidArgument);
    CHECK_THROWS_WITH_AS(experiment_config_from_json({{"dataset", "d"}, {"train", {{"base_lr", "high"}}}}),
                         doctest::Contains("train.base_lr"), InvalidArgument);
    CHECK_THROWS_AS(experiment_config_from_json({{"dataset", "d"}, {"train", {{"stage_iters", {1, 2}}}}}),
                    InvalidArgument);
    CHECK_THROWS_AS(experiment_config_from_json({{"dataset", "d"}, {"encoder", {{"width", 3}}}}), InvalidArgument);
    CHECK_THROWS_AS(experiment_config_from_json({{"dataset", "d"}, {"slic", {{"n_regions", 0}}}}), InvalidArgument);
    CHECK_THROWS_AS(experiment_config_from_json(json::array()), InvalidArgument);
    CHECK(train_config_from_json({{"seed", 5}}).seed == 5);
}

TEST_CASE("config files") {
    const auto dir = std::filesystem::temp_directory_path() / "purnet_test_config";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir / "data");
    auto write = [&](const std::string& text) {
        std::ofstream(dir / "c.json") << text;
        return dir / "c.json";
    };
    const ExperimentConfig c = load_experiment_config(write(R"({"dataset": "data", "train": {"seed": 3}})"));
    CHECK(c.dataset == dir / "data");
    CHECK(c.train.seed == 3);
    CHECK_THROWS_WITH_AS(load_experiment_config(write(R"({"dataset": "missing"})")), doctest::Contains("missing"),
                         InvalidArgument);
    CHECK_THROWS_WITH_AS(load_experiment_config(write("{not json")), doctest::Contains("not valid JSON"),
                         InvalidArgument);
    CHECK_THROWS_AS(load_experiment_config(dir / "absent.json"), InvalidArgument);
    std::filesystem::remove_all(dir);
}

TEST_CASE("the model config ignores paths") {
    ExperimentConfig a, b;
    a.dataset = "x";
    b.dataset = "y";
    b.output_dir = "z";
    CHECK(canonical_model_config(a) == canonical_model_config(b));
    b.train.base_lr = 2e-3;
    CHECK(canonical_model_config(a) != canonical_model_config(b));
}
