// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "purnet/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>

namespace purnet {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw InvalidArgument(where + ": expected an object");
}

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
        if (!known) throw InvalidArgument(where + ": unknown key '" + it.key() + "'");
    }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidArgument(where + "." + key + ": wrong type");
    }
}

}  // namespace

void TrainConfig::validate() const {
    for (int it : stage_iters)
        if (it < 0) throw InvalidArgument("train.stage_iters must be nonnegative");
    if (!(base_lr > 0.0) || !(head_lr_multiplier > 0.0)) throw InvalidArgument("train learning rates must be positive");
    if (momentum < 0.0 || momentum >= 1.0) throw InvalidArgument("train.momentum must lie in [0, 1)");
    if (weight_decay < 0.0) throw InvalidArgument("train.weight_decay must be nonnegative");
    if (!(poly_power > 0.0)) throw InvalidArgument("train.poly_power must be positive");
    if (batch_size < 1) throw InvalidArgument("train.batch_size must be positive");
    if (input_size < 1) throw InvalidArgument("train.input_size must be positive");
}

void ExperimentConfig::validate() const {
    train.validate();
    encoder.validate();
    if (train.input_size % encoder.final_stride() != 0) {
        throw InvalidArgument("train.input_size must be divisible by the encoder's final stride " +
                              std::to_string(encoder.final_stride()));
    }
    if (slic.n_regions < 1 || slic.n_regions > train.input_size * train.input_size) {
        throw InvalidArgument("slic.n_regions must lie in [1, input_size^2]");
    }
    if (!(slic.compactness > 0.0) || slic.iterations < 1) throw InvalidArgument("slic parameters must be positive");
}

json to_json(const TrainConfig& c) {
    return {{"stage_iters", c.stage_iters},   {"base_lr", c.base_lr},       {"head_lr_multiplier", c.head_lr_multiplier},
            {"momentum", c.momentum},         {"weight_decay", c.weight_decay}, {"poly_power", c.poly_power},
            {"batch_size", c.batch_size},     {"input_size", c.input_size}, {"seed", c.seed}};
}

json to_json(const EncoderConfig& c) {
    return {{"stage_channels", c.stage_channels},
            {"stage_strides", c.stage_strides},
            {"stage_dilations", c.stage_dilations},
            {"lateral_channels", c.lateral_channels}};
}

json to_json(const SlicParams& c) {
    return {{"n_regions", c.n_regions}, {"compactness", c.compactness}, {"iterations", c.iterations}};
}

json to_json(const ExperimentConfig& c) {
    json j{{"train", to_json(c.train)},
           {"encoder", to_json(c.encoder)},
           {"slic", to_json(c.slic)},
           {"dataset", c.dataset.string()},
           {"output_dir", c.output_dir.string()}};
    if (c.cache_dir) j["cache_dir"] = c.cache_dir->string();
    return j;
}

TrainConfig train_config_from_json(const json& j) {
    require_object(j, "train");
    reject_unknown(j, "train",
                   {"stage_iters", "base_lr", "head_lr_multiplier", "momentum", "weight_decay", "poly_power",
                    "batch_size", "input_size", "seed"});
    TrainConfig c;
    read(j, "stage_iters", c.stage_iters, "train");
    read(j, "base_lr", c.base_lr, "train");
    read(j, "head_lr_multiplier", c.head_lr_multiplier, "train");
    read(j, "momentum", c.momentum, "train");
    read(j, "weight_decay", c.weight_decay, "train");
    read(j, "poly_power", c.poly_power, "train");
    read(j, "batch_size", c.batch_size, "train");
    read(j, "input_size", c.input_size, "train");
    read(j, "seed", c.seed, "train");
    return c;
}

EncoderConfig encoder_config_from_json(const json& j) {
    require_object(j, "encoder");
    reject_unknown(j, "encoder", {"stage_channels", "stage_strides", "stage_dilations", "lateral_channels"});
    EncoderConfig c = EncoderConfig::tiny();
    read(j, "stage_channels", c.stage_channels, "encoder");
    read(j, "stage_strides", c.stage_strides, "encoder");
    read(j, "stage_dilations", c.stage_dilations, "encoder");
    read(j, "lateral_channels", c.lateral_channels, "encoder");
    return c;
}

SlicParams slic_params_from_json(const json& j) {
    require_object(j, "slic");
    reject_unknown(j, "slic", {"n_regions", "compactness", "iterations"});
    SlicParams c;
    read(j, "n_regions", c.n_regions, "slic");
    read(j, "compactness", c.compactness, "slic");
    read(j, "iterations", c.iterations, "slic");
    return c;
}

ExperimentConfig experiment_config_from_json(const json& j, const std::filesystem::path& base_dir) {
    require_object(j, "config");
    reject_unknown(j, "config", {"train", "encoder", "slic", "dataset", "output_dir", "cache_dir"});
    ExperimentConfig c;
    if (j.contains("train")) c.train = train_config_from_json(j["train"]);
    if (j.contains("encoder")) c.encoder = encoder_config_from_json(j["encoder"]);
    if (j.contains("slic")) c.slic = slic_params_from_json(j["slic"]);
    auto path_of = [&](const char* key) {
        std::string s;
        read(j, key, s, "config");
        std::filesystem::path p(s);
        return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    };
    if (!j.contains("dataset")) throw InvalidArgument("config: missing key 'dataset'");
    c.dataset = path_of("dataset");
    c.output_dir = j.contains("output_dir") ? path_of("output_dir") : std::filesystem::path("purnet_out");
    if (j.contains("cache_dir")) c.cache_dir = path_of("cache_dir");
    c.validate();
    return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidArgument("config " + path.string() + " is not valid JSON: " + e.what());
    }
    ExperimentConfig c = experiment_config_from_json(j, path.parent_path());
    if (!std::filesystem::is_directory(c.dataset)) {
        throw InvalidArgument("config dataset directory does not exist: " + c.dataset.string());
    }
    if (std::filesystem::exists(c.output_dir) && !std::filesystem::is_directory(c.output_dir)) {
        throw InvalidArgument("config output_dir is not a directory: " + c.output_dir.string());
    }
    if (c.cache_dir && std::filesystem::exists(*c.cache_dir) && !std::filesystem::is_directory(*c.cache_dir)) {
        throw InvalidArgument("config cache_dir is not a directory: " + c.cache_dir->string());
    }
    return c;
}

std::string canonical_model_config(const ExperimentConfig& c) {
    return json{{"train", to_json(c.train)}, {"encoder", to_json(c.encoder)}, {"slic", to_json(c.slic)}}.dump();
}

}  // namespace purnet
