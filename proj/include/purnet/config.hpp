// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "purnet/backbone.hpp"
#include "purnet/superpixel.hpp"

namespace purnet {

struct TrainConfig {
    std::array<int, 3> stage_iters{100, 200, 500};
    double base_lr = 1e-3;
    double head_lr_multiplier = 10.0;
    double momentum = 0.9;
    double weight_decay = 5e-4;
    double poly_power = 0.9;
    int batch_size = 8;
    int input_size = 64;
    std::uint64_t seed = 0;

    void validate() const;
    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct ExperimentConfig {
    TrainConfig train;
    EncoderConfig encoder = EncoderConfig::tiny();
    SlicParams slic;
    std::filesystem::path dataset;
    std::filesystem::path output_dir;
    std::optional<std::filesystem::path> cache_dir;

    void validate() const;
};

nlohmann::json to_json(const TrainConfig& c);
nlohmann::json to_json(const EncoderConfig& c);
nlohmann::json to_json(const SlicParams& c);
nlohmann::json to_json(const ExperimentConfig& c);

/// Strict parsers: unknown keys and wrongly typed values throw InvalidArgument
/// naming the offending key. Missing keys keep their defaults.
TrainConfig train_config_from_json(const nlohmann::json& j);
EncoderConfig encoder_config_from_json(const nlohmann::json& j);
SlicParams slic_params_from_json(const nlohmann::json& j);
/// Relative paths resolve against base_dir.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

/// Reads, parses and validates; the dataset directory must exist.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Fields that determine a model's layout and training trajectory, serialized
/// in canonical form (paths excluded).
std::string canonical_model_config(const ExperimentConfig& c);

}  // namespace purnet
