// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "purnet/layers.hpp"

namespace purnet {

struct NamedTensor {
    std::string name;
    Tensor value;

    friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

/// Binary container, little-endian:
///   "PNCK" u32 version
///   str config_json, str config_hash, i32 stage, i64 iteration
///   u32 n, n x (str name, i32 h, i32 w, i32 c, f64[h*w*c])   parameters
///   u32 m, m x (same)                                          momentum
/// where str is u32 length + bytes.
struct Checkpoint {
    static constexpr std::uint32_t kVersion = 1;

    std::string config_json;
    std::string config_hash;
    int stage = 0;  // last completed training stage, 0 for an untrained model
    std::int64_t iteration = 0;
    std::vector<NamedTensor> parameters;
    std::vector<NamedTensor> momentum;

    friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

std::vector<unsigned char> serialize(const Checkpoint& c);
Checkpoint deserialize(const std::vector<unsigned char>& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// SHA-256 of the serialized form.
std::string checkpoint_hash(const Checkpoint& c);

std::vector<NamedTensor> snapshot_parameters(const ParameterRegistry& reg);
/// Copies values into the registry; names and shapes must match exactly.
void restore_parameters(ParameterRegistry& reg, const std::vector<NamedTensor>& values);

}  // namespace purnet
