// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "purnet/data.hpp"

namespace purnet {

struct SyntheticOptions {
    int count = 8;
    int size = 64;
    std::uint64_t seed = 7;
};

/// Geometric shapes (disc, rectangle, triangle, ellipse, in rotation) in a
/// flat-ish color over a striped, noisy background. Ids are "synth_000"...
std::vector<Sample> synthetic_dataset(const SyntheticOptions& opts = {});

}  // namespace purnet
