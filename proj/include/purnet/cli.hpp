// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace purnet::cli {

struct TrainOptions {
    std::filesystem::path config;
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::array<int, 3>> stage_iters;
};

struct PredictOptions {
    std::filesystem::path checkpoint;
    std::filesystem::path input;  // image directory, or a dataset root holding images/
    std::filesystem::path out;
    bool sides = false;
};

struct EvalOptions {
    std::filesystem::path pred;
    std::filesystem::path gt;  // mask directory, or a dataset root holding masks/
    std::optional<std::filesystem::path> out;
};

struct PlotOptions {
    std::vector<std::filesystem::path> curves;
    std::vector<std::string> labels;
    std::filesystem::path out;
};

struct SynthOptions {
    std::filesystem::path out;
    int count = 8;
    int size = 64;
    std::uint64_t seed = 7;
};

// Each command returns 0 on success and throws on failure.
int cmd_train(const TrainOptions& o, std::ostream& log);
int cmd_predict(const PredictOptions& o, std::ostream& log);
int cmd_eval(const EvalOptions& o, std::ostream& log);
int cmd_plot(const PlotOptions& o, std::ostream& log);
int cmd_synth(const SynthOptions& o, std::ostream& log);

/// Parses argv and dispatches. Failures print exactly one line
///   purnet: error: kind=<kind> message="<text>"
/// to `err` and return a nonzero code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace purnet::cli
