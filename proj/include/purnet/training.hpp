// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "purnet/checkpoint.hpp"
#include "purnet/config.hpp"
#include "purnet/data.hpp"
#include "purnet/losses.hpp"
#include "purnet/model.hpp"

namespace purnet {

/// base * (1 - iter / max_iter)^power for 0 <= iter <= max_iter.
double poly_lr(double base, int iter, int max_iter, double power);

/// Learning rate of a parameter group given the scheduled base rate.
double group_learning_rate(const TrainConfig& cfg, ParamGroup group, double scheduled_base);

/// SGD with momentum and L2 weight decay, in the heavy-ball form
///   v <- mu v + (g + wd w),  w <- w - lr v.
/// Only parameters with requires_grad are touched.
class Sgd {
public:
    Sgd(ParameterRegistry& reg, double momentum, double weight_decay);

    void step(const std::function<double(ParamGroup)>& lr);
    void reset();

    std::vector<NamedTensor> state() const;
    void load_state(const std::vector<NamedTensor>& state);

private:
    ParameterRegistry& reg_;
    double momentum_;
    double weight_decay_;
    std::vector<Tensor> velocity_;
};

/// The five loss terms of one forward pass. When the purificatory pass was
/// skipped, rm and ss are null.
struct LossTerms {
    ag::Var p, ro, re, rm, ss;
};

LossTerms total_loss(const ForwardResult& r, const Tensor& mask, const SuperpixelSegmentation& seg);
LossBundle values(const LossTerms& t);

/// Trainable groups and objective of a stage:
///   1: backbone + purificatory, L_RM + L_SS
///   2: promotion + rectification, L_P + L_RO + L_RE
///   3: everything, all five terms
std::vector<ParamGroup> stage_groups(int stage);
ag::Var stage_objective(int stage, const LossTerms& t);

struct IterationLog {
    int stage = 0;
    int iteration = 0;
    double lr = 0.0;
    LossBundle losses;  // batch means
    double objective = 0.0;
    bool has_purificatory = true;
};

nlohmann::json to_json(const IterationLog& log);

using LogSink = std::function<void(const IterationLog&)>;

/// Resizes every sample and attaches its segmentation (through the cache when
/// one is given).
std::vector<Sample> prepare_training_set(const std::vector<Sample>& raw, int input_size, const SlicParams& slic,
                                         const SegmentationCache* cache = nullptr);

class Trainer {
public:
    /// Samples must come from prepare_training_set.
    Trainer(PurNet& model, const ExperimentConfig& cfg, std::vector<Sample> prepared);

    /// Runs `stage`, which must follow the last completed one.
    std::vector<IterationLog> run_stage(int stage, const LogSink& sink = {});
    int completed_stage() const noexcept { return completed_stage_; }

    Checkpoint checkpoint() const;
    void resume(const Checkpoint& c);

private:
    PurNet& model_;
    ExperimentConfig cfg_;
    std::vector<Sample> samples_;
    Sgd sgd_;
    int completed_stage_ = 0;
    std::int64_t iteration_ = 0;
};

/// Model whose layout and seed come from a checkpoint, with its parameters.
std::unique_ptr<PurNet> model_from_checkpoint(const Checkpoint& c);

std::string config_hash(const ExperimentConfig& cfg);

struct TrainResult {
    Checkpoint final_checkpoint;
    std::vector<std::filesystem::path> stage_checkpoints;
};

/// Stages 1 to 3 from scratch. Writes stage{1,2,3}.ckpt, final.ckpt and
/// train_log.jsonl into output_dir when it is nonempty.
TrainResult train(const ExperimentConfig& cfg, const std::vector<Sample>& raw, const std::filesystem::path& output_dir,
                  const LogSink& sink = {});

}  // namespace purnet
