// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "purnet/training.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "purnet/digest.hpp"
#include "purnet/promotion.hpp"
#include "purnet/purificatory.hpp"
#include "purnet/rectification.hpp"

namespace purnet {

double poly_lr(double base, int iter, int max_iter, double power) {
    if (max_iter <= 0 || iter < 0 || iter > max_iter) {
        throw InvalidArgument("poly_lr: iteration " + std::to_string(iter) + " outside [0, " + std::to_string(max_iter) +
                              "]");
    }
    return base * std::pow(1.0 - static_cast<double>(iter) / static_cast<double>(max_iter), power);
}

double group_learning_rate(const TrainConfig& cfg, ParamGroup group, double scheduled_base) {
    return group == ParamGroup::Backbone ? scheduled_base : scheduled_base * cfg.head_lr_multiplier;
}

Sgd::Sgd(ParameterRegistry& reg, double momentum, double weight_decay)
    : reg_(reg), momentum_(momentum), weight_decay_(weight_decay) {
    reset();
}

void Sgd::reset() {
    velocity_.clear();
    for (const Parameter& p : reg_.all()) velocity_.emplace_back(p.var->value.shape());
}

void Sgd::step(const std::function<double(ParamGroup)>& lr) {
    auto& params = reg_.all();
    for (std::size_t k = 0; k < params.size(); ++k) {
        Parameter& p = params[k];
        if (!p.var->requires_grad) continue;
        const double rate = lr(p.group);
        Tensor& w = p.var->value;
        Tensor& v = velocity_[k];
        const bool has_grad = p.var->has_grad();
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double g = (has_grad ? p.var->grad[i] : 0.0) + weight_decay_ * w[i];
            v[i] = momentum_ * v[i] + g;
            w[i] -= rate * v[i];
        }
    }
}

std::vector<NamedTensor> Sgd::state() const {
    std::vector<NamedTensor> out;
    const auto& params = reg_.all();
    for (std::size_t k = 0; k < params.size(); ++k) out.push_back({params[k].name, velocity_[k]});
    return out;
}

void Sgd::load_state(const std::vector<NamedTensor>& state) {
    const auto& params = reg_.all();
    if (state.size() != params.size()) throw ShapeError("optimizer state does not match the model's parameters");
    for (std::size_t k = 0; k < params.size(); ++k) {
        if (state[k].name != params[k].name) throw ShapeError("optimizer state for " + state[k].name + " out of order");
        require_same_shape(state[k].value, params[k].var->value, state[k].name.c_str());
    }
    for (std::size_t k = 0; k < params.size(); ++k) velocity_[k] = state[k].value;
}

LossTerms total_loss(const ForwardResult& r, const Tensor& mask, const SuperpixelSegmentation& seg) {
    LossTerms t;
    t.p = promotion_loss(r.promotion.sides, mask);
    const RectificationLosses rl = rectification_losses(r.rectification, mask);
    t.ro = rl.object;
    t.re = rl.error;
    if (r.purificatory) {
        Levels<Tensor> errors;
        for (std::size_t k = 0; k < errors.size(); ++k) errors[k] = r.rectification[k].error_pred->value;
        t.rm = purificatory_loss(*r.purificatory, mask, errors);
        t.ss = ssl_deep(r.purificatory->sides, mask, seg);
    }
    return t;
}

LossBundle values(const LossTerms& t) {
    LossBundle b;
    b.l_p = ag::scalar(t.p);
    b.l_ro = ag::scalar(t.ro);
    b.l_re = ag::scalar(t.re);
    b.l_rm = t.rm ? ag::scalar(t.rm) : 0.0;
    b.l_ss = t.ss ? ag::scalar(t.ss) : 0.0;
    b.total = b.l_p + b.l_ro + b.l_re + b.l_rm + b.l_ss;
    return b;
}

std::vector<ParamGroup> stage_groups(int stage) {
    switch (stage) {
        case 1: return {ParamGroup::Backbone, ParamGroup::Purificatory};
        case 2: return {ParamGroup::Promotion, ParamGroup::Rectification};
        case 3: return {ParamGroup::Backbone, ParamGroup::Promotion, ParamGroup::Rectification, ParamGroup::Purificatory};
        default: throw InvalidArgument("training stage must be 1, 2 or 3, got " + std::to_string(stage));
    }
}

ag::Var stage_objective(int stage, const LossTerms& t) {
    switch (stage) {
        case 1: return ag::sum_scalars({t.rm, t.ss});
        case 2: return ag::sum_scalars({t.p, t.ro, t.re});
        case 3: return ag::sum_scalars({t.p, t.ro, t.re, t.rm, t.ss});
        default: throw InvalidArgument("training stage must be 1, 2 or 3, got " + std::to_string(stage));
    }
}

nlohmann::json to_json(const IterationLog& log) {
    nlohmann::json j{{"stage", log.stage},         {"iteration", log.iteration}, {"lr", log.lr},
                     {"objective", log.objective}, {"l_p", log.losses.l_p},      {"l_ro", log.losses.l_ro},
                     {"l_re", log.losses.l_re}};
    if (log.has_purificatory) {
        j["l_rm"] = log.losses.l_rm;
        j["l_ss"] = log.losses.l_ss;
    } else {
        j["l_rm"] = nullptr;
        j["l_ss"] = nullptr;
    }
    j["total"] = log.losses.total;
    return j;
}

std::vector<Sample> prepare_training_set(const std::vector<Sample>& raw, int input_size, const SlicParams& params,
                                         const SegmentationCache* cache) {
    std::vector<Sample> out(raw.size());
    std::vector<std::string> errors(raw.size());
    const auto n = static_cast<std::ptrdiff_t>(raw.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            Sample s = resize_sample(raw[k], input_size);
            if (!s.segmentation) s.segmentation = cache ? cache->get(s.image, params) : slic(s.image, params);
            out[k] = std::move(s);
        } catch (const std::exception& e) {
            errors[k] = raw[k].id + ": " + e.what();
        }
    }
    for (const std::string& e : errors)
        if (!e.empty()) throw InvalidArgument(e);
    return out;
}

Trainer::Trainer(PurNet& model, const ExperimentConfig& cfg, std::vector<Sample> prepared)
    : model_(model), cfg_(cfg), samples_(std::move(prepared)), sgd_(model.parameters(), cfg.train.momentum,
                                                                     cfg.train.weight_decay) {
    cfg_.validate();
    if (samples_.empty()) throw InvalidArgument("training set is empty");
    for (const Sample& s : samples_) {
        if (!s.segmentation) throw InvalidArgument(s.id + ": training sample has no segmentation");
        if (s.image.height() != cfg_.train.input_size || s.image.width() != cfg_.train.input_size) {
            throw ShapeError(s.id + ": training sample is not " + std::to_string(cfg_.train.input_size) + " square");
        }
    }
}

std::vector<IterationLog> Trainer::run_stage(int stage, const LogSink& sink) {
    const std::vector<ParamGroup> groups = stage_groups(stage);
    if (stage != completed_stage_ + 1) {
        throw InvalidArgument("stage " + std::to_string(stage) + " requires a completed stage " +
                              std::to_string(stage - 1) + " checkpoint (model is at stage " +
                              std::to_string(completed_stage_) + ")");
    }
    const TrainConfig& tc = cfg_.train;
    const int max_iter = tc.stage_iters[static_cast<std::size_t>(stage - 1)];
    ParameterRegistry& reg = model_.parameters();
    reg.set_trainable(groups);
    sgd_.reset();

    const std::uint64_t stage_seed = tc.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(stage);
    BatchSampler sampler(samples_.size(), static_cast<std::size_t>(tc.batch_size), stage_seed);
    Rng flip_rng(stage_seed ^ 0xD1B54A32D192ED03ULL);
    const bool with_purificatory = stage != 2;

    std::vector<IterationLog> logs;
    for (int it = 0; it < max_iter; ++it) {
        const double lr = poly_lr(tc.base_lr, it, max_iter, tc.poly_power);
        const std::vector<std::size_t> batch = sampler.next();
        const double weight = 1.0 / static_cast<double>(batch.size());
        reg.zero_grad();

        IterationLog log;
        log.stage = stage;
        log.iteration = it;
        log.lr = lr;
        log.has_purificatory = with_purificatory;
        for (std::size_t idx : batch) {
            const Sample s = augment(samples_[idx], flip_rng);
            const ForwardResult r = model_.forward(s.image, with_purificatory);
            const LossTerms terms = total_loss(r, s.mask, *s.segmentation);
            const LossBundle b = values(terms);
            ag::Var objective = stage_objective(stage, terms);
            if (!b.all_finite() || !std::isfinite(ag::scalar(objective))) {
                std::ostringstream os;
                os << "stage " << stage << " iteration " << it << " sample " << s.id << ": non-finite loss (l_p=" << b.l_p
                   << " l_ro=" << b.l_ro << " l_re=" << b.l_re << " l_rm=" << b.l_rm << " l_ss=" << b.l_ss << ")";
                throw NumericError(os.str());
            }
            ag::backward(objective, weight);
            log.losses.l_p += weight * b.l_p;
            log.losses.l_ro += weight * b.l_ro;
            log.losses.l_re += weight * b.l_re;
            log.losses.l_rm += weight * b.l_rm;
            log.losses.l_ss += weight * b.l_ss;
            log.objective += weight * ag::scalar(objective);
        }
        log.losses.total = log.losses.l_p + log.losses.l_ro + log.losses.l_re + log.losses.l_rm + log.losses.l_ss;
        sgd_.step([&](ParamGroup g) { return group_learning_rate(tc, g, lr); });
        for (const Parameter& p : reg.all()) {
            if (p.var->requires_grad && !p.var->value.all_finite()) {
                throw NumericError("stage " + std::to_string(stage) + " iteration " + std::to_string(it) +
                                   ": parameter " + p.name + " became non-finite");
            }
        }
        ++iteration_;
        if (sink) sink(log);
        logs.push_back(log);
    }
    reg.set_trainable({});
    completed_stage_ = stage;
    return logs;
}

std::string config_hash(const ExperimentConfig& cfg) { return sha256_hex(canonical_model_config(cfg)); }

Checkpoint Trainer::checkpoint() const {
    Checkpoint c;
    c.config_json = canonical_model_config(cfg_);
    c.config_hash = sha256_hex(c.config_json);
    c.stage = completed_stage_;
    c.iteration = iteration_;
    c.parameters = snapshot_parameters(model_.parameters());
    c.momentum = sgd_.state();
    return c;
}

void Trainer::resume(const Checkpoint& c) {
    if (c.config_hash != config_hash(cfg_)) {
        throw InvalidArgument("checkpoint config hash " + c.config_hash + " does not match the experiment config");
    }
    restore_parameters(model_.parameters(), c.parameters);
    sgd_.load_state(c.momentum);
    completed_stage_ = c.stage;
    iteration_ = c.iteration;
}

std::unique_ptr<PurNet> model_from_checkpoint(const Checkpoint& c) {
    if (sha256_hex(c.config_json) != c.config_hash) throw InvalidArgument("checkpoint config hash is inconsistent");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(c.config_json);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("checkpoint config is not valid JSON: ") + e.what());
    }
    const EncoderConfig enc = encoder_config_from_json(j.at("encoder"));
    const TrainConfig tc = train_config_from_json(j.at("train"));
    auto model = std::make_unique<PurNet>(enc, tc.seed);
    restore_parameters(model->parameters(), c.parameters);
    return model;
}

TrainResult train(const ExperimentConfig& cfg, const std::vector<Sample>& raw, const std::filesystem::path& output_dir,
                  const LogSink& sink) {
    cfg.validate();
    std::optional<SegmentationCache> cache;
    if (cfg.cache_dir) cache.emplace(*cfg.cache_dir);
    std::vector<Sample> prepared = prepare_training_set(raw, cfg.train.input_size, cfg.slic, cache ? &*cache : nullptr);

    PurNet model(cfg.encoder, cfg.train.seed);
    Trainer trainer(model, cfg, std::move(prepared));

    std::ofstream log_file;
    if (!output_dir.empty()) {
        std::filesystem::create_directories(output_dir);
        log_file.open(output_dir / "train_log.jsonl");
        if (!log_file) throw InvalidArgument("cannot write " + (output_dir / "train_log.jsonl").string());
    }
    auto emit = [&](const IterationLog& log) {
        if (log_file.is_open()) log_file << to_json(log).dump() << '\n';
        if (sink) sink(log);
    };

    TrainResult result;
    for (int stage = 1; stage <= 3; ++stage) {
        trainer.run_stage(stage, emit);
        if (!output_dir.empty()) {
            const auto path = output_dir / ("stage" + std::to_string(stage) + ".ckpt");
            save_checkpoint(path, trainer.checkpoint());
            result.stage_checkpoints.push_back(path);
        }
    }
    result.final_checkpoint = trainer.checkpoint();
    if (!output_dir.empty()) save_checkpoint(output_dir / "final.ckpt", result.final_checkpoint);
    return result;
}

}  // namespace purnet
