// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <fstream>

#include "purnet/synthetic.hpp"
#include "purnet/training.hpp"

using namespace purnet;

namespace {

ExperimentConfig small_experiment(std::array<int, 3> iters) {
    ExperimentConfig c;
    c.encoder.stage_channels = {4, 6, 6, 8, 8};
    c.encoder.lateral_channels = 6;
    c.train.stage_iters = iters;
    c.train.input_size = 32;
    c.train.batch_size = 2;
    c.train.base_lr = 1e-6;
    c.slic = {16, 10.0, 5};
    return c;
}

std::vector<Sample> prepared(const ExperimentConfig& c, int count) {
    return prepare_training_set(synthetic_dataset({count, 32, 3}), c.train.input_size, c.slic);
}

std::vector<NamedTensor> group_snapshot(const PurNet& m, ParamGroup g) {
    std::vector<NamedTensor> out;
    for (const Parameter& p : m.parameters().all())
        if (p.group == g) out.push_back({p.name, p.var->value});
    return out;
}

}  // namespace

TEST_CASE("poly learning rate") {
    CHECK(poly_lr(1e-3, 0, 100, 0.9) == 1e-3);
    CHECK(poly_lr(1e-3, 50, 100, 0.9) == doctest::Approx(5.359e-4).epsilon(1e-4));
    CHECK(poly_lr(1e-3, 100, 100, 0.9) == 0.0);
    CHECK_THROWS_AS(poly_lr(1e-3, 101, 100, 0.9), InvalidArgument);
    CHECK_THROWS_AS(poly_lr(1e-3, 0, 0, 0.9), InvalidArgument);
    TrainConfig tc;
    CHECK(group_learning_rate(tc, ParamGroup::Backbone, 2e-4) == 2e-4);
    CHECK(group_learning_rate(tc, ParamGroup::Rectification, 2e-4) == doctest::Approx(2e-3));
}

TEST_CASE("sgd heavy ball step") {
    ParameterRegistry reg;
    ag::Var w = reg.add("w", ParamGroup::Backbone, Tensor(1, 1, 1, 1.0));
    ag::Var h = reg.add("h", ParamGroup::Promotion, Tensor(1, 1, 1, 1.0));
    reg.set_trainable({ParamGroup::Backbone, ParamGroup::Promotion});
    Sgd sgd(reg, 0.5, 0.0);
    auto lr = [](ParamGroup g) { return g == ParamGroup::Backbone ? 0.1 : 1.0; };
    w->grad_buffer()[0] = 2.0;
    h->grad_buffer()[0] = 2.0;
    sgd.step(lr);
    CHECK(w->value[0] == doctest::Approx(0.8));
    CHECK(h->value[0] == doctest::Approx(-1.0));
    sgd.step(lr);  // v = 0.5 * 2 + 2
    CHECK(w->value[0] == doctest::Approx(0.5));
    sgd.reset();
    sgd.step(lr);
    CHECK(w->value[0] == doctest::Approx(0.3));

    Sgd decay(reg, 0.0, 0.5);
    w->grad.fill(0.0);
    const double before = w->value[0];
    decay.step(lr);
    CHECK(w->value[0] == doctest::Approx(before * (1.0 - 0.05)));
}

TEST_CASE("stage parameter groups") {
    CHECK(stage_groups(1) == std::vector<ParamGroup>{ParamGroup::Backbone, ParamGroup::Purificatory});
    CHECK(stage_groups(2) == std::vector<ParamGroup>{ParamGroup::Promotion, ParamGroup::Rectification});
    CHECK(stage_groups(3).size() == 4);
    CHECK_THROWS_AS(stage_groups(4), InvalidArgument);
}

TEST_CASE("loss bundle total is the plain sum") {
    const ExperimentConfig c = small_experiment({0, 0, 0});
    PurNet net(c.encoder, 1);
    const std::vector<Sample> s = prepared(c, 1);
    const LossTerms t = total_loss(net.forward(s[0].image), s[0].mask, *s[0].segmentation);
    const LossBundle b = values(t);
    CHECK(b.total == b.l_p + b.l_ro + b.l_re + b.l_rm + b.l_ss);
    CHECK(b.all_finite());
    CHECK(ag::scalar(stage_objective(1, t)) == doctest::Approx(b.l_rm + b.l_ss).epsilon(1e-14));
    CHECK(ag::scalar(stage_objective(2, t)) == doctest::Approx(b.l_p + b.l_ro + b.l_re).epsilon(1e-14));
}

TEST_CASE("zero iteration stages leave the model unchanged") {
    const ExperimentConfig c = small_experiment({0, 0, 0});
    PurNet net(c.encoder, 2);
    const auto before = snapshot_parameters(net.parameters());
    Trainer trainer(net, c, prepared(c, 2));
    for (int s = 1; s <= 3; ++s) CHECK(trainer.run_stage(s).empty());
    CHECK(snapshot_parameters(net.parameters()) == before);
    CHECK(trainer.completed_stage() == 3);
}

TEST_CASE("stages must run in order") {
    const ExperimentConfig c = small_experiment({1, 1, 1});
    PurNet net(c.encoder, 3);
    Trainer trainer(net, c, prepared(c, 2));
    CHECK_THROWS_WITH_AS(trainer.run_stage(2), doctest::Contains("requires a completed stage 1"), InvalidArgument);
    trainer.run_stage(1);
    CHECK_THROWS_AS(trainer.run_stage(3), InvalidArgument);
    CHECK_THROWS_AS(trainer.run_stage(1), InvalidArgument);
}

TEST_CASE("stage 2 only moves promotion and rectification") {
    const ExperimentConfig c = small_experiment({1, 2, 1});
    PurNet net(c.encoder, 4);
    Trainer trainer(net, c, prepared(c, 2));
    trainer.run_stage(1);
    const auto pur = group_snapshot(net, ParamGroup::Purificatory);
    const auto bb = group_snapshot(net, ParamGroup::Backbone);
    const auto promo = group_snapshot(net, ParamGroup::Promotion);
    const std::vector<IterationLog> logs = trainer.run_stage(2);
    REQUIRE(logs.size() == 2);
    CHECK_FALSE(logs[0].has_purificatory);
    CHECK(to_json(logs[0]).at("l_rm").is_null());
    CHECK(group_snapshot(net, ParamGroup::Purificatory) == pur);
    CHECK(group_snapshot(net, ParamGroup::Backbone) == bb);
    CHECK_FALSE(group_snapshot(net, ParamGroup::Promotion) == promo);
}

TEST_CASE("stage 1 training lowers its objective") {
    ExperimentConfig c = small_experiment({40, 0, 0});
    PurNet net(c.encoder, 5);
    Trainer trainer(net, c, prepared(c, 2));
    const std::vector<IterationLog> logs = trainer.run_stage(1);
    REQUIRE(logs.size() == 40);
    double first = 0.0, last = 0.0;
    for (int k = 0; k < 5; ++k) {
        first += logs[static_cast<std::size_t>(k)].objective;
        last += logs[logs.size() - 1 - static_cast<std::size_t>(k)].objective;
    }
    CHECK(last < first);
    for (const IterationLog& l : logs) CHECK(l.losses.all_finite());
    CHECK(logs[0].lr == c.train.base_lr);
}

TEST_CASE("non-finite parameters abort training") {
    const ExperimentConfig c = small_experiment({3, 0, 0});
    PurNet net(c.encoder, 6);
    net.parameters().all().front().var->value[0] = std::nan("");
    Trainer trainer(net, c, prepared(c, 1));
    CHECK_THROWS_WITH_AS(trainer.run_stage(1), doctest::Contains("non-finite"), NumericError);
}

TEST_CASE("trainer input validation") {
    const ExperimentConfig c = small_experiment({1, 1, 1});
    PurNet net(c.encoder, 7);
    CHECK_THROWS_AS(Trainer(net, c, {}), InvalidArgument);
    std::vector<Sample> raw = synthetic_dataset({1, 32, 1});
    CHECK_THROWS_AS(Trainer(net, c, raw), InvalidArgument);
    std::vector<Sample> big = prepare_training_set(synthetic_dataset({1, 64, 1}), 64, c.slic);
    CHECK_THROWS_AS(Trainer(net, c, big), ShapeError);
}

TEST_CASE("checkpoint serialization round trip") {
    const ExperimentConfig c = small_experiment({1, 0, 0});
    PurNet net(c.encoder, 8);
    Trainer trainer(net, c, prepared(c, 1));
    trainer.run_stage(1);
    const Checkpoint ck = trainer.checkpoint();
    CHECK(ck.stage == 1);
    CHECK(ck.iteration == 1);
    CHECK(ck.config_hash == config_hash(c));
    CHECK(deserialize(serialize(ck)) == ck);

    const auto path = std::filesystem::temp_directory_path() / "purnet_test.ckpt";
    save_checkpoint(path, ck);
    const Checkpoint back = load_checkpoint(path);
    CHECK(back == ck);
    CHECK(checkpoint_hash(back) == checkpoint_hash(ck));
    const auto model = model_from_checkpoint(back);
    CHECK(snapshot_parameters(model->parameters()) == ck.parameters);

    std::vector<unsigned char> bytes = serialize(ck);
    bytes.resize(bytes.size() - 3);
    CHECK_THROWS_AS(deserialize(bytes), InvalidArgument);
    bytes = serialize(ck);
    bytes.push_back(0);
    CHECK_THROWS_AS(deserialize(bytes), InvalidArgument);
    bytes = serialize(ck);
    bytes[0] = 'X';
    CHECK_THROWS_AS(deserialize(bytes), InvalidArgument);
    std::filesystem::remove(path);

    Checkpoint tampered = ck;
    tampered.config_json += " ";
    CHECK_THROWS_AS(model_from_checkpoint(tampered), InvalidArgument);

    PurNet fresh(c.encoder, 8);
    Trainer resumed(fresh, c, prepared(c, 1));
    resumed.resume(ck);
    CHECK(resumed.completed_stage() == 1);
    CHECK(snapshot_parameters(fresh.parameters()) == ck.parameters);
    ExperimentConfig other = c;
    other.train.seed = 99;
    PurNet third(other.encoder, 99);
    Trainer mismatch(third, other, prepared(other, 1));
    CHECK_THROWS_AS(mismatch.resume(ck), InvalidArgument);
}

TEST_CASE("training is reproducible in both execution modes") {
    const ExperimentConfig c = small_experiment({2, 2, 2});
    const std::vector<Sample> raw = synthetic_dataset({2, 32, 9});
    const TrainResult a = train(c, raw, {});
    const TrainResult b = train(c, raw, {});
    CHECK(checkpoint_hash(a.final_checkpoint) == checkpoint_hash(b.final_checkpoint));
    kernels::ScopedExecMode mode(kernels::ExecMode::Reference);
    const TrainResult r = train(c, raw, {});
    CHECK(checkpoint_hash(r.final_checkpoint) == checkpoint_hash(a.final_checkpoint));
}

TEST_CASE("train writes stage checkpoints and a log") {
    const ExperimentConfig c = small_experiment({1, 1, 1});
    const auto dir = std::filesystem::temp_directory_path() / "purnet_test_train";
    std::filesystem::remove_all(dir);
    const TrainResult r = train(c, synthetic_dataset({2, 32, 1}), dir);
    CHECK(r.stage_checkpoints.size() == 3);
    for (const char* f : {"stage1.ckpt", "stage2.ckpt", "stage3.ckpt", "final.ckpt", "train_log.jsonl"})
        CHECK(std::filesystem::exists(dir / f));
    std::ifstream log(dir / "train_log.jsonl");
    int lines = 0;
    for (std::string line; std::getline(log, line); ++lines) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.contains("stage"));
        CHECK(j.contains("objective"));
    }
    CHECK(lines == 3);
    CHECK(load_checkpoint(dir / "final.ckpt") == r.final_checkpoint);
    std::filesystem::remove_all(dir);
}
