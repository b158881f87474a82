// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "purnet/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>

#include "purnet/config.hpp"
#include "purnet/image_io.hpp"
#include "purnet/metrics.hpp"
#include "purnet/synthetic.hpp"
#include "purnet/training.hpp"

namespace purnet::cli {

namespace {

std::filesystem::path subdir_or_self(const std::filesystem::path& dir, const char* sub) {
    return std::filesystem::is_directory(dir / sub) ? dir / sub : dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out || !(out << text)) throw InvalidArgument("cannot write " + path.string());
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    std::replace(s.begin(), s.end(), '"', '\'');
    return s;
}

}  // namespace

int cmd_train(const TrainOptions& o, std::ostream& log) {
    ExperimentConfig cfg = load_experiment_config(o.config);
    if (o.out) cfg.output_dir = *o.out;
    if (o.seed) cfg.train.seed = *o.seed;
    if (o.stage_iters) cfg.train.stage_iters = *o.stage_iters;
    cfg.validate();

    const std::vector<Sample> raw = io::load_dataset(cfg.dataset);
    log << "train: " << raw.size() << " samples, stages " << cfg.train.stage_iters[0] << '/' << cfg.train.stage_iters[1]
        << '/' << cfg.train.stage_iters[2] << ", output " << cfg.output_dir.string() << '\n';
    std::filesystem::create_directories(cfg.output_dir);
    write_text(cfg.output_dir / "config.json", to_json(cfg).dump(2) + "\n");
    const TrainResult r = train(cfg, raw, cfg.output_dir, [&](const IterationLog& l) {
        const int budget = cfg.train.stage_iters[static_cast<std::size_t>(l.stage - 1)];
        if (l.iteration + 1 == budget || l.iteration % 50 == 0) {
            log << "stage " << l.stage << " iter " << l.iteration + 1 << '/' << budget << " objective " << l.objective
                << '\n';
        }
    });
    log << "final checkpoint " << (cfg.output_dir / "final.ckpt").string() << " sha256 "
        << checkpoint_hash(r.final_checkpoint) << '\n';
    return 0;
}

int cmd_predict(const PredictOptions& o, std::ostream& log) {
    const Checkpoint ckpt = load_checkpoint(o.checkpoint);
    std::unique_ptr<PurNet> model = model_from_checkpoint(ckpt);
    const int size = train_config_from_json(nlohmann::json::parse(ckpt.config_json).at("train")).input_size;

    const auto files = io::list_images(subdir_or_self(o.input, "images"), {".png", ".jpg", ".jpeg"});
    if (files.empty()) throw InvalidArgument("no images in " + o.input.string());
    static const char* kSideDirs[] = {"S1", "S2", "S3", "S4", "S5", "fusion"};
    for (const auto& f : files) {
        const Tensor image = io::read_rgb(f);
        Sample s{f.stem().string(), image, Tensor(image.height(), image.width(), 1), std::nullopt};
        const Tensor input = resize_sample(s, size).image;
        const std::vector<Tensor> maps =
            o.sides ? model->predict_all(input) : std::vector<Tensor>{model->predict(input)};
        auto restore = [&](const Tensor& m) {
            Tensor r = resize_bilinear(m, image.height(), image.width());
            for (double& v : r.values()) v = std::clamp(v, 0.0, 1.0);
            return r;
        };
        const std::string name = s.id + ".png";
        io::write_map(o.out / name, restore(maps[0]));
        if (o.sides) {
            for (std::size_t k = 0; k < maps.size(); ++k) io::write_map(o.out / kSideDirs[k] / name, restore(maps[k]));
        }
    }
    log << "predict: wrote " << files.size() << " maps to " << o.out.string() << '\n';
    return 0;
}

int cmd_eval(const EvalOptions& o, std::ostream& log) {
    const io::PairedMaps pairs = io::load_prediction_pairs(o.pred, subdir_or_self(o.gt, "masks"));
    std::vector<metrics::MapPair> refs;
    for (std::size_t k = 0; k < pairs.ids.size(); ++k) refs.push_back({&pairs.predictions[k], &pairs.masks[k]});
    const metrics::DatasetReport report = metrics::evaluate(refs, pairs.ids);
    const nlohmann::json j = metrics::to_json(report);
    if (o.out) {
        write_text(*o.out / "report.json", j.dump(2) + "\n");
        write_text(*o.out / "curve.csv", metrics::curve_csv(report.curve));
    }
    log << j.dump(2) << '\n';
    return 0;
}

int cmd_plot(const PlotOptions& o, std::ostream& log) {
    if (o.curves.empty()) throw InvalidArgument("plot needs at least one curve table");
    if (!o.labels.empty() && o.labels.size() != o.curves.size()) {
        throw InvalidArgument("plot: " + std::to_string(o.labels.size()) + " labels for " +
                              std::to_string(o.curves.size()) + " curves");
    }
    std::vector<io::CurveSeries> series;
    for (std::size_t k = 0; k < o.curves.size(); ++k) {
        const std::string label = o.labels.empty() ? o.curves[k].parent_path().filename().string() : o.labels[k];
        series.push_back({label.empty() ? o.curves[k].stem().string() : label, io::read_curve_csv(o.curves[k])});
    }
    io::plot_curves(o.out, series);
    log << "plot: wrote " << o.out.string() << '\n';
    return 0;
}

int cmd_synth(const SynthOptions& o, std::ostream& log) {
    io::write_dataset(o.out, synthetic_dataset({o.count, o.size, o.seed}));
    log << "synth: wrote " << o.count << " samples to " << o.out.string() << '\n';
    return 0;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Purificatory network for salient object detection"};
    app.require_subcommand(1);

    TrainOptions train;
    std::string train_out;
    std::vector<int> stage_iters;
    std::uint64_t seed = 0;
    auto* t = app.add_subcommand("train", "Run the three training stages");
    t->add_option("--config", train.config, "Experiment config (JSON)")->required();
    t->add_option("--out", train_out, "Output directory (overrides the config)");
    auto* seed_opt = t->add_option("--seed", seed, "Seed (overrides the config)");
    t->add_option("--stage-iters", stage_iters, "Three stage budgets, e.g. 1,1,1")->delimiter(',')->expected(3);

    PredictOptions predict;
    auto* p = app.add_subcommand("predict", "Write saliency maps for a directory of images");
    p->add_option("--checkpoint", predict.checkpoint, "Checkpoint file")->required();
    p->add_option("--input", predict.input, "Image directory or dataset root")->required();
    p->add_option("--out", predict.out, "Output directory")->required();
    p->add_flag("--sides", predict.sides, "Also write S1..S5 and fusion into subdirectories");

    EvalOptions eval;
    std::string eval_out;
    auto* e = app.add_subcommand("eval", "Score prediction maps against ground truth");
    e->add_option("--pred", eval.pred, "Prediction directory")->required();
    e->add_option("--gt", eval.gt, "Mask directory or dataset root")->required();
    e->add_option("--out", eval_out, "Directory for report.json and curve.csv");

    PlotOptions plot;
    auto* pl = app.add_subcommand("plot", "Render F-measure curves");
    pl->add_option("curves", plot.curves, "Curve tables written by eval")->required();
    pl->add_option("--label", plot.labels, "One label per curve");
    pl->add_option("--out", plot.out, "Output PNG")->required();

    SynthOptions synth;
    auto* sy = app.add_subcommand("synth", "Write a synthetic shapes dataset");
    sy->add_option("--out", synth.out, "Dataset root")->required();
    sy->add_option("--count", synth.count, "Number of samples");
    sy->add_option("--size", synth.size, "Image side length");
    sy->add_option("--seed", synth.seed, "Seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& ex) {
        err << "purnet: error: kind=usage message=\"" << one_line(ex.what()) << "\"" << std::endl;
        return 2;
    }

    try {
        if (t->parsed()) {
            if (!train_out.empty()) train.out = train_out;
            if (seed_opt->count() > 0) train.seed = seed;
            if (!stage_iters.empty()) train.stage_iters = std::array<int, 3>{stage_iters[0], stage_iters[1], stage_iters[2]};
            return cmd_train(train, out);
        }
        if (p->parsed()) return cmd_predict(predict, out);
        if (e->parsed()) {
            if (!eval_out.empty()) eval.out = eval_out;
            return cmd_eval(eval, out);
        }
        if (pl->parsed()) return cmd_plot(plot, out);
        if (sy->parsed()) return cmd_synth(synth, out);
    } catch (const Error& ex) {
        err << "purnet: error: kind=" << ex.kind() << " message=\"" << one_line(ex.what()) << "\"" << std::endl;
        return 1;
    } catch (const std::exception& ex) {
        err << "purnet: error: kind=internal message=\"" << one_line(ex.what()) << "\"" << std::endl;
        return 1;
    }
    return 1;
}

}  // namespace purnet::cli
