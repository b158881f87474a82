// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <sstream>

#include "purnet/cli.hpp"
#include "purnet/image_io.hpp"
#include "purnet/synthetic.hpp"

using namespace purnet;
namespace fs = std::filesystem;

namespace {

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "purnet");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const char* name) {
    const fs::path d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void write_config(const fs::path& path, const fs::path& dataset) {
    const nlohmann::json j = {{"dataset", dataset.string()},
                              {"train", {{"input_size", 32}, {"batch_size", 2}, {"base_lr", 1e-6}}},
                              {"encoder", {{"stage_channels", {4, 6, 6, 8, 8}}, {"lateral_channels", 6}}},
                              {"slic", {{"n_regions", 16}, {"iterations", 3}}}};
    std::ofstream(path) << j.dump(2);
}

}  // namespace

TEST_CASE("usage errors") {
    const Invocation none = invoke({});
    CHECK(none.code == 2);
    CHECK(none.err.rfind("purnet: error: kind=usage message=\"", 0) == 0);
    CHECK(invoke({"train"}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({"train", "--config", "x", "--stage-iters", "1,2"}).code == 2);
    const Invocation help = invoke({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("predict") != std::string::npos);
}

TEST_CASE("runtime errors are one structured line") {
    const Invocation r = invoke({"train", "--config", "/nonexistent/config.json"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("purnet: error: kind=invalid_argument message=\"", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
}

TEST_CASE("train, predict and eval end to end") {
    const fs::path root = scratch("purnet_test_cli");
    CHECK(invoke({"synth", "--out", (root / "data").string(), "--count", "2", "--size", "48"}).code == 0);
    write_config(root / "config.json", root / "data");

    const Invocation t = invoke({"train", "--config", (root / "config.json").string(), "--out",
                                 (root / "run").string(), "--stage-iters", "1,1,1", "--seed", "3"});
    REQUIRE_MESSAGE(t.code == 0, t.err);
    CHECK(fs::exists(root / "run" / "final.ckpt"));
    CHECK(fs::exists(root / "run" / "config.json"));
    const auto saved = nlohmann::json::parse(std::ifstream(root / "run" / "config.json"));
    CHECK(saved.at("train").at("seed") == 3);
    CHECK(saved.at("train").at("stage_iters") == nlohmann::json{1, 1, 1});

    const Invocation p = invoke({"predict", "--checkpoint", (root / "run" / "final.ckpt").string(), "--input",
                                 (root / "data").string(), "--out", (root / "pred").string(), "--sides"});
    REQUIRE_MESSAGE(p.code == 0, p.err);
    for (const char* id : {"synth_000.png", "synth_001.png"}) {
        const Tensor m = io::read_map(root / "pred" / id);
        CHECK(m.shape() == Shape{48, 48, 1});
        for (const char* sub : {"S1", "S2", "S3", "S4", "S5", "fusion"}) CHECK(fs::exists(root / "pred" / sub / id));
        const Tensor s1 = io::read_map(root / "pred" / "S1" / id);
        for (std::size_t i = 0; i < m.size(); ++i) CHECK(s1[i] == m[i]);
    }

    const Invocation e = invoke({"eval", "--pred", (root / "pred").string(), "--gt", (root / "data").string(),
                                 "--out", (root / "eval").string()});
    REQUIRE_MESSAGE(e.code == 0, e.err);
    const auto report = nlohmann::json::parse(e.out);
    CHECK(report.at("count") == 2);
    for (const char* k : {"mae", "adaptive_f_beta", "weighted_f_beta", "max_f_beta", "mean_f_beta"}) {
        const double v = report.at(k).get<double>();
        CHECK((v >= 0.0 && v <= 1.0));
    }
    CHECK(nlohmann::json::parse(std::ifstream(root / "eval" / "report.json")) == report);
    CHECK(io::read_curve_csv(root / "eval" / "curve.csv").f.size() == 256);

    const Invocation same = invoke({"eval", "--pred", (root / "data" / "masks").string(), "--gt",
                                    (root / "data").string()});
    REQUIRE(same.code == 0);
    const auto perfect = nlohmann::json::parse(same.out);
    CHECK(perfect.at("mae") == 0.0);
    CHECK(perfect.at("adaptive_f_beta").get<double>() == doctest::Approx(1.0).epsilon(1e-12));

    const Invocation plot = invoke({"plot", (root / "eval" / "curve.csv").string(), "--label", "run", "--out",
                                    (root / "curves.png").string()});
    CHECK(plot.code == 0);
    CHECK(io::read_rgb(root / "curves.png").height() == 600);

    fs::remove(root / "pred" / "synth_001.png");
    const Invocation unpaired = invoke({"eval", "--pred", (root / "pred").string(), "--gt", (root / "data").string()});
    CHECK(unpaired.code == 1);
    CHECK(unpaired.err.find("synth_001") != std::string::npos);
    fs::remove_all(root);
}
