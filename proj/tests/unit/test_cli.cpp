#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "commands.hpp"
#include "dmh/artifact.hpp"
#include "dmh/errors.hpp"
#include "dmh/io.hpp"
#include "oracles.hpp"

using namespace dmh;
using Json = nlohmann::json;

namespace {

Json read_json(const std::filesystem::path& path) {
    return Json::parse(oracle::file_text(path));
}

}  // namespace

TEST_CASE("run config defaults") {
    cli::RunConfig config;
    const auto ds = generate_synthetic({});
    const std::vector<double> betas(ds.views.size(), 1.0);
    const auto hyper = cli::resolve_hyper(config, ds, betas);
    REQUIRE(hyper.size() == 3);
    CHECK(hyper[0].alpha == 1.0);
    CHECK(hyper[1].alpha == 1.0);
    CHECK(hyper[2].alpha == 10.0);
    for (const auto& h : hyper) CHECK(h.gamma == 0.001);
    CHECK(config.train == TrainConfig{0.003, 0.0015, 400, 1e-5, 0});
    CHECK(config.radius == 2);

    config.gamma = {0.0, 0.1, 0.2};
    CHECK(cli::resolve_hyper(config, ds, betas)[1].gamma == 0.1);
    config.gamma = {0.0, 0.1};
    CHECK_THROWS_AS(cli::resolve_hyper(config, ds, betas), ConfigError);
}

TEST_CASE("beta resolution") {
    cli::RunConfig config;
    auto data = cli::prepare_data(config);
    for (std::size_t i = 0; i < data.dataset.views.size(); ++i) {
        double max_train = 0.0;
        for (auto r : data.dataset.split.train) {
            max_train = std::max(max_train, data.dataset.views[i].data.row(r).cwiseAbs().maxCoeff());
        }
        CHECK(max_train == doctest::Approx(255.0).epsilon(1e-12));
    }
    config.beta = {"1", "auto", "2"};
    data = cli::prepare_data(config);
    CHECK(data.betas[0] == 1.0);
    CHECK(data.betas[2] == 2.0);
    config.beta = {"x"};
    CHECK_THROWS_AS(cli::prepare_data(config), ConfigError);
}

TEST_CASE("train writes a model, codes and a trace") {
    oracle::TempDir dir;
    cli::RunConfig config;
    config.out = dir.path();
    std::ostringstream out;
    CHECK(cli::cmd_train(config, out) == cli::kExitOk);
    CHECK(out.str().find("final objective") != std::string::npos);
    const auto model = io::load_model(dir / "model.dmhm");
    CHECK(model.variant == "dmh");
    CHECK(model.code_length == 32);
    const auto trace = read_json(dir / "trace.json");
    CHECK(trace["objective_per_iteration"].size() <= 400);
    CHECK(trace["objective_per_iteration"].size() == trace["iterations_run"].get<std::size_t>());
    CHECK(io::read_codes(dir / "train_codes.dmhc").code_length() == 32);
}

TEST_CASE("train is byte-reproducible") {
    oracle::TempDir a, b;
    cli::RunConfig config;
    config.train.seed = 5;
    std::ostringstream sink;
    config.out = a.path();
    cli::cmd_train(config, sink);
    config.out = b.path();
    cli::cmd_train(config, sink);
    CHECK(oracle::file_bytes(a / "model.dmhm") == oracle::file_bytes(b / "model.dmhm"));
    CHECK(oracle::file_bytes(a / "trace.json") == oracle::file_bytes(b / "trace.json"));
}

TEST_CASE("gamma 0 is recorded as the ablation variant") {
    oracle::TempDir dir;
    cli::RunConfig config;
    config.gamma = {0.0};
    config.out = dir.path();
    std::ostringstream sink;
    cli::cmd_train(config, sink);
    CHECK(io::load_model(dir / "model.dmhm").variant == "dmh-no-mcr");
}

TEST_CASE("eval reports both directions per code length") {
    oracle::TempDir dir;
    cli::RunConfig config;
    config.code_lengths = {16, 32, 64, 96, 128};
    config.test_fraction = 0.1;
    config.out = dir.path();
    std::ostringstream sink;
    CHECK(cli::cmd_eval(config, sink) == cli::kExitOk);
    for (int c : config.code_lengths) {
        const auto doc = read_json(dir / ("eval_c" + std::to_string(c) + ".json"));
        CHECK(doc["code_length"] == c);
        REQUIRE(doc["tasks"].size() == 2);
        CHECK(doc["tasks"][0]["task"] == "view0->view1");
        CHECK(doc["tasks"][1]["task"] == "view1->view0");
        CHECK(doc["tasks"][0]["radius"] == 2);
    }
}

TEST_CASE("eval of a saved model") {
    oracle::TempDir dir;
    cli::RunConfig config;
    config.out = dir.path();
    std::ostringstream sink;
    cli::cmd_train(config, sink);
    config.model_path = dir / "model.dmhm";
    config.radius = 32;
    CHECK(cli::cmd_eval(config, sink) == cli::kExitOk);
    const auto doc = read_json(dir / "eval_c32.json");
    for (const auto& task : doc["tasks"]) CHECK(task["recall"] == 1.0);

    config.model_path = dir / "missing.dmhm";
    CHECK_THROWS_AS(cli::cmd_eval(config, sink), FileError);
}

TEST_CASE("generate then train from files") {
    oracle::TempDir dir;
    cli::RunConfig config;
    config.out = dir / "data";
    std::ostringstream sink;
    CHECK(cli::cmd_generate(config, sink) == cli::kExitOk);
    config.view_paths = {dir / "data/view_0.dmh", dir / "data/view_1.dmh"};
    config.labels_path = dir / "data/labels.dmh";
    config.out = dir / "run";
    config.train.max_iter = 20;
    CHECK(cli::cmd_train(config, sink) == cli::kExitOk);
    const auto model = io::load_model(dir / "run/model.dmhm");
    CHECK(model.views[0].id == "view_0");
    CHECK(model.views[2].is_label_view);

    config.model_path = dir / "run/model.dmhm";
    config.input_path = dir / "data/view_1.dmh";
    config.view_id = "view_1";
    CHECK(cli::cmd_encode(config, sink) == cli::kExitOk);
    const auto codes = io::read_codes(dir / "run/codes_view_1.dmhc");
    CHECK(codes.size() == 200);

    config.view_paths.clear();
    config.labels_path.clear();
    config.view_paths = {dir / "data/view_0.dmh"};
    CHECK_THROWS_AS(cli::cmd_train(config, sink), ConfigError);
}

TEST_CASE("ablation grid and reproducibility") {
    oracle::TempDir a, b;
    cli::RunConfig config;
    config.code_lengths = {8};
    config.train.max_iter = 30;
    config.gamma_grid = cli::reference_gamma_grid();
    config.out = a.path();
    std::ostringstream sink;
    CHECK(cli::cmd_ablate(config, sink) == cli::kExitOk);
    const auto doc = read_json(a / "ablation.json");
    REQUIRE(doc["runs"].size() == 7);
    CHECK(doc["runs"][0]["value"] == 1e-5);
    CHECK(doc["runs"][6]["value"] == 10.0);
    config.out = b.path();
    cli::cmd_ablate(config, sink);
    CHECK(oracle::file_bytes(a / "ablation.json") == oracle::file_bytes(b / "ablation.json"));
}

TEST_CASE("default ablation pairs gamma against zero") {
    oracle::TempDir dir;
    cli::RunConfig config;
    config.code_lengths = {8};
    config.train.max_iter = 20;
    config.seeds = 2;
    config.out = dir.path();
    std::ostringstream sink;
    cli::cmd_ablate(config, sink);
    const auto doc = read_json(dir / "ablation.json");
    REQUIRE(doc["runs"].size() == 4);
    CHECK(doc["runs"][0]["variant"] == "dmh");
    CHECK(doc["runs"][1]["variant"] == "dmh-no-mcr");
    REQUIRE(doc["comparisons"].size() == 2);
    const double delta = doc["runs"][0]["decorrelation"].get<double>() -
                         doc["runs"][1]["decorrelation"].get<double>();
    CHECK(doc["comparisons"][0]["delta_decorrelation"] == delta);
}

TEST_CASE("gradcheck passes and catches a sign error") {
    cli::RunConfig config;
    std::ostringstream out;
    CHECK(cli::cmd_gradcheck(config, out) == cli::kExitOk);
    config.inject_sign_error = true;
    config.instances = 3;
    std::ostringstream bad;
    CHECK(cli::cmd_gradcheck(config, bad) == cli::kExitFailure);
    CHECK(bad.str().find("FAIL") != std::string::npos);
}

TEST_CASE("propcheck reports equilateral angles for d=2, c=3") {
    cli::RunConfig config;
    std::ostringstream out;
    cli::cmd_propcheck(config, out);
    const auto text = out.str();
    CHECK(text.find("equal angles d=2 c=3              PASS") != std::string::npos);
    CHECK(text.find("angles(deg) 120 120 120") != std::string::npos);
}

TEST_SUITE("claims") {
    TEST_CASE("propcheck default run passes every check") {
        cli::RunConfig config;
        std::ostringstream out;
        CHECK(cli::cmd_propcheck(config, out) == cli::kExitOk);
        MESSAGE(out.str());
    }
}
