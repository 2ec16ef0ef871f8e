#include <doctest.h>

#include <fstream>
#include <limits>

#include "../support/fixtures.hpp"
#include "typeswap/adam.hpp"
#include "typeswap/checkpoint.hpp"
#include "typeswap/training.hpp"

using namespace typeswap;
using testing::TempDir;

TEST_SUITE("training") {

TEST_CASE("transfer plan mirrors the schedule") {
    const auto p = transfer_plan();
    REQUIRE(p.stages.size() == 5);
    const double lr[] = {1e-4, 1e-5, 5e-5, 2e-5, 1e-5};
    const int epochs[] = {10, 50, 100, 100, 100};
    const int batch[] = {128, 128, 256, 256, 256};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(p.stages[i].learning_rate == lr[i]);
        CHECK(p.stages[i].epochs == epochs[i]);
        CHECK(p.stages[i].batch_size == batch[i]);
        CHECK(p.stages[i].dataset == (i < 2 ? StageDataset::faces : StageDataset::pokemon));
        CHECK(p.stages[i].beta1 == 0.9);
        CHECK(p.stages[i].beta2 == 0.999);
        CHECK(p.stages[i].epsilon == 1e-7);
    }
    const auto s = p.scaled(0.1);
    const int scaled[] = {1, 5, 10, 10, 10};
    for (std::size_t i = 0; i < 5; ++i) CHECK(s.stages[i].epochs == scaled[i]);
}

TEST_CASE("baseline plan") {
    const auto p = baseline_plan();
    CHECK(p.stages.size() == 11);
    CHECK(p.total_epochs() == 550);
    CHECK(p.initialization == Initialization::fresh);
    CHECK(p.stages[0].learning_rate == 1e-4);
    CHECK(p.stages[0].batch_size == 128);
    for (std::size_t i = 1; i < 11; ++i) {
        CHECK(p.stages[i].learning_rate == 1e-5);
        CHECK(p.stages[i].batch_size == 256);
        CHECK(p.stages[i].dataset == StageDataset::pokemon);
    }
    for (const auto& s : p.scaled(0.02).stages) CHECK(s.epochs == 1);
}

TEST_CASE("plans serialise losslessly") {
    TempDir dir;
    for (const auto& p : {transfer_plan(3), baseline_plan(4).scaled(0.3)}) {
        save_plan(dir / "p.json", p);
        CHECK(load_plan(dir / "p.json") == p);
    }
}

TEST_CASE("plan validation") {
    auto p = transfer_plan();
    std::swap(p.stages[1], p.stages[2]);
    CHECK_THROWS(p.validate());
    CHECK_THROWS(transfer_plan().scaled(0.0));
    StageConfig s;
    s.epochs = 0;
    CHECK_THROWS(s.validate());
    s.epochs = 1;
    s.batch_size = 0;
    CHECK_THROWS(s.validate());
}

TEST_CASE("epochs = 0 is rejected by train_stage") {
    Cvae model(ModelConfig::miniature(), 1);
    std::vector<TrainingSample> data{{HsvImage(8, 8, 0.5), encode_type_vector({"Fire"})}};
    StageConfig s;
    s.epochs = 0;
    CHECK_THROWS_AS(train_stage(model, data, s), std::invalid_argument);
    s.epochs = 1;
    CHECK_THROWS_AS(train_stage(model, std::span<const TrainingSample>{}, s), std::invalid_argument);
}

TEST_CASE("adam first step moves each parameter by about lr") {
    ParameterSet p(ModelConfig::miniature());
    ParameterSet g = p.zeros_like();
    for (std::size_t i = 0; i < g.size(); ++i) g.values()[i] = (i % 2 ? 1.0 : -3.0);
    Adam adam({0.01, 0.9, 0.999, 1e-7}, p.size());
    adam.step(p, g);
    CHECK(adam.steps() == 1);
    CHECK(p.values()[0] == doctest::Approx(0.01).epsilon(1e-5));
    CHECK(p.values()[1] == doctest::Approx(-0.01).epsilon(1e-5));
}

TEST_CASE("same seed gives the same loss sequence; steps per epoch") {
    const auto data = testing::sprite_samples(10, 3);
    StageConfig s;
    s.epochs = 3;
    s.batch_size = 4;
    s.seed = 5;
    auto run = [&](std::uint64_t seed, int micro) {
        Cvae m(ModelConfig::desk(), 1);
        StageConfig c = s;
        c.seed = seed;
        TrainOptions o;
        o.micro_batch = micro;
        return train_stage(m, data, c, 0, o);
    };
    const auto a = run(5, 32), b = run(5, 32), c = run(6, 32), d = run(5, 2), e = run(5, 2);
    REQUIRE(a.size() == 3);
    CHECK(a.back().steps == 9);  // ceil(10/4) = 3 per epoch
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a[i].mean_loss == b[i].mean_loss);
        CHECK(std::isfinite(a[i].mean_loss));
        // Noise is drawn per micro-batch, so splitting changes the draws.
        CHECK(d[i].mean_loss == e[i].mean_loss);
        CHECK(d[i].mean_loss == doctest::Approx(a[i].mean_loss).epsilon(1e-3));
    }
    CHECK(a[2].mean_loss != c[2].mean_loss);
}

TEST_CASE("max_steps caps the run") {
    const auto data = testing::sprite_samples(8, 3);
    Cvae m(ModelConfig::desk(), 1);
    StageConfig s;
    s.epochs = 10;
    s.batch_size = 4;
    TrainOptions o;
    o.max_steps = 3;
    const auto recs = train_stage(m, data, s, 0, o);
    CHECK(recs.back().steps == 3);
}

TEST_CASE("divergence aborts with the last good checkpoint") {
    TempDir dir;
    const auto data = testing::sprite_samples(4, 3);
    Cvae m(ModelConfig::desk(), 1);
    TrainingPlan plan;
    plan.name = "diverge";
    StageConfig ok;
    ok.batch_size = 4;
    StageConfig bad = ok;
    bad.learning_rate = 1e300;
    bad.epochs = 3;
    plan.stages = {ok, bad};
    try {
        run_plan(m, plan, {{}, data}, dir.path());
        FAIL("expected divergence");
    } catch (const TrainingDiverged& e) {
        CHECK(e.last_good_checkpoint() == (dir / "stage0.ckpt").string());
        CHECK(std::filesystem::exists(dir / "stage0.ckpt"));
    }
}

TEST_CASE("run_plan writes checkpoints and a JSON-lines log") {
    TempDir dir;
    const auto faces = testing::sprite_samples(6, 1);
    const auto sprites = testing::sprite_samples(6, 2);
    Cvae m(ModelConfig::desk(), 1);
    auto plan = transfer_plan(7).scaled(0.01);
    for (auto& s : plan.stages) s.batch_size = 6;
    const auto log = run_plan(m, plan, {faces, sprites}, dir.path());
    CHECK(log.epochs.size() == 5);
    CHECK(log.stages.size() == 5);
    for (int k = 0; k < 5; ++k) CHECK(std::filesystem::exists(dir / ("stage" + std::to_string(k) + ".ckpt")));
    const auto fin = load_checkpoint(dir / "final.ckpt");
    CHECK(fin.params == m.params());
    CHECK(fin.provenance == "transfer/final");
    CHECK(load_checkpoint(dir / "stage0.ckpt").provenance == "transfer/stage0:faces");
    CHECK(load_checkpoint(dir / "stage4.ckpt").provenance == "transfer/stage4:pokemon");
    std::ifstream in(dir / "log.jsonl");
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        CHECK(nlohmann::json::parse(line).contains("kind"));
        ++lines;
    }
    CHECK(lines == 10);
}

}
