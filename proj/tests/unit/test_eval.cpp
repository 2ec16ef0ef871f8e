#include <doctest.h>

#include "../support/fixtures.hpp"
#include "typeswap/eval.hpp"
#include "typeswap/png_io.hpp"

using namespace typeswap;

TEST_SUITE("eval") {

TEST_CASE("interpolation endpoints are the reconstructions") {
    const Cvae model(ModelConfig::desk(), 4);
    const auto s = testing::sprite_samples(2, 8);
    for (int steps : {2, 5}) {
        const auto frames = interpolate_latents(model, s[0].image, s[0].types, s[1].image, s[1].types, steps);
        REQUIRE(frames.size() == static_cast<std::size_t>(steps));
        CHECK(frames.front() == reconstruct(model, s[0].image, s[0].types));
        CHECK(frames.back() == reconstruct(model, s[1].image, s[1].types));
    }
    CHECK_THROWS(interpolate_latents(model, s[0].image, s[0].types, s[1].image, s[1].types, 1));
}

TEST_CASE("midpoint decodes the averaged latent") {
    const Cvae model(ModelConfig::desk(), 4);
    const auto s = testing::sprite_samples(2, 8);
    const auto za = model.encode(s[0].image, s[0].types).mean;
    const auto zb = model.encode(s[1].image, s[1].types).mean;
    std::vector<double> mid(za.size());
    for (std::size_t d = 0; d < mid.size(); ++d) mid[d] = 0.5 * za[d] + 0.5 * zb[d];
    const auto frames = interpolate_latents(model, s[0].image, s[0].types, s[1].image, s[1].types, 3);
    CHECK(frames[1] == model.decode(mid).image);
}

TEST_CASE("swap to own types at magnitude 1 is the reconstruction") {
    const Cvae model(ModelConfig::desk(), 4);
    const auto cat = synth::make_catalog(3, 2);
    for (const auto& r : cat) {
        const auto in = prepare_for_eval(r.image, 0, r.id);
        CHECK(type_swap(model, in, r.types, 1.0) == reconstruct(model, in, r.type_vector()));
    }
}

TEST_CASE("reconstruction report aggregates per split") {
    const Cvae model(ModelConfig::desk(), 4);
    auto recs = synth::make_catalog(4, 5);
    recs[3].split = Split::test;
    const auto inst = build_augmented_set(recs, 1);
    const auto r = reconstruction_report(model, inst, "baseline");
    CHECK(r.images.size() == 8);  // black background, plain and flipped
    CHECK(r.aggregates.at("train").count == 6);
    CHECK(r.aggregates.at("test").count == 2);
    CHECK(r.aggregates.at("test+train").count == 8);
    double mse = 0;
    for (const auto& s : r.images) {
        mse += s.mse;
        CHECK(s.background == "black");
        CHECK(s.mse >= 0.0);
    }
    CHECK(r.aggregates.at("test+train").mse == doctest::Approx(mse / 8));
    CHECK(reconstruction_report(model, inst, "baseline", true).images.size() == inst.size());
    CHECK(r.to_json() == reconstruction_report(model, inst, "baseline").to_json());
    CHECK(r.to_json()["model"] == "baseline");

    const auto table = render_quality_table({r}, "mse");
    CHECK(table.find("baseline") != std::string::npos);
    CHECK(table.find("Test and train") != std::string::npos);
}

TEST_CASE("untrained model scores poorly") {
    const Cvae model(ModelConfig::desk(), 4);
    auto recs = synth::make_catalog(6, 5);
    const auto r = reconstruction_report(model, build_augmented_set(recs, 1), "fresh");
    CHECK(r.aggregates.at("train").ssim < 0.3);
}

TEST_CASE("regional pairs load and score") {
    testing::TempDir dir;
    const auto cat = synth::write_catalog(dir / "cat", 12, 7);
    synth::write_regional(dir.path(), cat, 4, 7);
    const auto loaded = load_manifest(dir / "cat/manifest.csv");
    const auto pairs = load_regional_pairs(dir / "regional.csv", loaded);
    REQUIRE(pairs.size() == 4);
    for (const auto& p : pairs) {
        CHECK(p.variant_types != p.original.types);
        CHECK(p.variant_id == p.original.id + "-r");
        CHECK_FALSE(p.variant_image.empty());
    }
    const Cvae model(ModelConfig::desk(), 4);
    const auto r = original_to_regional_report(model, pairs, "transfer");
    CHECK(r.images.size() == 4);
    CHECK(render_regional_table({r}).find("transfer") != std::string::npos);
    CHECK_THROWS(original_to_regional_report(model, {}, "transfer"));
}

TEST_CASE("contact sheet geometry") {
    const RgbImage a(32, 32, 1.0);
    const auto sheet = contact_sheet({{a, a, a}, {a}}, 4);
    CHECK(sheet.width() == 3 * 128 + 4 * 2);
    CHECK(sheet.height() == 2 * 128 + 3 * 2);
}

}
