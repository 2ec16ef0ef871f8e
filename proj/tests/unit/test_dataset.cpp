#include <doctest.h>

#include <fstream>
#include <set>

#include "../support/fixtures.hpp"
#include "typeswap/dataset.hpp"
#include "typeswap/png_io.hpp"

using namespace typeswap;
using testing::TempDir;

namespace {

void write_file(const std::filesystem::path& p, const std::string& s) {
    std::ofstream(p) << s;
}

RgbaImage solid(int w, int h, double r, double g, double b, double a) {
    RgbaImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            img.at(x, y, 0) = r;
            img.at(x, y, 1) = g;
            img.at(x, y, 2) = b;
            img.at(x, y, 3) = a;
        }
    return img;
}

std::size_t error_row(const std::filesystem::path& manifest) {
    try {
        load_manifest(manifest);
    } catch (const ManifestError& e) {
        return e.row();
    }
    return 0;
}

std::vector<SpriteRecord> records(std::size_t n) {
    std::vector<SpriteRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        SpriteRecord r;
        r.id = "s" + std::to_string(i);
        r.types = {"Fire"};
        r.image = solid(40, 40, 0.8, 0.2, 0.1, 1.0);
        out.push_back(r);
    }
    return out;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("manifest rows map onto records") {
    TempDir dir;
    std::filesystem::create_directories(dir / "img");
    write_png(dir / "img/pikachu.png", solid(4, 4, 1, 1, 0, 1));
    write_png(dir / "img/b.png", solid(4, 4, 0, 1, 0, 0.5));
    write_file(dir / "m.csv",
               "id,name,type1,type2,image_path\n"
               "pikachu,Pikachu,Electric,,img/pikachu.png\n"
               "bulba,\"Bulba, the seed\",grass,Poison,img/b.png\n");
    const auto recs = load_manifest(dir / "m.csv");
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].types == std::vector<std::string>{"Electric"});
    CHECK(recs[1].name == "Bulba, the seed");
    CHECK(recs[1].types == std::vector<std::string>{"Grass", "Poison"});
    CHECK(recs[0].image.width() == 4);
    CHECK(recs[1].image.at(0, 0, 3) == doctest::Approx(128.0 / 255).epsilon(0.01));
}

TEST_CASE("manifest errors carry the row number") {
    TempDir dir;
    write_png(dir / "a.png", solid(2, 2, 0, 0, 0, 1));
    const std::string header = "id,name,type1,type2,image_path\n";
    write_file(dir / "unknown.csv", header + "a,A,Fire,,a.png\nb,B,Shadow,,a.png\n");
    CHECK(error_row(dir / "unknown.csv") == 3);
    CHECK_THROWS_WITH(load_manifest(dir / "unknown.csv"), doctest::Contains("unknown type"));

    write_file(dir / "dup.csv", header + "a,A,Fire,,a.png\na,A2,Water,,a.png\n");
    CHECK(error_row(dir / "dup.csv") == 3);
    CHECK_THROWS_WITH(load_manifest(dir / "dup.csv"), doctest::Contains("duplicate id"));

    write_file(dir / "img.csv", header + "a,A,Fire,,missing.png\n");
    CHECK(error_row(dir / "img.csv") == 2);
    CHECK_THROWS_WITH(load_manifest(dir / "img.csv"), doctest::Contains("unreadable image"));

    write_file(dir / "dualdup.csv", header + "a,A,Fire,fire,a.png\n");
    CHECK(error_row(dir / "dualdup.csv") == 2);

    CHECK_THROWS_AS(load_manifest(dir / "absent.csv"), ManifestError);
}

TEST_CASE("manifest written then read back") {
    TempDir dir;
    auto recs = records(3);
    for (auto& r : recs) {
        r.image_path = dir / (r.id + ".png");
        write_png(r.image_path, r.image);
    }
    recs[1].types = {"Grass", "Fairy"};
    write_manifest(dir / "m.csv", recs);
    const auto back = load_manifest(dir / "m.csv");
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back[i].id == recs[i].id);
        CHECK(back[i].types == recs[i].types);
    }
}

TEST_CASE("background compositing") {
    const auto opaque = solid(32, 32, 0.3, 0.6, 0.9, 1.0);
    const auto white = composite_background(opaque, Background::white, 1, "x");
    for (int c = 0; c < 3; ++c) CHECK(white.at(5, 5, c) == opaque.at(5, 5, c));

    const auto clear = solid(32, 32, 0.3, 0.6, 0.9, 0.0);
    for (double v : composite_background(clear, Background::black, 1, "x").pixels()) CHECK(v == 0.0);
    for (double v : composite_background(clear, Background::white, 1, "x").pixels()) CHECK(v == 1.0);

    const auto na = composite_background(clear, Background::noise_a, 4, "x");
    CHECK(na == composite_background(clear, Background::noise_a, 4, "x"));
    CHECK_FALSE(na == composite_background(clear, Background::noise_b, 4, "x"));
    CHECK_FALSE(na == composite_background(clear, Background::noise_a, 5, "x"));
    CHECK_FALSE(na == composite_background(clear, Background::noise_a, 4, "y"));
    CHECK(in_unit_range(na));

    const auto half = solid(1, 1, 1.0, 0.0, 0.0, 0.5);
    const auto mixed = composite_background(half, Background::white, 0, "h");
    CHECK(mixed.at(0, 0, 0) == doctest::Approx(1.0));
    CHECK(mixed.at(0, 0, 1) == doctest::Approx(0.5));
}

TEST_CASE("augmentation counts and content") {
    auto recs = records(3);
    recs[2].split = Split::test;
    const auto inst = build_augmented_set(recs, 9);
    CHECK(inst.size() == 8 + 8 + 4);
    std::size_t test_noise = 0, flips = 0;
    for (const auto& i : inst) {
        CHECK(i.image.width() == 32);
        CHECK(in_unit_range(i.image));
        if (i.split == Split::test && is_noise(i.background)) ++test_noise;
        flips += i.flipped;
    }
    CHECK(test_noise == 0);
    CHECK(flips == inst.size() / 2);

    SUBCASE("flipped instance is the column-reversed original") {
        std::mt19937_64 rng(3);
        SpriteRecord r;
        r.id = "asym";
        r.types = {"Bug"};
        r.image = testing::random_image<RgbaImage>(32, 32, rng);
        const auto set = build_augmented_set({r}, 2);
        for (std::size_t k = 0; k + 1 < set.size(); k += 2) {
            REQUIRE_FALSE(set[k].flipped);
            REQUIRE(set[k + 1].flipped);
            CHECK(set[k + 1].image == flip_horizontal(set[k].image));
            CHECK(flip_horizontal(flip_horizontal(set[k].image)) == set[k].image);
        }
    }
}

TEST_CASE("split is a deterministic creature-level partition") {
    auto recs = records(974);
    const auto a = split_dataset(recs, 147.0 / 974.0, 42);
    const auto b = split_dataset(recs, 147.0 / 974.0, 42);
    CHECK(a.train.size() == 827);
    CHECK(a.test.size() == 147);
    std::set<std::string> ids;
    for (const auto& r : a.train) {
        CHECK(r.split == Split::train);
        ids.insert(r.id);
    }
    for (const auto& r : a.test) {
        CHECK(r.split == Split::test);
        CHECK(ids.insert(r.id).second);
    }
    CHECK(ids.size() == 974);
    for (std::size_t i = 0; i < a.test.size(); ++i) CHECK(a.test[i].id == b.test[i].id);
    const auto c = split_dataset(recs, 147.0 / 974.0, 43);
    bool differs = false;
    for (std::size_t i = 0; i < a.test.size(); ++i) differs |= a.test[i].id != c.test[i].id;
    CHECK(differs);

    CHECK_THROWS(split_dataset(recs, 0.0, 1));
    CHECK_THROWS(split_dataset(recs, 1.0, 1));
    CHECK_THROWS(split_dataset(records(3), 0.01, 1));
}

TEST_CASE("augmented cache round trip") {
    TempDir dir;
    auto recs = records(2);
    recs[1].split = Split::test;
    recs[1].types = {"Water", "Ice"};
    const auto inst = build_augmented_set(recs, 1);
    write_augmented_cache(dir.path(), inst);
    const auto back = read_augmented_cache(dir.path());
    REQUIRE(back.size() == inst.size());
    for (std::size_t i = 0; i < inst.size(); ++i) {
        CHECK(back[i].source_id == inst[i].source_id);
        CHECK(back[i].background == inst[i].background);
        CHECK(back[i].flipped == inst[i].flipped);
        CHECK(back[i].split == inst[i].split);
        CHECK(back[i].type_vector == inst[i].type_vector);
        // PNG quantises to 8 bits per RGB channel.
        CHECK(mse_rgb(hsv_to_rgb(back[i].image), hsv_to_rgb(inst[i].image)) < 1e-5);
    }
}

TEST_CASE("face index round trip") {
    TempDir dir;
    std::mt19937_64 rng(8);
    std::vector<FaceRecord> faces(2);
    for (std::size_t i = 0; i < 2; ++i) {
        faces[i].id = "face" + std::to_string(i);
        faces[i].image_path = dir / (faces[i].id + ".png");
        write_png(faces[i].image_path, testing::random_image<RgbImage>(64, 48, rng));
    }
    write_face_index(dir / "index.json", faces);
    const auto back = load_face_index(dir / "index.json");
    REQUIRE(back.size() == 2);
    CHECK(back[1].id == "face1");
    CHECK(back[1].image.width() == 32);
    CHECK(back[1].image.height() == 32);
    CHECK(in_unit_range(back[1].image));
}

TEST_CASE("enum names round trip") {
    for (auto bg : kAllBackgrounds) CHECK(parse_background(to_string(bg)) == bg);
    CHECK(parse_split("test") == Split::test);
    CHECK_THROWS(parse_background("grey"));
}

}
