#include <doctest.h>

#include <random>

#include "../support/fixtures.hpp"
#include "typeswap/color.hpp"

using namespace typeswap;

TEST_SUITE("color") {

TEST_CASE("reference conversions") {
    auto near = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        for (int c = 0; c < 3; ++c)
            if (std::abs(a[c] - b[c]) > 1e-12) return false;
        return true;
    };
    CHECK(near(rgb_to_hsv(Rgb{1, 0, 0}), Hsv{0, 1, 1}));
    CHECK(near(rgb_to_hsv(Rgb{0.5, 0.5, 0.5}), Hsv{0, 0, 0.5}));
    CHECK(near(rgb_to_hsv(Rgb{0, 1, 0}), Hsv{1.0 / 3, 1, 1}));
    CHECK(near(rgb_to_hsv(Rgb{0, 0, 1}), Hsv{2.0 / 3, 1, 1}));
    CHECK(near(rgb_to_hsv(Rgb{1, 0, 1}), Hsv{5.0 / 6, 1, 1}));
    CHECK(near(rgb_to_hsv(Rgb{0, 0, 0}), Hsv{0, 0, 0}));
    CHECK(near(hsv_to_rgb(Hsv{0, 1, 1}), Rgb{1, 0, 0}));
    CHECK(near(hsv_to_rgb(Hsv{0.5, 1, 1}), Rgb{0, 1, 1}));
}

TEST_CASE("hue stays inside [0,1)") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 10000; ++i) {
        const Hsv h = rgb_to_hsv(Rgb{u(rng), u(rng), u(rng)});
        CHECK(h[0] >= 0.0);
        CHECK(h[0] < 1.0);
    }
}

TEST_CASE("round trip on 1000 random pixels") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0, 1);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const Rgb p{u(rng), u(rng), u(rng)};
        const Rgb q = hsv_to_rgb(rgb_to_hsv(p));
        for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(p[c] - q[c]));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("image conversion applies per pixel and stays in range") {
    std::mt19937_64 rng(3);
    const auto img = testing::random_image<RgbImage>(7, 5, rng);
    const HsvImage h = rgb_to_hsv(img);
    CHECK(in_unit_range(h));
    const Hsv p = rgb_to_hsv(Rgb{img.at(3, 2, 0), img.at(3, 2, 1), img.at(3, 2, 2)});
    for (int c = 0; c < 3; ++c) CHECK(h.at(3, 2, c) == p[static_cast<std::size_t>(c)]);
    const RgbImage back = hsv_to_rgb(h);
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(back.pixels()[i] == doctest::Approx(img.pixels()[i]).epsilon(1e-9));
}

}
