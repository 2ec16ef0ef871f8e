#include "typeswap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "typeswap/color.hpp"
#include "typeswap/hash.hpp"
#include "typeswap/png_io.hpp"

namespace typeswap::synth {

namespace fs = std::filesystem;

namespace {

// (hue, saturation, value) per type, canonical order.
constexpr std::array<Hsv, kNumTypes> kPalette = {{
    {0.22, 0.70, 0.70},  // Bug
    {0.70, 0.25, 0.28},  // Dark
    {0.70, 0.65, 0.60},  // Dragon
    {0.15, 0.85, 0.95},  // Electric
    {0.93, 0.35, 0.95},  // Fairy
    {0.04, 0.60, 0.60},  // Fighting
    {0.01, 0.90, 0.95},  // Fire
    {0.58, 0.30, 0.90},  // Flying
    {0.76, 0.50, 0.45},  // Ghost
    {0.32, 0.75, 0.70},  // Grass
    {0.10, 0.55, 0.70},  // Ground
    {0.50, 0.40, 0.95},  // Ice
    {0.09, 0.20, 0.85},  // Normal
    {0.80, 0.60, 0.65},  // Poison
    {0.90, 0.60, 0.85},  // Psychic
    {0.08, 0.45, 0.55},  // Rock
    {0.60, 0.10, 0.72},  // Steel
    {0.60, 0.75, 0.85},  // Water
}};

constexpr std::array<double, kNumTypes> kWeights = {
    0.075, 0.040, 0.040, 0.050, 0.040, 0.040, 0.060, 0.050, 0.040,
    0.085, 0.045, 0.035, 0.090, 0.045, 0.060, 0.050, 0.040, 0.115};

Rgb jitter(const Hsv& base, std::mt19937_64& rng, double amount) {
    std::uniform_real_distribution<double> d(-amount, amount);
    Hsv h = base;
    h[0] = std::fmod(h[0] + d(rng) * 0.3 + 1.0, 1.0);
    h[1] = std::clamp(h[1] + d(rng), 0.0, 1.0);
    h[2] = std::clamp(h[2] + d(rng), 0.0, 1.0);
    return hsv_to_rgb(h);
}

struct Ellipse {
    double cx, cy, rx, ry;
    bool contains(double x, double y) const {
        const double dx = (x - cx) / rx, dy = (y - cy) / ry;
        return dx * dx + dy * dy <= 1.0;
    }
};

void paint(RgbaImage& img, const Ellipse& e, const Rgb& c) {
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            if (e.contains(x + 0.5, y + 0.5)) {
                for (int k = 0; k < 3; ++k) img.at(x, y, k) = c[static_cast<std::size_t>(k)];
                img.at(x, y, 3) = 1.0;
            }
}

void paint(RgbImage& img, const Ellipse& e, const Rgb& c) {
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            if (e.contains(x + 0.5, y + 0.5))
                for (int k = 0; k < 3; ++k) img.at(x, y, k) = c[static_cast<std::size_t>(k)];
}

std::vector<std::string> draw_types(std::mt19937_64& rng) {
    std::discrete_distribution<std::size_t> pick(kWeights.begin(), kWeights.end());
    std::bernoulli_distribution dual(0.5);
    std::vector<std::string> t{std::string(kTypeNames[pick(rng)])};
    if (dual(rng)) {
        std::size_t second;
        do second = pick(rng);
        while (kTypeNames[second] == t[0]);
        t.emplace_back(kTypeNames[second]);
    }
    return t;
}

RgbaImage creature_impl(const std::vector<std::string>& types, std::uint64_t shape_seed, int size,
                        double shift) {
    std::mt19937_64 geo(shape_seed);
    std::mt19937_64 col(mix_seed(shape_seed, fnv1a(types.front())));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double s = size;
    RgbaImage img(size, size, 0.0);

    const std::size_t primary = require_type_index(types.front());
    const std::size_t secondary = types.size() > 1 ? require_type_index(types[1]) : primary;
    const Rgb body = jitter(kPalette[primary], col, 0.08);
    const Rgb accent = jitter(kPalette[secondary], col, 0.08);
    const Rgb outline = hsv_to_rgb(Hsv{kPalette[primary][0], kPalette[primary][1], 0.2});

    const double bx = s * (0.5 + 0.1 * (u(geo) - 0.5)) + shift * s;
    const double by = s * (0.62 + 0.08 * (u(geo) - 0.5));
    const double brx = s * (0.22 + 0.1 * u(geo));
    const double bry = s * (0.2 + 0.08 * u(geo));
    const double hr = s * (0.14 + 0.06 * u(geo));
    const double hx = bx + s * 0.1 * (u(geo) - 0.5);
    const double hy = by - bry - hr * 0.6;

    paint(img, {bx, by, brx + 2, bry + 2}, outline);
    paint(img, {hx, hy, hr + 2, hr + 2}, outline);
    paint(img, {bx, by, brx, bry}, body);
    paint(img, {hx, hy, hr, hr}, body);

    // markings: spots or a belly patch in the secondary colour
    if (u(geo) < 0.5) {
        paint(img, {bx, by + bry * 0.25, brx * 0.6, bry * 0.55}, accent);
    } else {
        for (int k = 0; k < 4; ++k)
            paint(img, {bx + brx * (u(geo) - 0.5), by + bry * (u(geo) - 0.5), s * 0.05, s * 0.05},
                  accent);
    }
    // ears / appendages
    const double ear = s * (0.04 + 0.04 * u(geo));
    paint(img, {hx - hr * 0.7, hy - hr * 0.8, ear, ear * 1.8}, accent);
    paint(img, {hx + hr * 0.7, hy - hr * 0.8, ear, ear * 1.8}, accent);
    // eyes
    const Rgb white{1.0, 1.0, 1.0}, black{0.05, 0.05, 0.05};
    for (double side : {-1.0, 1.0}) {
        paint(img, {hx + side * hr * 0.4, hy, hr * 0.22, hr * 0.28}, white);
        paint(img, {hx + side * hr * 0.4, hy + hr * 0.05, hr * 0.1, hr * 0.15}, black);
    }
    return img;
}

}  // namespace

const std::array<double, kNumTypes>& catalog_type_weights() { return kWeights; }

RgbaImage creature_sprite(const std::vector<std::string>& types, std::uint64_t shape_seed, int size) {
    return creature_impl(types, shape_seed, size, 0.0);
}

RgbImage face_image(std::uint64_t seed, int size) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double s = size;
    // Backgrounds: white for about a third, otherwise a light tint.
    Rgb bg = u(rng) < 0.35 ? Rgb{1.0, 1.0, 1.0} : hsv_to_rgb(Hsv{u(rng), 0.15 + 0.3 * u(rng), 0.6 + 0.4 * u(rng)});
    RgbImage img(size, size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = bg[static_cast<std::size_t>(c)];

    // Hair hue skews pink/purple, which most types do not share.
    double hair_h = u(rng) < 0.4 ? 0.85 + 0.12 * u(rng) : u(rng);
    const Rgb hair = hsv_to_rgb(Hsv{hair_h, 0.3 + 0.6 * u(rng), 0.35 + 0.6 * u(rng)});
    const Rgb skin = hsv_to_rgb(Hsv{0.06, 0.15 + 0.1 * u(rng), 0.9 + 0.1 * u(rng)});
    const Rgb iris = hsv_to_rgb(Hsv{u(rng), 0.6, 0.7});

    const double cx = s * (0.5 + 0.08 * (u(rng) - 0.5));
    paint(img, {cx, s * 0.45, s * 0.42, s * 0.45}, hair);
    paint(img, {cx, s * 0.58, s * 0.28, s * 0.32}, skin);
    paint(img, {cx, s * 0.33, s * 0.33, s * 0.14}, hair);  // fringe
    for (double side : {-1.0, 1.0}) {
        paint(img, {cx + side * s * 0.12, s * 0.58, s * 0.07, s * 0.09}, {1.0, 1.0, 1.0});
        paint(img, {cx + side * s * 0.12, s * 0.6, s * 0.05, s * 0.07}, iris);
    }
    paint(img, {cx, s * 0.76, s * 0.04, s * 0.015}, {0.6, 0.2, 0.2});
    return img;
}

std::vector<SpriteRecord> make_catalog(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<SpriteRecord> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        SpriteRecord r;
        char id[16];
        std::snprintf(id, sizeof(id), "c%04zu", i + 1);
        r.id = id;
        r.name = "Creature " + std::to_string(i + 1);
        r.types = draw_types(rng);
        r.image = creature_sprite(r.types, mix_seed(seed, i));
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<RegionalEntry> make_regional(const std::vector<SpriteRecord>& catalog, std::size_t count,
                                         std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed, 0x5e610a1ULL));
    std::vector<RegionalEntry> out;
    if (catalog.empty()) return out;
    std::vector<std::size_t> order(catalog.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t k = 0; k < std::min(count, order.size()); ++k) {
        const auto& orig = catalog[order[k]];
        std::vector<std::string> types;
        do types = draw_types(rng);
        while (types == orig.types);
        RegionalEntry e;
        e.variant_id = orig.id + "-r";
        e.original_id = orig.id;
        e.types = types;
        // the catalog's shape seed is derived from its index
        const std::uint64_t shape = mix_seed(seed, std::stoull(orig.id.substr(1)) - 1);
        e.image = creature_impl(types, shape, orig.image.empty() ? 96 : orig.image.width(), 0.04);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<SpriteRecord> write_catalog(const fs::path& dir, std::size_t count, std::uint64_t seed) {
    fs::create_directories(dir / "img");
    auto records = make_catalog(count, seed);
    for (auto& r : records) {
        r.image_path = dir / "img" / (r.id + ".png");
        write_png(r.image_path, r.image);
    }
    write_manifest(dir / "manifest.csv", records);
    return records;
}

void write_faces(const fs::path& dir, std::size_t count, std::uint64_t seed) {
    fs::create_directories(dir / "img");
    std::vector<FaceRecord> faces;
    faces.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        FaceRecord f;
        char id[16];
        std::snprintf(id, sizeof(id), "f%06zu", i + 1);
        f.id = id;
        f.image_path = dir / "img" / (f.id + ".png");
        write_png(f.image_path, face_image(mix_seed(seed, i)));
        faces.push_back(std::move(f));
    }
    write_face_index(dir / "index.json", faces);
}

void write_regional(const fs::path& dir, const std::vector<SpriteRecord>& catalog, std::size_t count,
                    std::uint64_t seed) {
    fs::create_directories(dir / "regional");
    auto entries = make_regional(catalog, count, seed);
    std::ofstream out(dir / "regional.csv");
    out << "variant_id,original_id,type1,type2,image_path\n";
    for (auto& e : entries) {
        const fs::path rel = fs::path("regional") / (e.variant_id + ".png");
        write_png(dir / rel, e.image);
        out << e.variant_id << ',' << e.original_id << ',' << e.types[0] << ','
            << (e.types.size() > 1 ? e.types[1] : "") << ',' << rel.generic_string() << '\n';
    }
}

}  // namespace typeswap::synth
