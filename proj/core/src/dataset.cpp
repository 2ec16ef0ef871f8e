#include "typeswap/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "typeswap/color.hpp"
#include "typeswap/hash.hpp"
#include "typeswap/png_io.hpp"
#include "typeswap/resize.hpp"

namespace typeswap {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Split s) { return s == Split::train ? "train" : "test"; }

std::string_view to_string(Background b) {
    switch (b) {
        case Background::black: return "black";
        case Background::white: return "white";
        case Background::noise_a: return "noise_a";
        case Background::noise_b: return "noise_b";
    }
    return "black";
}

Split parse_split(std::string_view s) {
    if (s == "train") return Split::train;
    if (s == "test") return Split::test;
    throw std::invalid_argument("unknown split: " + std::string(s));
}

Background parse_background(std::string_view s) {
    for (auto b : kAllBackgrounds)
        if (to_string(b) == s) return b;
    throw std::invalid_argument("unknown background: " + std::string(s));
}

bool is_noise(Background b) { return b == Background::noise_a || b == Background::noise_b; }

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::vector<SpriteRecord> load_manifest(const fs::path& path, bool load_images) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot open manifest: " + path.string(), 0);

    std::string line;
    if (!std::getline(in, line)) throw ManifestError("empty manifest", 1);
    const auto header = split_csv_line(line);
    const std::vector<std::string> expected = {"id", "name", "type1", "type2", "image_path"};
    if (header != expected)
        throw ManifestError("header must be id,name,type1,type2,image_path", 1);

    const fs::path base = path.parent_path();
    std::vector<SpriteRecord> records;
    std::set<std::string> seen;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv_line(line);
        if (f.size() != 5) throw ManifestError("expected 5 fields, got " + std::to_string(f.size()), row);
        SpriteRecord r;
        r.id = f[0];
        r.name = f[1];
        if (r.id.empty()) throw ManifestError("empty id", row);
        if (!seen.insert(r.id).second) throw ManifestError("duplicate id: " + r.id, row);
        for (std::size_t k : {2u, 3u}) {
            if (k == 3 && f[k].empty()) continue;
            auto idx = type_index(f[k]);
            if (!idx) throw ManifestError("unknown type: " + f[k], row);
            r.types.emplace_back(kTypeNames[*idx]);
        }
        if (r.types.size() == 2 && r.types[0] == r.types[1])
            throw ManifestError("duplicate type: " + r.types[0], row);
        r.image_path = base / f[4];
        if (load_images) {
            try {
                r.image = read_png_rgba(r.image_path);
            } catch (const ImageIoError& e) {
                throw ManifestError(std::string("unreadable image: ") + e.what(), row);
            }
        }
        records.push_back(std::move(r));
    }
    return records;
}

void write_manifest(const fs::path& path, const std::vector<SpriteRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
    out << "id,name,type1,type2,image_path\n";
    const fs::path base = path.parent_path();
    for (const auto& r : records) {
        out << r.id << ',' << r.name << ',' << r.types.at(0) << ','
            << (r.types.size() > 1 ? r.types[1] : "") << ','
            << fs::relative(r.image_path, base.empty() ? fs::path(".") : base).generic_string() << '\n';
    }
}

RgbImage composite_background(const RgbaImage& image, Background background, std::uint64_t seed,
                              std::string_view source_id) {
    RgbImage out(image.width(), image.height());
    std::mt19937_64 rng(
        mix_seed(seed, fnv1a(to_string(background), fnv1a(source_id))));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x) {
            std::array<double, 3> bg{};
            switch (background) {
                case Background::black: bg = {0.0, 0.0, 0.0}; break;
                case Background::white: bg = {1.0, 1.0, 1.0}; break;
                default: bg = {uni(rng), uni(rng), uni(rng)}; break;
            }
            const double a = image.at(x, y, 3);
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = a * image.at(x, y, c) + (1.0 - a) * bg[c];
        }
    return out;
}

AugmentedInstance make_instance(const SpriteRecord& record, const RgbaImage& sprite32,
                                Background background, bool flipped, std::uint64_t seed) {
    RgbImage rgb = composite_background(sprite32, background, seed, record.id);
    if (flipped) rgb = flip_horizontal(rgb);
    AugmentedInstance inst;
    inst.source_id = record.id;
    inst.image = rgb_to_hsv(rgb);
    inst.type_vector = record.type_vector();
    inst.background = background;
    inst.flipped = flipped;
    inst.split = record.split;
    return inst;
}

std::vector<AugmentedInstance> build_augmented_set(const std::vector<SpriteRecord>& records,
                                                   std::uint64_t seed) {
    std::vector<AugmentedInstance> out;
    out.reserve(records.size() * 8);
    for (const auto& r : records) {
        if (r.image.empty()) throw std::invalid_argument("record without image: " + r.id);
        const RgbaImage sprite = resize_bicubic(r.image);
        for (auto bg : kAllBackgrounds) {
            if (is_noise(bg) && r.split != Split::train) continue;
            for (bool flip : {false, true}) out.push_back(make_instance(r, sprite, bg, flip, seed));
        }
    }
    return out;
}

DatasetSplit split_dataset(const std::vector<SpriteRecord>& records, double test_fraction,
                           std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("test_fraction must lie in (0,1)");
    const std::size_t n = records.size();
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
    if (n_test == 0 || n_test >= n)
        throw std::invalid_argument("split would leave an empty side");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> is_test(n, false);
    for (std::size_t i = 0; i < n_test; ++i) is_test[order[i]] = true;

    DatasetSplit s;
    for (std::size_t i = 0; i < n; ++i) {
        SpriteRecord r = records[i];
        r.split = is_test[i] ? Split::test : Split::train;
        (is_test[i] ? s.test : s.train).push_back(std::move(r));
    }
    return s;
}

namespace {

std::string cache_file_name(const AugmentedInstance& inst) {
    return inst.source_id + "_" + std::string(to_string(inst.background)) +
           (inst.flipped ? "_flip" : "") + ".png";
}

}  // namespace

void write_augmented_cache(const fs::path& dir, const std::vector<AugmentedInstance>& instances) {
    fs::create_directories(dir);
    json index = json::array();
    for (const auto& inst : instances) {
        const std::string file = cache_file_name(inst);
        write_png(dir / file, hsv_to_rgb(inst.image));
        index.push_back({{"file", file},
                         {"source_id", inst.source_id},
                         {"background", to_string(inst.background)},
                         {"flipped", inst.flipped},
                         {"split", to_string(inst.split)},
                         {"type_vector", inst.type_vector.values}});
    }
    std::ofstream(dir / "index.json") << index.dump(1) << '\n';
}

std::vector<AugmentedInstance> read_augmented_cache(const fs::path& dir) {
    std::ifstream in(dir / "index.json");
    if (!in) throw std::runtime_error("missing cache index: " + (dir / "index.json").string());
    const json index = json::parse(in);
    std::vector<AugmentedInstance> out;
    for (const auto& e : index) {
        AugmentedInstance inst;
        inst.source_id = e.at("source_id").get<std::string>();
        inst.background = parse_background(e.at("background").get<std::string>());
        inst.flipped = e.at("flipped").get<bool>();
        inst.split = parse_split(e.at("split").get<std::string>());
        inst.type_vector.values = e.at("type_vector").get<std::array<double, kNumTypes>>();
        inst.image = rgb_to_hsv(rgba_to_rgb(read_png_rgba(dir / e.at("file").get<std::string>())));
        out.push_back(std::move(inst));
    }
    return out;
}

std::vector<FaceRecord> load_face_index(const fs::path& index_path) {
    std::ifstream in(index_path);
    if (!in) throw std::runtime_error("cannot open face index: " + index_path.string());
    const json index = json::parse(in);
    const fs::path base = index_path.parent_path();
    std::vector<FaceRecord> faces;
    faces.reserve(index.size());
    for (const auto& e : index) {
        FaceRecord f;
        f.id = e.at("id").get<std::string>();
        f.image_path = base / e.at("path").get<std::string>();
        f.image = rgb_to_hsv(rgba_to_rgb(resize_bicubic(read_png_rgba(f.image_path))));
        faces.push_back(std::move(f));
    }
    return faces;
}

void write_face_index(const fs::path& index_path, const std::vector<FaceRecord>& faces) {
    json index = json::array();
    const fs::path base = index_path.parent_path();
    for (const auto& f : faces)
        index.push_back({{"id", f.id},
                         {"path", fs::relative(f.image_path, base.empty() ? fs::path(".") : base)
                                      .generic_string()}});
    std::ofstream(index_path) << index.dump(1) << '\n';
}

}  // namespace typeswap
