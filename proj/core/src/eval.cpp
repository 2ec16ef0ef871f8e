#include "typeswap/eval.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "typeswap/color.hpp"
#include "typeswap/png_io.hpp"
#include "typeswap/resize.hpp"

namespace typeswap {

void EvalReport::aggregate() {
    aggregates.clear();
    auto add = [&](const std::string& key, const ImageScore& s) {
        auto& a = aggregates[key];
        ++a.count;
        a.mse += s.mse;
        a.ssim += s.ssim;
    };
    for (const auto& s : images) {
        add(std::string(to_string(s.split)), s);
        add("test+train", s);
    }
    for (auto& [key, a] : aggregates) {
        a.mse /= static_cast<double>(a.count);
        a.ssim /= static_cast<double>(a.count);
    }
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json per_image = nlohmann::json::array();
    for (const auto& s : images)
        per_image.push_back({{"id", s.id},
                             {"split", to_string(s.split)},
                             {"background", s.background},
                             {"flipped", s.flipped},
                             {"mse", s.mse},
                             {"ssim", s.ssim}});
    nlohmann::json agg = nlohmann::json::object();
    for (const auto& [key, a] : aggregates) agg[key] = {{"count", a.count}, {"mse", a.mse}, {"ssim", a.ssim}};
    return {{"set", set_name}, {"model", model_tag}, {"aggregates", agg}, {"images", per_image}};
}

HsvImage reconstruct(const Cvae& model, const HsvImage& image, const TypeVector& types) {
    const LatentCode code = model.encode(image, types);
    return model.decode(code.mean).image;
}

EvalReport reconstruction_report(const Cvae& model, const std::vector<AugmentedInstance>& instances,
                                 const std::string& tag, bool all_backgrounds) {
    EvalReport r;
    r.set_name = all_backgrounds ? "reconstruction/all-backgrounds" : "reconstruction/black";
    r.model_tag = tag;
    for (const auto& inst : instances) {
        if (!all_backgrounds && inst.background != Background::black) continue;
        const RgbImage input = hsv_to_rgb(inst.image);
        const RgbImage output = hsv_to_rgb(reconstruct(model, inst.image, inst.type_vector));
        r.images.push_back({inst.source_id, inst.split, std::string(to_string(inst.background)), inst.flipped,
                            mse_rgb(input, output), ssim_yuv(input, output)});
    }
    r.aggregate();
    return r;
}

HsvImage type_swap(const Cvae& model, const HsvImage& image, const std::vector<std::string>& target_types,
                   double magnitude) {
    const TypeVector tv = encode_type_vector(target_types, magnitude);
    return reconstruct(model, image, tv);
}

std::vector<RegionalPair> load_regional_pairs(const std::filesystem::path& csv,
                                              const std::vector<SpriteRecord>& catalog) {
    std::ifstream in(csv);
    if (!in) throw std::runtime_error("cannot open regional list: " + csv.string());
    std::string line;
    std::getline(in, line);
    if (split_csv_line(line) != std::vector<std::string>{"variant_id", "original_id", "type1", "type2", "image_path"})
        throw ManifestError("header must be variant_id,original_id,type1,type2,image_path", 1);
    std::vector<RegionalPair> pairs;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 5) throw ManifestError("expected 5 fields", row);
        RegionalPair p;
        p.variant_id = f[0];
        auto it = std::find_if(catalog.begin(), catalog.end(), [&](const SpriteRecord& r) { return r.id == f[1]; });
        if (it == catalog.end()) throw ManifestError("unknown original id: " + f[1], row);
        p.original = *it;
        for (std::size_t k : {2u, 3u}) {
            if (f[k].empty()) continue;
            auto idx = type_index(f[k]);
            if (!idx) throw ManifestError("unknown type: " + f[k], row);
            p.variant_types.emplace_back(kTypeNames[*idx]);
        }
        if (p.variant_types.empty()) throw ManifestError("variant without types", row);
        if (p.variant_types == p.original.types)
            throw ManifestError("variant types must differ from the original's", row);
        p.variant_image = read_png_rgba(csv.parent_path() / f[4]);
        pairs.push_back(std::move(p));
    }
    return pairs;
}

HsvImage prepare_for_eval(const RgbaImage& source, std::uint64_t seed, std::string_view id) {
    return rgb_to_hsv(composite_background(resize_bicubic(source), Background::black, seed, id));
}

EvalReport original_to_regional_report(const Cvae& model, const std::vector<RegionalPair>& pairs,
                                       const std::string& tag, double magnitude, bool to_original_types) {
    if (pairs.empty()) throw std::invalid_argument("original_to_regional_report: no pairs");
    EvalReport r;
    r.set_name = to_original_types ? "regional/own-types" : "regional";
    r.model_tag = tag;
    for (const auto& p : pairs) {
        const HsvImage original = prepare_for_eval(p.original.image, 0, p.original.id);
        const RgbImage target = hsv_to_rgb(prepare_for_eval(p.variant_image, 0, p.variant_id));
        const auto& types = to_original_types ? p.original.types : p.variant_types;
        const RgbImage output = hsv_to_rgb(type_swap(model, original, types, magnitude));
        r.images.push_back({p.variant_id, Split::test, "black", false, mse_rgb(target, output),
                            ssim_yuv(target, output)});
    }
    r.aggregate();
    return r;
}

std::vector<HsvImage> interpolate_latents(const Cvae& model, const HsvImage& a, const TypeVector& types_a,
                                          const HsvImage& b, const TypeVector& types_b, int steps) {
    if (steps < 2) throw std::invalid_argument("interpolate_latents: steps must be >= 2");
    const auto za = model.encode(a, types_a).mean;
    const auto zb = model.encode(b, types_b).mean;
    std::vector<HsvImage> frames;
    frames.reserve(static_cast<std::size_t>(steps));
    std::vector<double> z(za.size());
    for (int k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) / (steps - 1);
        for (std::size_t d = 0; d < z.size(); ++d) z[d] = (1.0 - t) * za[d] + t * zb[d];
        frames.push_back(model.decode(z).image);
    }
    return frames;
}

RgbImage contact_sheet(const std::vector<std::vector<RgbImage>>& rows, int scale) {
    constexpr int gutter = 2;
    int cell_w = 0, cell_h = 0;
    std::size_t cols = 0;
    for (const auto& row : rows) {
        cols = std::max(cols, row.size());
        for (const auto& img : row) {
            cell_w = std::max(cell_w, img.width() * scale);
            cell_h = std::max(cell_h, img.height() * scale);
        }
    }
    if (cols == 0) throw std::invalid_argument("contact_sheet: no images");
    const int W = static_cast<int>(cols) * (cell_w + gutter) + gutter;
    const int H = static_cast<int>(rows.size()) * (cell_h + gutter) + gutter;
    RgbImage sheet(W, H, 1.0);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            const RgbImage big = upscale_nearest(rows[r][c], scale);
            const int ox = gutter + static_cast<int>(c) * (cell_w + gutter);
            const int oy = gutter + static_cast<int>(r) * (cell_h + gutter);
            for (int y = 0; y < big.height(); ++y)
                for (int x = 0; x < big.width(); ++x)
                    for (int k = 0; k < 3; ++k) sheet.at(ox + x, oy + y, k) = big.at(x, y, k);
        }
    return sheet;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.5f", v);
    return buf;
}

}  // namespace

std::string render_quality_table(const std::vector<EvalReport>& reports, const std::string& metric) {
    if (metric != "mse" && metric != "ssim") throw std::invalid_argument("metric must be mse or ssim");
    std::ostringstream out;
    out << "| Model version | Test | Train | Test and train |\n|---|---|---|---|\n";
    for (const auto& r : reports) {
        out << "| " << r.model_tag;
        for (const char* key : {"test", "train", "test+train"}) {
            auto it = r.aggregates.find(key);
            out << " | "
                << (it == r.aggregates.end() ? std::string("-")
                                             : fmt(metric == "mse" ? it->second.mse : it->second.ssim));
        }
        out << " |\n";
    }
    return out.str();
}

std::string render_regional_table(const std::vector<EvalReport>& reports) {
    std::ostringstream out;
    out << "| Model version | MSE | SSIM |\n|---|---|---|\n";
    for (const auto& r : reports) {
        const auto& a = r.aggregates.at("test+train");
        out << "| " << r.model_tag << " | " << fmt(a.mse) << " | " << fmt(a.ssim) << " |\n";
    }
    return out.str();
}

}  // namespace typeswap
