#include "typeswap/typeassign.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "typeswap/resize.hpp"

namespace typeswap {

std::vector<TypeColorProfile> type_mean_hsv(
    std::span<const std::pair<RgbaImage, std::vector<std::size_t>>> sprites) {
    std::array<std::array<double, 3>, kNumTypes> sums{};
    std::array<std::size_t, kNumTypes> pixels{};
    std::array<std::size_t, kNumTypes> members{};
    for (const auto& [img, types] : sprites) {
        std::array<double, 3> s{};
        std::size_t n = 0;
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x) {
                if (!(img.at(x, y, 3) > 0.0)) continue;
                const Hsv h = rgb_to_hsv(Rgb{img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2)});
                for (int c = 0; c < 3; ++c) s[c] += h[c];
                ++n;
            }
        for (auto t : types) {
            for (int c = 0; c < 3; ++c) sums[t][c] += s[c];
            pixels[t] += n;
            ++members[t];
        }
    }
    std::vector<TypeColorProfile> out(kNumTypes);
    for (std::size_t t = 0; t < kNumTypes; ++t) {
        if (members[t] == 0 || pixels[t] == 0)
            throw std::invalid_argument("type without sprites: " + std::string(kTypeNames[t]));
        out[t].type = t;
        out[t].sample_count = pixels[t];
        for (int c = 0; c < 3; ++c) out[t].mean_hsv[c] = sums[t][c] / static_cast<double>(pixels[t]);
    }
    return out;
}

std::vector<TypeColorProfile> type_mean_hsv(const std::vector<SpriteRecord>& records) {
    std::vector<std::pair<RgbaImage, std::vector<std::size_t>>> sprites;
    sprites.reserve(records.size());
    for (const auto& r : records) {
        std::vector<std::size_t> idx;
        for (const auto& t : r.types) idx.push_back(require_type_index(t));
        sprites.emplace_back(resize_bicubic(r.image), std::move(idx));
    }
    return type_mean_hsv(std::span<const std::pair<RgbaImage, std::vector<std::size_t>>>(sprites));
}

Hsv image_mean_hsv(const HsvImage& image) {
    if (image.empty()) throw std::invalid_argument("image_mean_hsv: empty image");
    Hsv s{};
    auto px = image.pixels();
    for (std::size_t i = 0; i < px.size(); i += 3)
        for (std::size_t c = 0; c < 3; ++c) s[c] += px[i + c];
    const double n = static_cast<double>(px.size() / 3);
    for (auto& v : s) v /= n;
    return s;
}

Hsv image_mean_hsv(const RgbaImage& image) {
    Hsv s{};
    std::size_t n = 0;
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x) {
            if (!(image.at(x, y, 3) > 0.0)) continue;
            const Hsv h = rgb_to_hsv(Rgb{image.at(x, y, 0), image.at(x, y, 1), image.at(x, y, 2)});
            for (int c = 0; c < 3; ++c) s[c] += h[c];
            ++n;
        }
    if (n == 0) throw std::invalid_argument("image_mean_hsv: no opaque pixels");
    for (auto& v : s) v /= static_cast<double>(n);
    return s;
}

PreferenceMatrix preference_matrix(std::span<const Hsv> image_means,
                                   std::span<const TypeColorProfile> profiles) {
    if (profiles.size() != kNumTypes) throw std::invalid_argument("need one profile per type");
    PreferenceMatrix m;
    m.rows = image_means.size();
    m.distances.resize(m.rows * kNumTypes);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (const auto& p : profiles) {
            double d = 0.0;
            for (int c = 0; c < 3; ++c) {
                const double diff = image_means[i][c] - p.mean_hsv[c];
                d += diff * diff;
            }
            m(i, p.type) = d / 3.0;
        }
    return m;
}

TypeQuota type_quotas(std::span<const double> weights, std::size_t n_images) {
    if (weights.size() != kNumTypes) throw std::invalid_argument("need 18 type weights");
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw std::invalid_argument("type weights sum to zero");
    TypeQuota q{};
    std::array<double, kNumTypes> remainder{};
    std::size_t assigned = 0;
    for (std::size_t t = 0; t < kNumTypes; ++t) {
        const double exact = weights[t] / total * static_cast<double>(n_images);
        q[t] = static_cast<std::size_t>(std::floor(exact));
        remainder[t] = exact - static_cast<double>(q[t]);
        assigned += q[t];
    }
    std::array<std::size_t, kNumTypes> order{};
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < n_images; ++k, ++assigned) ++q[order[k % kNumTypes]];
    return q;
}

TypeQuota type_quotas(const std::vector<SpriteRecord>& records, std::size_t n_images) {
    std::array<double, kNumTypes> w{};
    for (const auto& r : records) {
        const double share = r.types.size() == 1 ? 1.0 : 0.5;
        for (const auto& t : r.types) w[require_type_index(t)] += share;
    }
    return type_quotas(w, n_images);
}

namespace {

std::vector<std::array<std::size_t, kNumTypes>> image_rankings(const PreferenceMatrix& prefs) {
    std::vector<std::array<std::size_t, kNumTypes>> rank(prefs.rows);
    for (std::size_t i = 0; i < prefs.rows; ++i) {
        auto& r = rank[i];
        std::iota(r.begin(), r.end(), 0);
        std::sort(r.begin(), r.end(), [&](std::size_t a, std::size_t b) {
            const double da = prefs(i, a), db = prefs(i, b);
            return da != db ? da < db : a < b;
        });
    }
    return rank;
}

}  // namespace

std::vector<std::size_t> first_choices(const PreferenceMatrix& prefs) {
    std::vector<std::size_t> out(prefs.rows);
    for (std::size_t i = 0; i < prefs.rows; ++i) {
        std::size_t best = 0;
        for (std::size_t t = 1; t < kNumTypes; ++t)
            if (prefs(i, t) < prefs(i, best)) best = t;
        out[i] = best;
    }
    return out;
}

Assignment gale_shapley_assign(const PreferenceMatrix& prefs, const TypeQuota& quotas) {
    const std::size_t n = prefs.rows;
    if (std::accumulate(quotas.begin(), quotas.end(), std::size_t{0}) != n)
        throw std::invalid_argument("quotas must sum to the number of images");
    for (double d : prefs.distances)
        if (!std::isfinite(d)) throw std::invalid_argument("non-finite preference distance");

    const auto rank = image_rankings(prefs);

    // Worst current occupant on top: larger distance, then larger image index.
    using Entry = std::pair<double, std::size_t>;
    std::array<std::priority_queue<Entry>, kNumTypes> held;

    std::vector<std::size_t> next(n, 0);
    std::deque<std::size_t> free_images(n);
    std::iota(free_images.begin(), free_images.end(), 0);

    while (!free_images.empty()) {
        const std::size_t i = free_images.front();
        free_images.pop_front();
        if (next[i] >= kNumTypes) throw std::logic_error("image exhausted its preference list");
        const std::size_t t = rank[i][next[i]++];
        if (quotas[t] == 0) {
            free_images.push_front(i);
            continue;
        }
        const Entry mine{prefs(i, t), i};
        if (held[t].size() < quotas[t]) {
            held[t].push(mine);
        } else if (mine < held[t].top()) {
            free_images.push_front(held[t].top().second);
            held[t].pop();
            held[t].push(mine);
        } else {
            free_images.push_front(i);
        }
    }

    Assignment out(n);
    for (std::size_t t = 0; t < kNumTypes; ++t)
        while (!held[t].empty()) {
            out[held[t].top().second] = t;
            held[t].pop();
        }
    return out;
}

nlohmann::json AssignmentAudit::to_json() const {
    nlohmann::json types = nlohmann::json::object();
    for (std::size_t t = 0; t < kNumTypes; ++t)
        types[std::string(kTypeNames[t])] = {{"first_choice", first_choice[t]},
                                             {"final", final_counts[t]},
                                             {"quota", quotas[t]}};
    std::size_t total = 0;
    for (auto c : final_counts) total += c;
    return {{"images", total}, {"reassigned_from_first_choice", reassigned}, {"types", types}};
}

AssignmentAudit audit_assignment(const PreferenceMatrix& prefs, const TypeQuota& quotas,
                                 const Assignment& assignment) {
    AssignmentAudit a;
    a.quotas = quotas;
    const auto first = first_choices(prefs);
    if (first.size() != assignment.size()) throw std::invalid_argument("assignment size mismatch");
    for (std::size_t i = 0; i < first.size(); ++i) {
        ++a.first_choice[first[i]];
        ++a.final_counts[assignment[i]];
        a.reassigned += first[i] != assignment[i];
    }
    return a;
}

FaceLabels assign_face_types(const std::vector<SpriteRecord>& catalog,
                             const std::vector<FaceRecord>& faces) {
    FaceLabels out;
    out.profiles = type_mean_hsv(catalog);
    std::vector<Hsv> means;
    means.reserve(faces.size());
    for (const auto& f : faces) {
        out.image_ids.push_back(f.id);
        means.push_back(image_mean_hsv(f.image));
    }
    const auto prefs = preference_matrix(means, out.profiles);
    const auto quotas = type_quotas(catalog, faces.size());
    out.assignment = gale_shapley_assign(prefs, quotas);
    out.audit = audit_assignment(prefs, quotas, out.assignment);
    return out;
}

void write_assignment_csv(const std::filesystem::path& path, const FaceLabels& labels) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "image_id,assigned_type\n";
    for (std::size_t i = 0; i < labels.image_ids.size(); ++i)
        out << labels.image_ids[i] << ',' << kTypeNames[labels.assignment[i]] << '\n';
}

std::vector<std::pair<std::string, std::size_t>> read_assignment_csv(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    std::vector<std::pair<std::string, std::size_t>> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 2) throw std::runtime_error("bad assignment row: " + line);
        out.emplace_back(f[0], require_type_index(f[1]));
    }
    return out;
}

}  // namespace typeswap
