#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "typeswap/color.hpp"
#include "typeswap/eval.hpp"
#include "typeswap/image.hpp"
#include "typeswap/resize.hpp"
#include "typeswap/synth.hpp"
#include "typeswap/training.hpp"

namespace typeswap::testing {

template <class Img>
Img random_image(int w, int h, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Img img(w, h);
    for (double& v : img.pixels()) v = u(rng);
    return img;
}

inline RgbaImage opaque(const RgbImage& img) { return rgb_to_rgba(img); }

class TempDir {
public:
    explicit TempDir(const std::string& stem = "typeswap-test") {
        static std::atomic<int> counter{0};
        const auto tick = std::chrono::steady_clock::now().time_since_epoch().count();
        path_ = std::filesystem::temp_directory_path() /
                (stem + "-" + std::to_string(tick) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

private:
    std::filesystem::path path_;
};

/// Synthetic sprites on black, 32x32 HSV, each with its own type vector.
inline std::vector<TrainingSample> sprite_samples(std::size_t n, std::uint64_t seed) {
    std::vector<TrainingSample> out;
    for (const auto& r : synth::make_catalog(n, seed))
        out.push_back({prepare_for_eval(r.image, 0, r.id), r.type_vector()});
    return out;
}

inline Batch batch_of(std::span<const TrainingSample> samples) {
    std::vector<HsvImage> imgs;
    std::vector<TypeVector> tvs;
    for (const auto& s : samples) {
        imgs.push_back(s.image);
        tvs.push_back(s.types);
    }
    return make_batch(imgs, tvs);
}

inline Matrix gaussian_matrix(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
    return m;
}

}  // namespace typeswap::testing
