#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace typeswap {

inline constexpr int kSpriteSize = 32;

/// Row-major, channel-interleaved raster of doubles. The tag keeps colour
/// spaces apart at compile time (an HSV image cannot be passed where RGB is
/// expected).
template <int Channels, class Tag>
class Raster {
public:
    static constexpr int channels = Channels;

    Raster() = default;
    Raster(int width, int height, double fill = 0.0)
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(width) * height * Channels, fill) {
        if (width < 0 || height < 0) throw std::invalid_argument("negative raster size");
    }
    Raster(int width, int height, std::vector<double> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (data_.size() != static_cast<std::size_t>(width) * height * Channels)
            throw std::invalid_argument("raster data size mismatch");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return data_.empty(); }
    std::size_t size() const { return data_.size(); }

    double& at(int x, int y, int c) {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * Channels + c];
    }
    double at(int x, int y, int c) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * Channels + c];
    }

    std::span<double> pixels() { return data_; }
    std::span<const double> pixels() const { return data_; }

    bool operator==(const Raster&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

struct RgbaTag {};
struct RgbTag {};
struct HsvTag {};

using RgbaImage = Raster<4, RgbaTag>;
using RgbImage = Raster<3, RgbTag>;
/// Hue, Saturation, Value, each in [0,1].
using HsvImage = Raster<3, HsvTag>;

template <int C, class Tag>
Raster<C, Tag> flip_horizontal(const Raster<C, Tag>& src) {
    Raster<C, Tag> out(src.width(), src.height());
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < src.width(); ++x)
            for (int c = 0; c < C; ++c) out.at(src.width() - 1 - x, y, c) = src.at(x, y, c);
    return out;
}

/// Display-only enlargement (e.g. 32 -> 128); never used for metrics.
RgbImage upscale_nearest(const RgbImage& src, int factor);

/// Drops alpha without compositing.
RgbImage rgba_to_rgb(const RgbaImage& src);
/// Adds an opaque alpha channel.
RgbaImage rgb_to_rgba(const RgbImage& src);

/// True when every component is finite and inside [0,1].
template <int C, class Tag>
bool in_unit_range(const Raster<C, Tag>& img) {
    for (double v : img.pixels())
        if (!(v >= 0.0 && v <= 1.0)) return false;
    return true;
}

}  // namespace typeswap
