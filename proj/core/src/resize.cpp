#include "typeswap/resize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace typeswap {

double cubic_kernel(double x, double a) {
    x = std::abs(x);
    if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return (((x - 5.0) * x + 8.0) * x - 4.0) * a;
    return 0.0;
}

namespace {

struct Tap {
    int first = 0;
    std::vector<double> weights;
};

std::vector<Tap> compute_taps(int in_size, int out_size) {
    const double scale = static_cast<double>(in_size) / out_size;
    const double filter_scale = std::max(scale, 1.0);
    const double support = 2.0 * filter_scale;
    std::vector<Tap> taps(static_cast<std::size_t>(out_size));
    for (int i = 0; i < out_size; ++i) {
        const double center = (i + 0.5) * scale;
        const int lo = std::max(0, static_cast<int>(std::floor(center - support)));
        const int hi = std::min(in_size, static_cast<int>(std::ceil(center + support)));
        Tap& t = taps[static_cast<std::size_t>(i)];
        t.first = lo;
        double total = 0.0;
        for (int j = lo; j < hi; ++j) {
            const double w = cubic_kernel((j + 0.5 - center) / filter_scale);
            t.weights.push_back(w);
            total += w;
        }
        if (total != 0.0)
            for (double& w : t.weights) w /= total;
    }
    return taps;
}

template <int C, class Tag>
Raster<C, Tag> resize_impl(const Raster<C, Tag>& src, int out_w, int out_h) {
    if (src.empty() || src.width() < 1 || src.height() < 1)
        throw std::invalid_argument("resize_bicubic: empty image");
    if (out_w < 1 || out_h < 1) throw std::invalid_argument("resize_bicubic: bad output size");

    const auto xtaps = compute_taps(src.width(), out_w);
    const auto ytaps = compute_taps(src.height(), out_h);

    Raster<C, Tag> horiz(out_w, src.height());
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < out_w; ++x) {
            const Tap& t = xtaps[static_cast<std::size_t>(x)];
            for (int c = 0; c < C; ++c) {
                double acc = 0.0;
                for (std::size_t k = 0; k < t.weights.size(); ++k)
                    acc += t.weights[k] * src.at(t.first + static_cast<int>(k), y, c);
                horiz.at(x, y, c) = acc;
            }
        }

    Raster<C, Tag> out(out_w, out_h);
    for (int y = 0; y < out_h; ++y) {
        const Tap& t = ytaps[static_cast<std::size_t>(y)];
        for (int x = 0; x < out_w; ++x)
            for (int c = 0; c < C; ++c) {
                double acc = 0.0;
                for (std::size_t k = 0; k < t.weights.size(); ++k)
                    acc += t.weights[k] * horiz.at(x, t.first + static_cast<int>(k), c);
                out.at(x, y, c) = std::clamp(acc, 0.0, 1.0);
            }
    }
    return out;
}

}  // namespace

RgbaImage resize_bicubic(const RgbaImage& src, int out_width, int out_height) {
    return resize_impl(src, out_width, out_height);
}

RgbImage resize_bicubic(const RgbImage& src, int out_width, int out_height) {
    return resize_impl(src, out_width, out_height);
}

}  // namespace typeswap
