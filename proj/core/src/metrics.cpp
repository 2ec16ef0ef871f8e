#include "typeswap/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace typeswap {

YuvImage rgb_to_yuv(const RgbImage& img) {
    YuvImage out(img.width(), img.height());
    auto s = img.pixels();
    auto d = out.pixels();
    for (std::size_t i = 0; i < s.size(); i += 3) {
        const double r = s[i], g = s[i + 1], b = s[i + 2];
        d[i] = 0.299 * r + 0.587 * g + 0.114 * b;
        d[i + 1] = -0.14714119 * r - 0.28886916 * g + 0.43601035 * b;
        d[i + 2] = 0.61497538 * r - 0.51496512 * g - 0.10001026 * b;
    }
    return out;
}

double mse_rgb(const RgbImage& a, const RgbImage& b) {
    if (a.width() != b.width() || a.height() != b.height())
        throw std::invalid_argument("mse_rgb: shape mismatch");
    if (a.empty()) throw std::invalid_argument("mse_rgb: empty image");
    auto pa = a.pixels(), pb = b.pixels();
    double acc = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        const double d = pa[i] - pb[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pa.size());
}

namespace {

std::vector<double> gaussian_taps(int size, double sigma) {
    std::vector<double> g(static_cast<std::size_t>(size));
    double total = 0.0;
    for (int i = 0; i < size; ++i) {
        const double x = i - (size - 1) / 2.0;
        g[static_cast<std::size_t>(i)] = std::exp(-x * x / (2.0 * sigma * sigma));
        total += g[static_cast<std::size_t>(i)];
    }
    for (double& v : g) v /= total;
    return g;
}

// Separable "valid" Gaussian filtering of one plane.
std::vector<double> filter_valid(const std::vector<double>& plane, int w, int h,
                                 const std::vector<double>& taps) {
    const int k = static_cast<int>(taps.size());
    const int ow = w - k + 1, oh = h - k + 1;
    std::vector<double> rows(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) acc += taps[static_cast<std::size_t>(i)] * plane[static_cast<std::size_t>(y) * w + x + i];
            rows[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) acc += taps[static_cast<std::size_t>(i)] * rows[static_cast<std::size_t>(y + i) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    return out;
}

}  // namespace

template <class Tag>
double ssim_channels(const Raster<3, Tag>& a, const Raster<3, Tag>& b, const SsimParams& p) {
    if (a.width() != b.width() || a.height() != b.height())
        throw std::invalid_argument("ssim: shape mismatch");
    const int w = a.width(), h = a.height();
    if (w < p.filter_size || h < p.filter_size)
        throw std::invalid_argument("ssim: image smaller than the filter window");
    const auto taps = gaussian_taps(p.filter_size, p.filter_sigma);
    const double c1 = (p.k1 * p.max_val) * (p.k1 * p.max_val);
    const double c2 = (p.k2 * p.max_val) * (p.k2 * p.max_val);

    const std::size_t n = static_cast<std::size_t>(w) * h;
    double total = 0.0;
    std::size_t count = 0;
    for (int c = 0; c < 3; ++c) {
        std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = a.pixels()[i * 3 + static_cast<std::size_t>(c)];
            y[i] = b.pixels()[i * 3 + static_cast<std::size_t>(c)];
            xx[i] = x[i] * x[i];
            yy[i] = y[i] * y[i];
            xy[i] = x[i] * y[i];
        }
        const auto mx = filter_valid(x, w, h, taps), my = filter_valid(y, w, h, taps);
        const auto mxx = filter_valid(xx, w, h, taps), myy = filter_valid(yy, w, h, taps);
        const auto mxy = filter_valid(xy, w, h, taps);
        for (std::size_t i = 0; i < mx.size(); ++i) {
            const double num0 = 2.0 * mx[i] * my[i];
            const double den0 = mx[i] * mx[i] + my[i] * my[i];
            const double luminance = (num0 + c1) / (den0 + c1);
            const double cs = (2.0 * mxy[i] - num0 + c2) / (mxx[i] + myy[i] - den0 + c2);
            total += luminance * cs;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

template double ssim_channels(const Raster<3, YuvTag>&, const Raster<3, YuvTag>&, const SsimParams&);
template double ssim_channels(const Raster<3, RgbTag>&, const Raster<3, RgbTag>&, const SsimParams&);

double ssim_yuv(const RgbImage& a, const RgbImage& b, const SsimParams& params) {
    return ssim_channels(rgb_to_yuv(a), rgb_to_yuv(b), params);
}

}  // namespace typeswap
