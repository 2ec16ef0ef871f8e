#include "typeswap/color.hpp"

#include <algorithm>
#include <cmath>

namespace typeswap {

Hsv rgb_to_hsv(const Rgb& rgb) {
    const auto [r, g, b] = rgb;
    const double maxc = std::max({r, g, b});
    const double minc = std::min({r, g, b});
    const double v = maxc;
    if (maxc == minc) return {0.0, 0.0, v};
    const double delta = maxc - minc;
    const double s = delta / maxc;
    double h;
    if (r == maxc)
        h = (g - b) / delta;
    else if (g == maxc)
        h = 2.0 + (b - r) / delta;
    else
        h = 4.0 + (r - g) / delta;
    h /= 6.0;
    if (h < 0.0) h += 1.0;
    if (h >= 1.0) h -= 1.0;
    return {h, s, v};
}

Rgb hsv_to_rgb(const Hsv& hsv) {
    const auto [h, s, v] = hsv;
    if (s == 0.0) return {v, v, v};
    const double h6 = h * 6.0;
    double sector = std::floor(h6);
    const double f = h6 - sector;
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    switch (static_cast<int>(sector) % 6) {
        case 0: return {v, t, p};
        case 1: return {q, v, p};
        case 2: return {p, v, t};
        case 3: return {p, q, v};
        case 4: return {t, p, v};
        default: return {v, p, q};
    }
}

HsvImage rgb_to_hsv(const RgbImage& img) {
    HsvImage out(img.width(), img.height());
    auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); i += 3) {
        auto hsv = rgb_to_hsv(Rgb{src[i], src[i + 1], src[i + 2]});
        std::copy(hsv.begin(), hsv.end(), dst.begin() + static_cast<std::ptrdiff_t>(i));
    }
    return out;
}

RgbImage hsv_to_rgb(const HsvImage& img) {
    RgbImage out(img.width(), img.height());
    auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); i += 3) {
        auto rgb = hsv_to_rgb(Hsv{src[i], src[i + 1], src[i + 2]});
        std::copy(rgb.begin(), rgb.end(), dst.begin() + static_cast<std::ptrdiff_t>(i));
    }
    return out;
}

}  // namespace typeswap
