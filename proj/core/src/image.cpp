#include "typeswap/image.hpp"

namespace typeswap {

RgbImage upscale_nearest(const RgbImage& src, int factor) {
    if (factor < 1) throw std::invalid_argument("upscale factor must be >= 1");
    RgbImage out(src.width() * factor, src.height() * factor);
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x)
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = src.at(x / factor, y / factor, c);
    return out;
}

RgbImage rgba_to_rgb(const RgbaImage& src) {
    RgbImage out(src.width(), src.height());
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < src.width(); ++x)
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = src.at(x, y, c);
    return out;
}

RgbaImage rgb_to_rgba(const RgbImage& src) {
    RgbaImage out(src.width(), src.height());
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < src.width(); ++x) {
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = src.at(x, y, c);
            out.at(x, y, 3) = 1.0;
        }
    return out;
}

}  // namespace typeswap
