#pragma once

#include "typeswap/image.hpp"

namespace typeswap {

/// Catmull-Rom cubic (a = -0.5).
double cubic_kernel(double x, double a = -0.5);

/// Separable bicubic resampling. When shrinking, the kernel is stretched by
/// the scale factor so every source pixel contributes (area-aware, as in
/// common imaging libraries). Edge windows are clipped and renormalised.
/// Output is clamped to [0,1]. Throws std::invalid_argument on empty input.
RgbaImage resize_bicubic(const RgbaImage& src, int out_width = kSpriteSize,
                         int out_height = kSpriteSize);
RgbImage resize_bicubic(const RgbImage& src, int out_width = kSpriteSize,
                        int out_height = kSpriteSize);

}  // namespace typeswap
