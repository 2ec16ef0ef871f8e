#pragma once

#include <array>

#include "typeswap/image.hpp"

namespace typeswap {

using Rgb = std::array<double, 3>;
using Hsv = std::array<double, 3>;

/// Hexcone HSV with hue scaled to [0,1). Grey pixels get hue 0.
Hsv rgb_to_hsv(const Rgb& rgb);
Rgb hsv_to_rgb(const Hsv& hsv);

HsvImage rgb_to_hsv(const RgbImage& img);
RgbImage hsv_to_rgb(const HsvImage& img);

}  // namespace typeswap
