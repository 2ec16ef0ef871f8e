#pragma once

#include "typeswap/image.hpp"

namespace typeswap {

struct YuvTag {};
using YuvImage = Raster<3, YuvTag>;

/// BT.601 analogue YUV (Y = 0.299 R + 0.587 G + 0.114 B; U, V signed).
YuvImage rgb_to_yuv(const RgbImage& img);

/// Mean squared error over every RGB component. Throws on shape mismatch.
double mse_rgb(const RgbImage& a, const RgbImage& b);

struct SsimParams {
    int filter_size = 11;
    double filter_sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double max_val = 1.0;
};

/// SSIM per YUV channel with a Gaussian window over valid positions only,
/// averaged over channels and positions. Throws std::invalid_argument when
/// the images are smaller than the window.
double ssim_yuv(const RgbImage& a, const RgbImage& b, const SsimParams& params = {});

/// Same computation on any 3-channel raster without colour conversion.
template <class Tag>
double ssim_channels(const Raster<3, Tag>& a, const Raster<3, Tag>& b, const SsimParams& params = {});

}  // namespace typeswap
