#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "typeswap/image.hpp"

namespace typeswap {

class ImageIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Decodes any PNG libpng understands into 8-bit RGBA scaled to [0,1].
RgbaImage read_png_rgba(const std::filesystem::path& path);
RgbaImage decode_png_rgba(std::span<const std::uint8_t> bytes);

/// Values are clamped to [0,1] and rounded to 8 bits.
void write_png(const std::filesystem::path& path, const RgbImage& img);
void write_png(const std::filesystem::path& path, const RgbaImage& img);
std::vector<std::uint8_t> encode_png(const RgbImage& img);
std::vector<std::uint8_t> encode_png(const RgbaImage& img);

std::uint8_t to_byte(double v);

}  // namespace typeswap
