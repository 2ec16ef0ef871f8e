#include "typeswap/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace typeswap {

namespace {

struct PngImageGuard {
    png_image img;
    PngImageGuard() {
        std::memset(&img, 0, sizeof(img));
        img.version = PNG_IMAGE_VERSION;
    }
    ~PngImageGuard() { png_image_free(&img); }
    PngImageGuard(const PngImageGuard&) = delete;
    PngImageGuard& operator=(const PngImageGuard&) = delete;
};

RgbaImage finish_read(PngImageGuard& g, std::vector<png_byte>& buffer) {
    RgbaImage out(static_cast<int>(g.img.width), static_cast<int>(g.img.height));
    auto px = out.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = buffer[i] / 255.0;
    return out;
}

template <int C, class Tag>
std::vector<png_byte> to_bytes(const Raster<C, Tag>& img) {
    std::vector<png_byte> bytes(img.size());
    auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) bytes[i] = to_byte(px[i]);
    return bytes;
}

template <int C, class Tag>
std::vector<std::uint8_t> encode_any(const Raster<C, Tag>& img, png_uint_32 format) {
    if (img.empty()) throw ImageIoError("cannot encode an empty image");
    PngImageGuard g;
    g.img.width = static_cast<png_uint_32>(img.width());
    g.img.height = static_cast<png_uint_32>(img.height());
    g.img.format = format;
    auto bytes = to_bytes(img);
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&g.img, nullptr, &size, 0, bytes.data(), 0, nullptr))
        throw ImageIoError(std::string("png encode failed: ") + g.img.message);
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&g.img, out.data(), &size, 0, bytes.data(), 0, nullptr))
        throw ImageIoError(std::string("png encode failed: ") + g.img.message);
    out.resize(size);
    return out;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ImageIoError("cannot open for writing: " + path.string());
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw ImageIoError("write failed: " + path.string());
}

}  // namespace

std::uint8_t to_byte(double v) {
    const double c = std::clamp(std::isfinite(v) ? v : 0.0, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

RgbaImage read_png_rgba(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ImageIoError("cannot open image: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    try {
        return decode_png_rgba(bytes);
    } catch (const ImageIoError& e) {
        throw ImageIoError(path.string() + ": " + e.what());
    }
}

RgbaImage decode_png_rgba(std::span<const std::uint8_t> bytes) {
    PngImageGuard g;
    if (!png_image_begin_read_from_memory(&g.img, bytes.data(), bytes.size()))
        throw ImageIoError(std::string("unreadable png: ") + g.img.message);
    g.img.format = PNG_FORMAT_RGBA;
    if (g.img.width == 0 || g.img.height == 0) throw ImageIoError("empty png");
    std::vector<png_byte> buffer(PNG_IMAGE_SIZE(g.img));
    if (!png_image_finish_read(&g.img, nullptr, buffer.data(), 0, nullptr))
        throw ImageIoError(std::string("png decode failed: ") + g.img.message);
    return finish_read(g, buffer);
}

std::vector<std::uint8_t> encode_png(const RgbImage& img) { return encode_any(img, PNG_FORMAT_RGB); }
std::vector<std::uint8_t> encode_png(const RgbaImage& img) { return encode_any(img, PNG_FORMAT_RGBA); }

void write_png(const std::filesystem::path& path, const RgbImage& img) {
    write_file(path, encode_png(img));
}
void write_png(const std::filesystem::path& path, const RgbaImage& img) {
    write_file(path, encode_png(img));
}

}  // namespace typeswap
