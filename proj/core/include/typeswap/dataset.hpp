#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "typeswap/image.hpp"
#include "typeswap/type_vector.hpp"

namespace typeswap {

enum class Split { train, test };
enum class Background { black, white, noise_a, noise_b };

inline constexpr std::array<Background, 4> kAllBackgrounds = {
    Background::black, Background::white, Background::noise_a, Background::noise_b};

std::string_view to_string(Split s);
std::string_view to_string(Background b);
Split parse_split(std::string_view s);
Background parse_background(std::string_view s);
bool is_noise(Background b);

struct SpriteRecord {
    std::string id;
    std::string name;
    /// Canonical spellings from kTypeNames; one or two, distinct.
    std::vector<std::string> types;
    std::filesystem::path image_path;
    /// Source-resolution RGBA. Empty when the manifest was loaded without images.
    RgbaImage image;
    Split split = Split::train;

    TypeVector type_vector(double magnitude = 1.0) const {
        return encode_type_vector(types, magnitude);
    }
};

/// Raised for manifest problems; `row` is 1-based and counts the header as row 1.
class ManifestError : public std::runtime_error {
public:
    ManifestError(const std::string& what, std::size_t row)
        : std::runtime_error(row ? "manifest row " + std::to_string(row) + ": " + what : what),
          row_(row) {}
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

/// CSV with header `id,name,type1,type2,image_path`. Image paths are
/// resolved relative to the manifest's directory.
std::vector<SpriteRecord> load_manifest(const std::filesystem::path& path, bool load_images = true);
void write_manifest(const std::filesystem::path& path, const std::vector<SpriteRecord>& records);

/// Splits one CSV line; supports double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);

/// out = alpha * fg + (1 - alpha) * bg. Noise backgrounds draw per-pixel
/// uniform RGB from a generator seeded by (seed, source_id, background).
RgbImage composite_background(const RgbaImage& image, Background background, std::uint64_t seed,
                              std::string_view source_id);

struct AugmentedInstance {
    std::string source_id;
    HsvImage image;
    TypeVector type_vector;
    Background background = Background::black;
    bool flipped = false;
    Split split = Split::train;
};

/// Resize to 32x32 (bicubic), composite, optionally flip, convert to HSV.
AugmentedInstance make_instance(const SpriteRecord& record, const RgbaImage& sprite32,
                                Background background, bool flipped, std::uint64_t seed);

/// Train records give 8 instances (4 backgrounds x {plain, flipped});
/// test records give 4 (black/white x {plain, flipped}).
std::vector<AugmentedInstance> build_augmented_set(const std::vector<SpriteRecord>& records,
                                                   std::uint64_t seed);

struct DatasetSplit {
    std::vector<SpriteRecord> train;
    std::vector<SpriteRecord> test;
};

/// Creature-level random split; test size is round(fraction * n). Both sides
/// keep manifest order. Throws std::invalid_argument when either side would be empty.
DatasetSplit split_dataset(const std::vector<SpriteRecord>& records, double test_fraction,
                           std::uint64_t seed);

/// Directory of 32x32 RGB PNGs plus index.json.
void write_augmented_cache(const std::filesystem::path& dir,
                           const std::vector<AugmentedInstance>& instances);
std::vector<AugmentedInstance> read_augmented_cache(const std::filesystem::path& dir);

/// Face (source-domain) images: RGB, no alpha. Index is a JSON array of
/// {"id": ..., "path": ...} with paths relative to the index file.
struct FaceRecord {
    std::string id;
    std::filesystem::path image_path;
    HsvImage image;  // 32x32 after resize
};

std::vector<FaceRecord> load_face_index(const std::filesystem::path& index_path);
void write_face_index(const std::filesystem::path& index_path, const std::vector<FaceRecord>& faces);

}  // namespace typeswap
