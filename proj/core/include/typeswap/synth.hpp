#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "typeswap/dataset.hpp"
#include "typeswap/image.hpp"

namespace typeswap::synth {

// Procedural stand-ins for the creature catalog and the face corpus. Colours
// follow a per-type palette so type-conditioned behaviour is observable
// without the original artwork.

/// Creature-weighted type frequencies used to draw catalog types.
const std::array<double, kNumTypes>& catalog_type_weights();

/// 96x96 RGBA creature: transparent background, body/head/eyes, primary type
/// colours the body, secondary type colours markings. `shape_seed` fixes
/// geometry independent of colour.
RgbaImage creature_sprite(const std::vector<std::string>& types, std::uint64_t shape_seed,
                          int size = 96);

/// 64x64 RGB face illustration; some have white backgrounds.
RgbImage face_image(std::uint64_t seed, int size = 64);

/// In-memory catalog with images attached.
std::vector<SpriteRecord> make_catalog(std::size_t count, std::uint64_t seed);

struct RegionalEntry {
    std::string variant_id;
    std::string original_id;
    std::vector<std::string> types;
    std::filesystem::path image_path;
    RgbaImage image;
};

/// Variants share the original's geometry (slightly shifted) but carry
/// different types. `seed` must be the seed the catalog was made with.
std::vector<RegionalEntry> make_regional(const std::vector<SpriteRecord>& catalog,
                                         std::size_t count, std::uint64_t seed);

/// Writes `dir/manifest.csv` and `dir/img/*.png`; returns the records.
std::vector<SpriteRecord> write_catalog(const std::filesystem::path& dir, std::size_t count,
                                        std::uint64_t seed);
/// Writes `dir/index.json` and `dir/img/*.png`.
void write_faces(const std::filesystem::path& dir, std::size_t count, std::uint64_t seed);
/// Writes `dir/regional.csv` (variant_id,original_id,type1,type2,image_path).
void write_regional(const std::filesystem::path& dir, const std::vector<SpriteRecord>& catalog,
                    std::size_t count, std::uint64_t seed);

}  // namespace typeswap::synth
