#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "typeswap/color.hpp"
#include "typeswap/dataset.hpp"
#include "typeswap/type_vector.hpp"

namespace typeswap {

struct TypeColorProfile {
    std::size_t type = 0;
    Hsv mean_hsv{};
    /// Number of masked pixels that contributed.
    std::size_t sample_count = 0;
};

/// Per-type mean HSV over the opaque (alpha > 0) pixels of every sprite of
/// that type; a dual-type sprite contributes to both. Sprites are resized to
/// 32x32 first. Throws std::invalid_argument if any type has no sprites.
std::vector<TypeColorProfile> type_mean_hsv(const std::vector<SpriteRecord>& records);

/// Same, but for already-prepared 32x32 RGBA sprites paired with their types.
std::vector<TypeColorProfile> type_mean_hsv(
    std::span<const std::pair<RgbaImage, std::vector<std::size_t>>> sprites);

/// Mean of every pixel (no mask).
Hsv image_mean_hsv(const HsvImage& image);
/// Mean of pixels with alpha > 0, converted to HSV per pixel first.
Hsv image_mean_hsv(const RgbaImage& image);

/// Row-major |images| x 18 matrix of mean squared channel distances.
struct PreferenceMatrix {
    std::size_t rows = 0;
    std::vector<double> distances;

    double operator()(std::size_t image, std::size_t type) const {
        return distances[image * kNumTypes + type];
    }
    double& operator()(std::size_t image, std::size_t type) {
        return distances[image * kNumTypes + type];
    }
};

/// entry(i,t) = (1/3) * sum_c (image_mean_i[c] - profile_t[c])^2.
PreferenceMatrix preference_matrix(std::span<const Hsv> image_means,
                                   std::span<const TypeColorProfile> profiles);

using TypeQuota = std::array<std::size_t, kNumTypes>;

/// Type weight is 1 per mono-type creature and 0.5 per dual-type creature;
/// capacities are the largest-remainder rounding of weight share * n_images
/// (remainder ties go to the lower type index).
TypeQuota type_quotas(const std::vector<SpriteRecord>& records, std::size_t n_images);
TypeQuota type_quotas(std::span<const double> weights, std::size_t n_images);

/// Per-image type index.
using Assignment = std::vector<std::size_t>;

/// Capacity-constrained deferred acceptance with images proposing. Both
/// sides rank by ascending distance; image-side ties go to the lower type
/// index and type-side ties to the lower image index. Throws
/// std::invalid_argument if quotas do not sum to the image count.
Assignment gale_shapley_assign(const PreferenceMatrix& prefs, const TypeQuota& quotas);

/// Each image's most preferred type (same tie-break as the matcher).
std::vector<std::size_t> first_choices(const PreferenceMatrix& prefs);

struct AssignmentAudit {
    std::array<std::size_t, kNumTypes> first_choice{};
    std::array<std::size_t, kNumTypes> final_counts{};
    TypeQuota quotas{};
    /// Images whose final type is not their first choice.
    std::size_t reassigned = 0;

    nlohmann::json to_json() const;
};

AssignmentAudit audit_assignment(const PreferenceMatrix& prefs, const TypeQuota& quotas,
                                 const Assignment& assignment);

/// Full labelling pipeline for a face corpus.
struct FaceLabels {
    std::vector<std::string> image_ids;
    Assignment assignment;
    AssignmentAudit audit;
    std::vector<TypeColorProfile> profiles;
};

FaceLabels assign_face_types(const std::vector<SpriteRecord>& catalog,
                             const std::vector<FaceRecord>& faces);

/// `image_id,assigned_type` CSV.
void write_assignment_csv(const std::filesystem::path& path, const FaceLabels& labels);
/// image id -> type index.
std::vector<std::pair<std::string, std::size_t>> read_assignment_csv(
    const std::filesystem::path& path);

}  // namespace typeswap
