#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "typeswap/dataset.hpp"
#include "typeswap/metrics.hpp"
#include "typeswap/model.hpp"

namespace typeswap {

struct ImageScore {
    std::string id;
    Split split = Split::train;
    std::string background;
    bool flipped = false;
    double mse = 0.0;
    double ssim = 0.0;
};

struct Aggregate {
    std::size_t count = 0;
    double mse = 0.0;
    double ssim = 0.0;
};

struct EvalReport {
    std::string set_name;
    std::string model_tag;
    std::vector<ImageScore> images;
    /// Keys "test", "train", "test+train"; arithmetic means of per-image scores.
    std::map<std::string, Aggregate> aggregates;

    void aggregate();
    nlohmann::json to_json() const;
};

/// Decodes the noise-free latent mean of (image, types).
HsvImage reconstruct(const Cvae& model, const HsvImage& image, const TypeVector& types);

/// Reconstructs each instance with its own unit-magnitude type vector and
/// scores against the input in RGB. By default only black-background
/// instances are scored.
EvalReport reconstruction_report(const Cvae& model, const std::vector<AugmentedInstance>& instances,
                                 const std::string& tag, bool all_backgrounds = false);

/// Encodes with the target types at `magnitude` and decodes the latent mean.
HsvImage type_swap(const Cvae& model, const HsvImage& image, const std::vector<std::string>& target_types,
                   double magnitude = 20.0);

struct RegionalPair {
    SpriteRecord original;
    std::string variant_id;
    RgbaImage variant_image;
    std::vector<std::string> variant_types;
};

/// `variant_id,original_id,type1,type2,image_path` joined against the catalog.
std::vector<RegionalPair> load_regional_pairs(const std::filesystem::path& csv,
                                              const std::vector<SpriteRecord>& catalog);

/// 32x32 sprite on black, HSV: the evaluation-time preprocessing.
HsvImage prepare_for_eval(const RgbaImage& source, std::uint64_t seed, std::string_view id);

/// Swaps each original to the variant's types and scores against the variant.
/// With `to_original_types` the original's own types are used instead (a
/// sanity reference).
EvalReport original_to_regional_report(const Cvae& model, const std::vector<RegionalPair>& pairs,
                                       const std::string& tag, double magnitude = 20.0,
                                       bool to_original_types = false);

/// Decodes `steps` evenly spaced points on the segment between the two
/// latent means; the ends are the plain reconstructions.
std::vector<HsvImage> interpolate_latents(const Cvae& model, const HsvImage& a, const TypeVector& types_a,
                                          const HsvImage& b, const TypeVector& types_b, int steps);

/// Grid of images, each enlarged by nearest-neighbour `scale`, separated by
/// a 2-pixel gutter. Rows may differ in length.
RgbImage contact_sheet(const std::vector<std::vector<RgbImage>>& rows, int scale = 4);

/// Plain-text table in the layout "Model | Test | Train | Test and train".
std::string render_quality_table(const std::vector<EvalReport>& reports, const std::string& metric);
/// "Model | MSE | SSIM" for regional reports (uses the test+train aggregate).
std::string render_regional_table(const std::vector<EvalReport>& reports);

}  // namespace typeswap
