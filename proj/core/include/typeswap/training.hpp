#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "typeswap/adam.hpp"
#include "typeswap/dataset.hpp"
#include "typeswap/model.hpp"

namespace typeswap {

enum class StageDataset { faces, pokemon };
enum class Initialization { fresh, from_checkpoint };

struct StageConfig {
    StageDataset dataset = StageDataset::pokemon;
    int epochs = 1;
    double learning_rate = 1e-4;
    int batch_size = 128;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-7;
    std::uint64_t seed = 0;

    AdamConfig adam() const { return {learning_rate, beta1, beta2, epsilon}; }
    void validate() const;
    bool operator==(const StageConfig&) const = default;
};

struct TrainingPlan {
    std::string name;
    Initialization initialization = Initialization::fresh;
    std::vector<StageConfig> stages;

    /// Epochs become ceil(epochs * factor), at least 1.
    TrainingPlan scaled(double factor) const;
    /// Every faces stage must precede every pokemon stage.
    void validate() const;
    int total_epochs() const;
    bool operator==(const TrainingPlan&) const = default;
};

void to_json(nlohmann::json& j, const StageConfig& s);
void from_json(const nlohmann::json& j, StageConfig& s);
void to_json(nlohmann::json& j, const TrainingPlan& p);
void from_json(const nlohmann::json& j, TrainingPlan& p);

/// faces 10 ep @1e-4 b128; faces 50 @1e-5 b128; pokemon 100 each @5e-5, 2e-5, 1e-5, b256.
TrainingPlan transfer_plan(std::uint64_t seed = 0);
/// pokemon 50 @1e-4 b128, then 10 rounds of 50 @1e-5 b256.
TrainingPlan baseline_plan(std::uint64_t seed = 0);

TrainingPlan load_plan(const std::filesystem::path& path);
void save_plan(const std::filesystem::path& path, const TrainingPlan& plan);

struct TrainingSample {
    HsvImage image;
    TypeVector types;
};

std::vector<TrainingSample> samples_from(const std::vector<AugmentedInstance>& instances);

struct EpochRecord {
    int stage = 0;
    int epoch = 0;
    long steps = 0;
    double mean_loss = 0.0;
    double image_bce = 0.0;
    double type_bce = 0.0;
    double kl = 0.0;
};

struct StageSummary {
    int stage = 0;
    std::string dataset;
    double wall_seconds = 0.0;
    std::string checkpoint;
};

struct TrainingLog {
    std::vector<EpochRecord> epochs;
    std::vector<StageSummary> stages;
    std::uint64_t seed = 0;

    /// One JSON object per line: epochs, then stage summaries.
    std::string to_jsonl() const;
};

nlohmann::json to_json(const EpochRecord& e);

class TrainingDiverged : public std::runtime_error {
public:
    TrainingDiverged(const std::string& what, std::string last_good_checkpoint = {})
        : std::runtime_error(what), last_good_(std::move(last_good_checkpoint)) {}
    const std::string& last_good_checkpoint() const { return last_good_; }

private:
    std::string last_good_;
};

struct TrainOptions {
    /// Largest batch evaluated at once; bigger batches accumulate gradients
    /// over micro-batches (same result up to floating-point summation order).
    int micro_batch = 32;
    /// Stop after this many optimiser steps (0 = run every epoch).
    long max_steps = 0;
    std::function<void(const EpochRecord&)> on_epoch;
};

/// Runs epochs * ceil(N / batch) Adam steps over per-epoch seeded shuffles.
/// Mutates `model`; throws TrainingDiverged on a non-finite loss.
std::vector<EpochRecord> train_stage(Cvae& model, std::span<const TrainingSample> data,
                                     const StageConfig& config, int stage_index = 0,
                                     const TrainOptions& options = {});

struct PlanData {
    std::span<const TrainingSample> faces;
    std::span<const TrainingSample> pokemon;
};

/// Runs every stage in order, writing `out_dir/stage<k>.ckpt`,
/// `out_dir/final.ckpt` and `out_dir/log.jsonl`.
TrainingLog run_plan(Cvae& model, const TrainingPlan& plan, const PlanData& data,
                     const std::filesystem::path& out_dir, const TrainOptions& options = {});

}  // namespace typeswap
