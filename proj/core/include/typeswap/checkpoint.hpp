#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "typeswap/model.hpp"

namespace typeswap {

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArchitectureMismatch : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    ModelConfig config;
    ParameterSet params;
    /// Training-stage provenance, e.g. "transfer/stage4:pokemon".
    std::string provenance;

    Cvae model() const { return Cvae(config, params); }
};

// Layout: "TSWPCKPT" | u32 version | u64 header length | JSON header |
// raw little-endian float64 parameters | u64 FNV-1a of the parameter bytes.

void save_checkpoint(const std::filesystem::path& path, const Cvae& model,
                     const std::string& provenance);
Checkpoint load_checkpoint(const std::filesystem::path& path);
/// Throws ArchitectureMismatch when the stored architecture differs.
Checkpoint load_checkpoint(const std::filesystem::path& path, const ModelConfig& expected);

/// FNV-1a of the whole file, hex.
std::string checkpoint_hash(const std::filesystem::path& path);

}  // namespace typeswap
