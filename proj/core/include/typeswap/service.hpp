#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "typeswap/checkpoint.hpp"
#include "typeswap/dataset.hpp"

namespace httplib {
class Server;
}

namespace typeswap {

struct ServiceResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// Request handling for the type-swap HTTP API. Handlers are const and share
/// one immutable model, so they may run concurrently.
///
///   GET  /sprites          catalog, ordered by id
///   GET  /image/{id}       32x32 input PNG
///   POST /swap             {"sprite_id", "types": [..], "magnitude": 20}
///   POST /interpolate      {"sprite_id_a", "sprite_id_b", "steps"}
///   GET  /health           {"model_tag", "checkpoint_hash", "uptime_seconds"}
class SpriteService {
public:
    SpriteService(std::vector<SpriteRecord> catalog, std::optional<Checkpoint> checkpoint,
                  std::string checkpoint_hash = {});

    ServiceResponse list_sprites() const;
    ServiceResponse image(const std::string& id) const;
    ServiceResponse swap(const std::string& request_body) const;
    ServiceResponse interpolate(const std::string& request_body) const;
    ServiceResponse health() const;

    /// Registers every route on `server`.
    void bind(httplib::Server& server) const;

    /// The 32x32 HSV input used for a sprite (black background).
    const HsvImage* input_image(const std::string& id) const;

    static constexpr double kMaxMagnitude = 100.0;
    static constexpr int kMinSteps = 2;
    static constexpr int kMaxSteps = 32;

private:
    struct Entry {
        SpriteRecord record;
        HsvImage input;
    };

    const Entry* find(const std::string& id) const;

    std::map<std::string, Entry> sprites_;
    std::optional<Checkpoint> checkpoint_;
    std::optional<Cvae> model_;
    std::string checkpoint_hash_;
    std::chrono::steady_clock::time_point started_;
};

/// Blocking server loop.
void serve(const SpriteService& service, const std::string& host, int port);

}  // namespace typeswap
