#include "typeswap/service.hpp"

#include <httplib.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "typeswap/base64.hpp"
#include "typeswap/color.hpp"
#include "typeswap/eval.hpp"
#include "typeswap/png_io.hpp"

namespace typeswap {

using nlohmann::json;

namespace {

ServiceResponse error(int status, const std::string& message) {
    return {status, json{{"error", message}}.dump()};
}

ServiceResponse ok(const json& body) { return {200, body.dump()}; }

std::string png_b64(const RgbImage& img) { return base64_encode(encode_png(img)); }

// Parses and validates 1-2 distinct type names; returns an error message on failure.
std::optional<std::string> parse_types(const json& j, std::vector<std::string>& out) {
    if (!j.is_array()) return "types must be an array of type names";
    if (j.empty() || j.size() > 2) return "types must contain one or two names";
    for (const auto& t : j) {
        if (!t.is_string()) return "type names must be strings";
        auto idx = type_index(t.get<std::string>());
        if (!idx) return "unknown type: " + t.get<std::string>();
        out.emplace_back(kTypeNames[*idx]);
    }
    if (out.size() == 2 && out[0] == out[1]) return "duplicate type";
    return std::nullopt;
}

std::string model_tag_of(const std::string& provenance) {
    const auto slash = provenance.find('/');
    return slash == std::string::npos ? provenance : provenance.substr(0, slash);
}

}  // namespace

SpriteService::SpriteService(std::vector<SpriteRecord> catalog, std::optional<Checkpoint> checkpoint,
                             std::string checkpoint_hash)
    : checkpoint_(std::move(checkpoint)),
      checkpoint_hash_(std::move(checkpoint_hash)),
      started_(std::chrono::steady_clock::now()) {
    if (checkpoint_) {
        if (checkpoint_->config.image_size != kSpriteSize)
            throw std::invalid_argument("service models must use 32x32 images");
        model_.emplace(checkpoint_->model());
    }
    for (auto& r : catalog) {
        if (r.image.empty()) throw std::invalid_argument("catalog sprite without image: " + r.id);
        HsvImage input = prepare_for_eval(r.image, 0, r.id);
        const std::string id = r.id;
        sprites_.emplace(id, Entry{std::move(r), std::move(input)});
    }
}

const SpriteService::Entry* SpriteService::find(const std::string& id) const {
    auto it = sprites_.find(id);
    return it == sprites_.end() ? nullptr : &it->second;
}

const HsvImage* SpriteService::input_image(const std::string& id) const {
    const Entry* e = find(id);
    return e ? &e->input : nullptr;
}

ServiceResponse SpriteService::list_sprites() const {
    json list = json::array();
    for (const auto& [id, e] : sprites_)
        list.push_back({{"id", id}, {"name", e.record.name}, {"types", e.record.types}, {"thumbnail", "/image/" + id}});
    return ok(list);
}

ServiceResponse SpriteService::image(const std::string& id) const {
    const Entry* e = find(id);
    if (!e) return error(404, "unknown sprite: " + id);
    const auto bytes = encode_png(hsv_to_rgb(e->input));
    return {200, std::string(bytes.begin(), bytes.end()), "image/png"};
}

ServiceResponse SpriteService::swap(const std::string& body) const {
    json req;
    try {
        req = json::parse(body);
    } catch (const json::exception&) {
        return error(400, "malformed JSON");
    }
    if (!req.is_object() || !req.contains("sprite_id") || !req["sprite_id"].is_string())
        return error(422, "sprite_id is required");
    const Entry* e = find(req["sprite_id"].get<std::string>());
    if (!e) return error(404, "unknown sprite: " + req["sprite_id"].get<std::string>());

    std::vector<std::string> types;
    if (auto err = parse_types(req.value("types", json()), types)) return error(422, *err);
    const json mag = req.value("magnitude", json(20.0));
    if (!mag.is_number()) return error(422, "magnitude must be a number");
    const double magnitude = mag.get<double>();
    if (!(magnitude > 0.0 && magnitude <= kMaxMagnitude))
        return error(422, "magnitude must lie in (0, 100]");
    if (!model_) return error(503, "no model loaded");

    const TypeVector tv = encode_type_vector(types, magnitude);
    const LatentCode code = model_->encode(e->input, tv);
    const RgbImage output = hsv_to_rgb(model_->decode(code.mean).image);
    double norm = 0.0;
    for (double v : code.mean) norm += v * v;

    return ok({{"sprite_id", e->record.id},
               {"types", types},
               {"magnitude", magnitude},
               {"input_png", png_b64(hsv_to_rgb(e->input))},
               {"output_png", png_b64(output)},
               {"preview_png", png_b64(upscale_nearest(output, 4))},
               {"latent_norm", std::sqrt(norm)}});
}

ServiceResponse SpriteService::interpolate(const std::string& body) const {
    json req;
    try {
        req = json::parse(body);
    } catch (const json::exception&) {
        return error(400, "malformed JSON");
    }
    if (!req.is_object() || !req.value("sprite_id_a", json()).is_string() ||
        !req.value("sprite_id_b", json()).is_string())
        return error(422, "sprite_id_a and sprite_id_b are required");
    const auto ida = req["sprite_id_a"].get<std::string>();
    const auto idb = req["sprite_id_b"].get<std::string>();
    const Entry* a = find(ida);
    const Entry* b = find(idb);
    if (!a) return error(404, "unknown sprite: " + ida);
    if (!b) return error(404, "unknown sprite: " + idb);
    if (ida == idb) return error(422, "sprite ids must differ");
    const json steps_j = req.value("steps", json(8));
    if (!steps_j.is_number_integer()) return error(422, "steps must be an integer");
    const int steps = steps_j.get<int>();
    if (steps < kMinSteps || steps > kMaxSteps) return error(422, "steps must lie in [2, 32]");
    if (!model_) return error(503, "no model loaded");

    const auto frames = interpolate_latents(*model_, a->input, a->record.type_vector(), b->input,
                                            b->record.type_vector(), steps);
    json out = json::array();
    for (const auto& f : frames) out.push_back(png_b64(hsv_to_rgb(f)));
    return ok({{"sprite_id_a", ida}, {"sprite_id_b", idb}, {"steps", steps}, {"frames", out}});
}

ServiceResponse SpriteService::health() const {
    const double uptime = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    return ok({{"model_tag", checkpoint_ ? model_tag_of(checkpoint_->provenance) : std::string()},
               {"checkpoint_hash", checkpoint_hash_},
               {"model_loaded", model_.has_value()},
               {"uptime_seconds", uptime}});
}

void SpriteService::bind(httplib::Server& server) const {
    auto reply = [](httplib::Response& res, const ServiceResponse& r) {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    server.Get("/sprites", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, list_sprites());
    });
    server.Get(R"(/image/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, image(req.matches[1]));
    });
    server.Post("/swap", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, swap(req.body));
    });
    server.Post("/interpolate", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, interpolate(req.body));
    });
    server.Get("/health", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, health());
    });
}

void serve(const SpriteService& service, const std::string& host, int port) {
    httplib::Server server;
    service.bind(server);
    if (!server.listen(host, port)) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace typeswap
