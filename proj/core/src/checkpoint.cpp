#include "typeswap/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "typeswap/hash.hpp"

namespace typeswap {

namespace {

constexpr char kMagic[8] = {'T', 'S', 'W', 'P', 'C', 'K', 'P', 'T'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::filesystem::path& path) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
        throw CheckpointError("truncated checkpoint: " + path.string());
    return v;
}

std::uint64_t payload_hash(std::span<const double> values) {
    return fnv1a(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(values.data()),
                                               values.size_bytes()));
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Cvae& model,
                     const std::string& provenance) {
    nlohmann::json header;
    header["config"] = model.config();
    header["provenance"] = provenance;
    header["parameter_count"] = model.params().size();
    nlohmann::json tensors = nlohmann::json::array();
    for (const auto& t : model.params().tensors())
        tensors.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}});
    header["tensors"] = tensors;
    const std::string text = header.dump();

    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("cannot write checkpoint: " + path.string());
    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kCheckpointVersion);
    put<std::uint64_t>(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    const auto values = model.params().values();
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
    put<std::uint64_t>(out, payload_hash(values));
    if (!out) throw CheckpointError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint: " + path.string());
    char magic[8];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw CheckpointError("not a checkpoint file: " + path.string());
    const auto version = get<std::uint32_t>(in, path);
    if (version != kCheckpointVersion)
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    const auto header_len = get<std::uint64_t>(in, path);
    if (header_len > (1u << 24)) throw CheckpointError("corrupt checkpoint header length");
    std::string text(header_len, '\0');
    if (!in.read(text.data(), static_cast<std::streamsize>(header_len)))
        throw CheckpointError("truncated checkpoint header");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
    }

    Checkpoint ck;
    try {
        ck.config = header.at("config").get<ModelConfig>();
        ck.provenance = header.at("provenance").get<std::string>();
        ck.params = ParameterSet(ck.config);
        const auto& tensors = header.at("tensors");
        if (tensors.size() != ck.params.tensors().size())
            throw CheckpointError("tensor list does not match the stored configuration");
        for (std::size_t i = 0; i < tensors.size(); ++i) {
            const auto& t = ck.params.tensors()[i];
            if (tensors[i].at("name") != t.name || tensors[i].at("rows") != t.rows ||
                tensors[i].at("cols") != t.cols)
                throw CheckpointError("tensor " + t.name + " does not match the stored configuration");
        }
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
    }

    auto values = ck.params.values();
    if (!in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size_bytes())))
        throw CheckpointError("truncated checkpoint payload: " + path.string());
    const auto stored = get<std::uint64_t>(in, path);
    if (stored != payload_hash(values)) throw CheckpointError("checkpoint checksum mismatch: " + path.string());
    return ck;
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const ModelConfig& expected) {
    Checkpoint ck = load_checkpoint(path);
    if (!ck.config.same_architecture(expected)) {
        const nlohmann::json got = ck.config, want = expected;
        throw ArchitectureMismatch("checkpoint architecture " + got.dump() + " does not match expected " +
                                   want.dump());
    }
    return ck;
}

std::string checkpoint_hash(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return to_hex(fnv1a(bytes));
}

}  // namespace typeswap
