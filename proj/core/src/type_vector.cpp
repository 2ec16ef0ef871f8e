#include "typeswap/type_vector.hpp"

#include <algorithm>
#include <cctype>

namespace typeswap {

namespace {

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

TypeVector encode_indices(std::vector<std::size_t> idx, double magnitude) {
    if (idx.empty() || idx.size() > 2)
        throw TypeError("a type vector needs one or two types, got " +
                        std::to_string(idx.size()));
    if (!(magnitude > 0.0)) throw TypeError("type magnitude must be positive");
    if (idx.size() == 2 && idx[0] == idx[1])
        throw TypeError("duplicate type: " + std::string(kTypeNames[idx[0]]));
    TypeVector v;
    const double share = magnitude / static_cast<double>(idx.size());
    for (auto i : idx) v[i] = share;
    return v;
}

}  // namespace

std::optional<std::size_t> type_index(std::string_view name) {
    for (std::size_t i = 0; i < kNumTypes; ++i)
        if (iequals(kTypeNames[i], name)) return i;
    return std::nullopt;
}

std::size_t require_type_index(std::string_view name) {
    auto i = type_index(name);
    if (!i) throw TypeError("unknown type: " + std::string(name));
    return *i;
}

std::string_view type_name(std::size_t index) {
    if (index >= kNumTypes) throw TypeError("type index out of range");
    return kTypeNames[index];
}

TypeVector TypeVector::clamped_unit() const {
    TypeVector out;
    for (std::size_t i = 0; i < kNumTypes; ++i) out[i] = std::clamp(values[i], 0.0, 1.0);
    return out;
}

TypeVector encode_type_vector(std::span<const std::string> types, double magnitude) {
    std::vector<std::size_t> idx;
    for (const auto& t : types) idx.push_back(require_type_index(t));
    return encode_indices(std::move(idx), magnitude);
}

TypeVector encode_type_vector(std::initializer_list<std::string_view> types, double magnitude) {
    std::vector<std::size_t> idx;
    for (auto t : types) idx.push_back(require_type_index(t));
    return encode_indices(std::move(idx), magnitude);
}

std::vector<std::size_t> active_types(const TypeVector& v) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < kNumTypes; ++i)
        if (v[i] != 0.0) out.push_back(i);
    return out;
}

}  // namespace typeswap
