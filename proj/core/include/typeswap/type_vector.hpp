#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace typeswap {

inline constexpr std::size_t kNumTypes = 18;

/// Canonical type list, alphabetical. Index positions define the layout of
/// every TypeVector in the project.
inline constexpr std::array<std::string_view, kNumTypes> kTypeNames = {
    "Bug",    "Dark",   "Dragon", "Electric", "Fairy", "Fighting",
    "Fire",   "Flying", "Ghost",  "Grass",    "Ground", "Ice",
    "Normal", "Poison", "Psychic", "Rock",    "Steel", "Water"};

class TypeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Case-insensitive lookup. Returns nullopt for names outside the list.
std::optional<std::size_t> type_index(std::string_view name);

/// Like type_index but throws TypeError("unknown type: ...").
std::size_t require_type_index(std::string_view name);

std::string_view type_name(std::size_t index);

/// Length-18 type encoding. One type at magnitude m puts m at its index;
/// two types put m/2 at each index.
struct TypeVector {
    std::array<double, kNumTypes> values{};

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    std::span<const double> span() const { return values; }

    /// Copy with every entry clamped into [0,1]; used when the vector is a
    /// loss target.
    TypeVector clamped_unit() const;

    bool operator==(const TypeVector&) const = default;
};

TypeVector encode_type_vector(std::span<const std::string> types, double magnitude = 1.0);
TypeVector encode_type_vector(std::initializer_list<std::string_view> types,
                              double magnitude = 1.0);

/// Indices of the non-zero entries, ascending.
std::vector<std::size_t> active_types(const TypeVector& v);

}  // namespace typeswap
