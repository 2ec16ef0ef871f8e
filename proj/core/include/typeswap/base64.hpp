#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace typeswap {

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws std::invalid_argument on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace typeswap
