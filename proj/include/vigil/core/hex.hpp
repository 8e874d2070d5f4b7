#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vigil {

using Bytes = std::vector<std::uint8_t>;

/// Value of a single hex digit, or nullopt.
constexpr std::optional<std::uint8_t> hex_nibble(char c) {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    return std::nullopt;
}

/// Strips surrounding whitespace and an optional "0x"/"0X" prefix, then
/// decodes. Throws InvalidHex on odd length or a non-hex character.
Bytes decode_hex(std::string_view text);

/// Lowercase, "0x"-prefixed.
std::string encode_hex(std::span<const std::uint8_t> bytes);

/// Lowercase, no prefix.
std::string to_hex_digits(std::span<const std::uint8_t> bytes);

}  // namespace vigil
