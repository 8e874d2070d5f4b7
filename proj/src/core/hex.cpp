#include "vigil/core/hex.hpp"

#include "vigil/core/errors.hpp"

namespace vigil {

namespace {

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\v\f";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

}  // namespace

Bytes decode_hex(std::string_view text) {
    auto digits = trim(text);
    if (digits.size() >= 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X'))
        digits.remove_prefix(2);
    if (digits.size() % 2 != 0)
        throw InvalidHex("odd number of hex digits (" + std::to_string(digits.size()) + ")");

    Bytes out;
    out.reserve(digits.size() / 2);
    for (std::size_t i = 0; i < digits.size(); i += 2) {
        const auto hi = hex_nibble(digits[i]);
        const auto lo = hex_nibble(digits[i + 1]);
        if (!hi || !lo) {
            const std::size_t bad = hi ? i + 1 : i;
            throw InvalidHex("non-hex character '" + std::string(1, digits[bad]) + "' at digit " +
                             std::to_string(bad));
        }
        out.push_back(static_cast<std::uint8_t>((*hi << 4) | *lo));
    }
    return out;
}

std::string to_hex_digits(std::span<const std::uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xf]);
    }
    return out;
}

std::string encode_hex(std::span<const std::uint8_t> bytes) {
    return "0x" + to_hex_digits(bytes);
}

}  // namespace vigil
