#include "vigil/core/address.hpp"

#include "vigil/core/errors.hpp"
#include "vigil/core/hex.hpp"

namespace vigil {

Address Address::parse(std::string_view text) {
    std::string_view digits = text;
    if (digits.size() >= 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X'))
        digits.remove_prefix(2);
    if (digits.size() != 2 * kSize)
        throw InvalidAddress("address must have 40 hex digits, got " +
                             std::to_string(digits.size()) + ": '" + std::string(text) + "'");
    Storage bytes{};
    for (std::size_t i = 0; i < kSize; ++i) {
        const auto hi = hex_nibble(digits[2 * i]);
        const auto lo = hex_nibble(digits[2 * i + 1]);
        if (!hi || !lo) throw InvalidAddress("non-hex character in address '" + std::string(text) + "'");
        bytes[i] = static_cast<std::uint8_t>((*hi << 4) | *lo);
    }
    return Address{bytes};
}

std::string Address::to_string() const { return encode_hex(bytes_); }

}  // namespace vigil
