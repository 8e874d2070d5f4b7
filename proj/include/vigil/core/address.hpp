#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

namespace vigil {

/// A 160-bit account identifier. Canonical text is lowercase hex with a
/// "0x" prefix (42 characters). Input checksums (mixed case) are accepted
/// but never validated.
class Address {
public:
    static constexpr std::size_t kSize = 20;
    using Storage = std::array<std::uint8_t, kSize>;

    constexpr Address() = default;
    explicit constexpr Address(const Storage& bytes) : bytes_(bytes) {}

    /// Accepts 40 hex digits with or without "0x", any case. Throws InvalidAddress.
    static Address parse(std::string_view text);

    std::string to_string() const;
    const Storage& bytes() const { return bytes_; }

    friend constexpr auto operator<=>(const Address&, const Address&) = default;

private:
    Storage bytes_{};
};

inline Address parse_address(std::string_view text) { return Address::parse(text); }

}  // namespace vigil

template <>
struct std::hash<vigil::Address> {
    std::size_t operator()(const vigil::Address& a) const noexcept {
        std::size_t h = 0;
        for (auto b : a.bytes()) h = h * 131 + b;
        return h;
    }
};
