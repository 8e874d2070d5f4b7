#include "vigil/core/contract.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>
#include <utility>

#include <nlohmann/json.hpp>

#include "vigil/core/errors.hpp"

namespace vigil {

namespace {

constexpr std::pair<Origin, std::string_view> kOriginNames[] = {
    {Origin::rpc, "rpc"},
    {Origin::csv_import, "csv_import"},
    {Origin::local_file, "local_file"},
    {Origin::explorer, "explorer"},
};

std::string sha256_hex(const Contract& c) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw Error("sha256 unavailable");
    // Length-prefix each part so (bytecode, source) pairs cannot collide by shifting bytes.
    const auto feed = [&](const void* data, std::size_t len) {
        const std::uint64_t n = len;
        EVP_DigestUpdate(ctx.get(), &n, sizeof n);
        if (len) EVP_DigestUpdate(ctx.get(), data, len);
    };
    feed(c.bytecode.data(), c.bytecode.size());
    const std::string_view src = c.source_available() ? std::string_view(*c.source) : std::string_view{};
    feed(src.data(), src.size());
    std::array<std::uint8_t, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
    return to_hex_digits(std::span(digest.data(), len));
}

}  // namespace

std::string_view to_string(Origin o) {
    for (const auto& [origin, name] : kOriginNames)
        if (origin == o) return name;
    return "local_file";
}

std::optional<Origin> origin_from_string(std::string_view name) {
    for (const auto& [origin, n] : kOriginNames)
        if (n == name) return origin;
    return std::nullopt;
}

void Contract::validate() const {
    if ((origin == Origin::rpc || origin == Origin::csv_import) && !address)
        throw InvalidContract(std::string("origin ") + std::string(to_string(origin)) +
                              " requires an address");
}

std::string contract_id(const Contract& c) {
    if (c.address) return c.address->to_string();
    return "sha256-" + sha256_hex(c);
}

void to_json(nlohmann::json& j, const Contract& c) {
    j = nlohmann::json::object();
    j["address"] = c.address ? nlohmann::json(c.address->to_string()) : nlohmann::json(nullptr);
    j["bytecode"] = encode_hex(c.bytecode);
    j["source"] = c.source ? nlohmann::json(*c.source) : nlohmann::json(nullptr);
    j["source_available"] = c.source_available();
    j["block_number"] = c.block_number ? nlohmann::json(*c.block_number) : nlohmann::json(nullptr);
    j["timestamp"] = c.timestamp ? nlohmann::json(format_iso8601(*c.timestamp)) : nlohmann::json(nullptr);
    j["origin"] = to_string(c.origin);
}

void from_json(const nlohmann::json& j, Contract& c) {
    const auto& addr = j.at("address");
    c.address = addr.is_null() ? std::nullopt : std::optional(Address::parse(addr.get<std::string>()));
    c.bytecode = decode_hex(j.at("bytecode").get<std::string>());
    const auto& src = j.at("source");
    c.source = src.is_null() ? std::nullopt : std::optional(src.get<std::string>());
    const auto& block = j.at("block_number");
    c.block_number = block.is_null() ? std::nullopt : std::optional(block.get<std::uint64_t>());
    const auto& ts = j.at("timestamp");
    c.timestamp = ts.is_null() ? std::nullopt : std::optional(parse_iso8601(ts.get<std::string>()));
    const auto origin = origin_from_string(j.at("origin").get<std::string>());
    if (!origin) throw Error("unknown origin '" + j.at("origin").get<std::string>() + "'");
    c.origin = *origin;
}

}  // namespace vigil
