#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "vigil/core/address.hpp"
#include "vigil/core/hex.hpp"
#include "vigil/core/time.hpp"

namespace vigil {

enum class Origin { rpc, csv_import, local_file, explorer };

std::string_view to_string(Origin o);
std::optional<Origin> origin_from_string(std::string_view name);

/// An on-chain or local artifact. Empty bytecode is legal (an externally
/// owned account): there is simply nothing to analyze.
struct Contract {
    std::optional<Address> address;
    Bytes bytecode;
    std::optional<std::string> source;
    std::optional<std::uint64_t> block_number;
    std::optional<Timestamp> timestamp;
    Origin origin = Origin::local_file;

    bool source_available() const { return source.has_value() && !source->empty(); }
    bool empty() const { return bytecode.empty() && !source_available(); }

    /// Throws InvalidContract when origin requires an address that is absent.
    void validate() const;

    friend bool operator==(const Contract&, const Contract&) = default;
};

/// Stable key of a contract: the canonical address text, or for addressless
/// inputs "sha256-<hex>" over the bytecode and source.
std::string contract_id(const Contract& c);

void to_json(nlohmann::json& j, const Contract& c);
void from_json(const nlohmann::json& j, Contract& c);

}  // namespace vigil
