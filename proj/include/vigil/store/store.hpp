#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vigil/adapters/tool_result.hpp"
#include "vigil/core/contract.hpp"
#include "vigil/core/finding.hpp"

namespace vigil::store {

struct StoredContract {
    Contract contract;
    std::uint64_t seq = 0;      // dense, 1-based, one per stored record
    std::string id;             // contract_id(contract)
    std::uint32_t version = 1;  // per id; bumps when the code behind an id changes
    Timestamp ingested_at{};

    friend bool operator==(const StoredContract&, const StoredContract&) = default;
};

void to_json(Json& j, const StoredContract& s);
void from_json(const Json& j, StoredContract& s);

struct ScanReport {
    std::string contract_id;
    std::uint64_t contract_seq = 0;  // the stored version that was scanned
    Timestamp started_at{};
    std::int64_t registry_version = 0;
    bool builtin_ran = false;
    double builtin_time_elapsed = 0.0;
    FindingList builtin_findings;
    std::map<std::string, adapters::ToolResult> tool_results;

    friend bool operator==(const ScanReport&, const ScanReport&) = default;
};

void to_json(Json& j, const ScanReport& r);
void from_json(const Json& j, ScanReport& r);

/// Range over stored contracts. Bounds are inclusive. Unless all_versions is
/// set only the newest version of each id is returned.
struct Selection {
    enum class Kind { all, seq, block, address };
    Kind kind = Kind::all;
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    std::optional<Address> address;
    bool all_versions = false;

    static Selection everything() { return {}; }
    static Selection seq_range(std::uint64_t a, std::uint64_t b);
    static Selection block_range(std::uint64_t a, std::uint64_t b);
    static Selection of(const Address& a);

    /// Throws InvalidRange when lo > hi.
    void validate() const;
    bool matches(const StoredContract& c) const;
    std::string describe() const;
};

/// Parses "a..b" (inclusive). Throws InvalidRange.
std::pair<std::uint64_t, std::uint64_t> parse_range(std::string_view text);

class ContractCursor {
public:
    using Fetch = std::function<StoredContract(std::size_t)>;
    ContractCursor() = default;
    ContractCursor(std::size_t n, Fetch fetch) : n_(n), fetch_(std::move(fetch)) {}

    std::optional<StoredContract> next() {
        if (pos_ >= n_) return std::nullopt;
        return fetch_(pos_++);
    }
    std::size_t size() const { return n_; }

private:
    std::size_t n_ = 0;
    std::size_t pos_ = 0;
    Fetch fetch_;
};

class Store {
public:
    virtual ~Store() = default;

    /// Upsert by contract id. Identical code is a no-op returning the stored
    /// record; changed code appends a new version. Throws InvalidContract for
    /// an empty contract, StorageFailure on I/O errors.
    virtual StoredContract put_contract(const Contract& c) = 0;
    virtual std::optional<StoredContract> latest(const std::string& id) const = 0;
    virtual ContractCursor select(const Selection& s) const = 0;
    virtual std::size_t contract_records() const = 0;

    /// Append-only. Throws UnknownContract when the id was never stored.
    virtual void put_report(const ScanReport& r) = 0;
    /// Ordered by started_at, ties in insertion order.
    virtual std::vector<ScanReport> get_reports(const std::string& id) const = 0;
    virtual std::optional<ScanReport> latest_report(const std::string& id) const = 0;
    virtual std::size_t report_records() const = 0;
};

struct FileStoreOptions {
    bool fsync = false;  // sync each append to disk
};

/// Two newline-delimited logs under a data directory. Opening replays both
/// logs into an in-memory offset index; a trailing partial record (no
/// newline) is dropped and truncated away.
class FileStore final : public Store {
public:
    explicit FileStore(std::filesystem::path dir, FileStoreOptions opts = {});
    ~FileStore() override;

    StoredContract put_contract(const Contract& c) override;
    std::optional<StoredContract> latest(const std::string& id) const override;
    ContractCursor select(const Selection& s) const override;
    std::size_t contract_records() const override;

    void put_report(const ScanReport& r) override;
    std::vector<ScanReport> get_reports(const std::string& id) const override;
    std::optional<ScanReport> latest_report(const std::string& id) const override;
    std::size_t report_records() const override;

    /// Bytes dropped from each log during the last open.
    std::size_t recovered_contract_bytes() const;
    std::size_t recovered_report_bytes() const;

    std::filesystem::path contracts_path() const;
    std::filesystem::path reports_path() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace vigil::store
