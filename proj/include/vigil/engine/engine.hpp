#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <tuple>
#include <vector>

#include "vigil/adapters/adapters.hpp"
#include "vigil/detect/registry.hpp"
#include "vigil/store/store.hpp"

namespace vigil::engine {

inline constexpr std::string_view kBuiltinName = "builtin";
inline constexpr std::size_t kDefaultParallelism = 4;

struct ScanPlan {
    store::Selection selection;
    std::vector<adapters::ToolDescriptor> tools;  // enabled ones only, in request order
    bool run_builtin = false;
    std::size_t parallelism = kDefaultParallelism;
    std::filesystem::path inputs_dir;
    std::vector<std::string> notices;  // e.g. disabled tools that were dropped

    std::size_t analyzers_per_contract() const { return tools.size() + (run_builtin ? 1 : 0); }
};

struct PlanOptions {
    std::size_t parallelism = kDefaultParallelism;
    std::filesystem::path inputs_dir;
};

/// Resolves names against the loaded descriptors; "builtin" selects the
/// built-in detectors. Throws UnknownTool, EmptyPlan, or ConfigError.
ScanPlan build_scan_plan(const store::Selection& selection, const std::vector<std::string>& tool_names,
                         const std::vector<adapters::ToolDescriptor>& descriptors, const PlanOptions& options);

struct StatusCounts {
    std::size_t ok = 0;
    std::size_t skipped = 0;
    std::size_t failed = 0;
    std::size_t timeout = 0;

    std::size_t total() const { return ok + skipped + failed + timeout; }
    void add(adapters::ToolStatus s);
    friend bool operator==(const StatusCounts&, const StatusCounts&) = default;
};

struct ScanSummary {
    std::size_t contracts_scanned = 0;
    std::size_t records_produced = 0;
    StatusCounts per_status;
    double wall_time = 0.0;
    std::vector<std::string> errors;  // engine-level problems only
    bool partial = false;             // cancelled before the selection was exhausted
    std::vector<std::string> report_ids;
};

void to_json(Json& j, const ScanSummary& s);

struct RunControls {
    std::ostream* progress = nullptr;           // progress lines, one per 10%
    const std::atomic<bool>* cancel = nullptr;  // set to stop after in-flight work
};

/// Scans every contract in the plan's selection. Per-analyzer failures are
/// recorded in the reports; only StorageFailure escapes.
ScanSummary run_scan(const ScanPlan& plan, adapters::Executor& executor, store::Store& store,
                     const detect::DetectorRegistry& registry, const RunControls& controls = {});

/// Same, over an explicit list instead of the plan's selection.
ScanSummary run_scan(const ScanPlan& plan, const std::vector<store::StoredContract>& contracts,
                     adapters::Executor& executor, store::Store& store, const detect::DetectorRegistry& registry,
                     const RunControls& controls = {});

/// The engine's builtin pass over one contract.
FindingList run_builtin(const Contract& contract, const detect::DetectorRegistry& registry);

/// A finding tagged with the analyzer that produced it.
struct SourcedFinding {
    std::string source;  // "builtin" or a tool name
    Finding finding;

    auto key() const {
        return std::tuple(source, finding.detector, static_cast<int>(finding.vuln_class),
                          finding.location.has_value(), finding.location.value_or(0), finding.message,
                          static_cast<int>(finding.severity));
    }
};

inline bool operator==(const SourcedFinding& a, const SourcedFinding& b) { return a.key() == b.key(); }
inline bool operator<(const SourcedFinding& a, const SourcedFinding& b) { return a.key() < b.key(); }

std::vector<SourcedFinding> all_findings(const store::ScanReport& r);

struct ContractDiff {
    std::string contract_id;
    bool had_baseline = false;
    std::int64_t previous_version = 0;
    std::int64_t current_version = 0;
    std::vector<SourcedFinding> added;
    std::vector<SourcedFinding> removed;
};

void to_json(Json& j, const ContractDiff& d);

/// Set difference of the two reports' findings.
ContractDiff diff_reports(const std::optional<store::ScanReport>& before, const store::ScanReport& after);

/// Stale means: no report yet, a report from an older registry version, or a
/// report of an older stored version of the contract.
std::vector<store::StoredContract> stale_contracts(const store::Store& store, const detect::DetectorRegistry& registry);

struct MonitorResult {
    ScanSummary summary;
    std::vector<ContractDiff> diffs;
};

/// Re-scans exactly the stale contracts with the plan's analyzers (the plan's
/// selection is ignored) and diffs each against its previous report.
MonitorResult monitor_rescan(store::Store& store, const detect::DetectorRegistry& registry,
                             adapters::Executor& executor, const ScanPlan& plan, const RunControls& controls = {});

}  // namespace vigil::engine
