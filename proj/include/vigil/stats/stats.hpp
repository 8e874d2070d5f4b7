#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vigil/adapters/descriptor.hpp"
#include "vigil/core/finding.hpp"
#include "vigil/store/store.hpp"

namespace vigil::stats {

/// count out of denominator; pct() is empty when there is nothing to divide by.
struct Ratio {
    std::size_t count = 0;
    std::size_t of = 0;

    std::optional<double> pct() const {
        if (of == 0) return std::nullopt;
        return 100.0 * static_cast<double>(count) / static_cast<double>(of);
    }
    friend bool operator==(const Ratio&, const Ratio&) = default;
};

/// Named unions of vulnerability classes.
using GroupMap = std::map<std::string, std::set<VulnClass>>;

/// arithmetic, transaction and access_visibility.
const GroupMap& default_groups();

struct StatsOptions {
    GroupMap groups = default_groups();
    /// Used to split the agreement matrix by input level; builtin counts as bytecode.
    std::vector<adapters::ToolDescriptor> descriptors;
};

// Jaccard index per ordered pair; empty when neither analyzer flagged anything.
using AgreementMatrix = std::map<std::string, std::map<std::string, std::optional<double>>>;

struct StatsSummary {
    std::size_t contracts_in_scope = 0;
    std::size_t total_contracts = 0;  // in scope with at least one report

    std::map<VulnClass, Ratio> pct_by_vuln_class;
    Ratio pct_selfdestruct;
    Ratio pct_delegatecall;
    Ratio pct_outdated_compiler;
    Ratio pct_with_source;
    std::map<std::string, Ratio> groups;

    std::map<std::string, Ratio> per_tool_execution_pct;
    AgreementMatrix agreement;
    std::map<std::string, AgreementMatrix> agreement_by_level;

    std::optional<double> size_vs_findings;
    std::map<std::string, std::set<VulnClass>> classes_per_tool;

    friend bool operator==(const StatsSummary&, const StatsSummary&) = default;
};

/// A finding that makes a contract count as vulnerable (severity low or above).
bool counts_as_vulnerable(const Finding& f);

/// Aggregates the latest report of each contract (newest version) in scope.
StatsSummary compute_stats(const store::Store& store, const store::Selection& scope, const StatsOptions& options = {});

/// Two-pass sample Pearson; empty for n < 3 or zero variance.
std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y);

double jaccard(std::size_t intersection, std::size_t union_size);

void to_json(Json& j, const StatsSummary& s);
/// Aligned plain-text rendering.
std::string render_table(const StatsSummary& s);

struct TimelineEntry {
    Timestamp started_at{};
    std::int64_t registry_version = 0;
    std::uint64_t contract_seq = 0;
    std::map<VulnClass, std::size_t> counts;

    friend bool operator==(const TimelineEntry&, const TimelineEntry&) = default;
};

/// One entry per stored report, oldest first. Throws UnknownContract.
std::vector<TimelineEntry> findings_over_time(const store::Store& store, const std::string& contract_id);

void to_json(Json& j, const TimelineEntry& e);

}  // namespace vigil::stats
