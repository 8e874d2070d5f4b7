#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vigil/core/finding.hpp"
#include "vigil/detect/pragma.hpp"

namespace vigil::detect {

/// Maximum EVM call depth.
inline constexpr int kStackLimit = 1024;

namespace ids {
inline constexpr std::string_view reentrancy = "reentrancy";
inline constexpr std::string_view time_dependence = "time-dependence";
inline constexpr std::string_view bad_randomness = "bad-randomness";
inline constexpr std::string_view tx_origin = "tx-origin";
inline constexpr std::string_view unchecked_call = "unchecked-call";
inline constexpr std::string_view selfdestruct_use = "selfdestruct-use";
inline constexpr std::string_view delegatecall_use = "delegatecall-use";
inline constexpr std::string_view outdated_pragma = "outdated-pragma";
inline constexpr std::string_view call_depth = "call-depth";
}  // namespace ids

struct DetectorEntry {
    std::string id;
    VulnClass vuln_class;
    bool enabled = true;
};

/// Tunables of the built-in heuristics.
struct DetectorConfig {
    Version pragma_floor{0, 8, 0};
    int call_chain_depth = 3;

    friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

/// Ordered set of built-in detectors. The version increases whenever the
/// detector set, a heuristic, or a threshold changes, so reports produced by
/// an older registry can be found and re-scanned.
class DetectorRegistry {
public:
    /// Version of the heuristics shipped in this build.
    static constexpr std::int64_t kBuiltinVersion = 1;

    static DetectorRegistry defaults();

    const std::vector<DetectorEntry>& entries() const { return entries_; }
    std::int64_t registry_version() const { return version_; }

    bool contains(std::string_view id) const;
    bool enabled(std::string_view id) const;

    /// Throws vigil::Error for an unknown id. Bumps the version on change.
    void set_enabled(std::string_view id, bool on);
    void set_all_enabled(bool on);
    void bump_version() { ++version_; }

    const DetectorConfig& config() const { return config_; }
    /// Bumps the version when any threshold differs from the current one.
    void set_config(const DetectorConfig& config);

private:
    std::vector<DetectorEntry> entries_;
    DetectorConfig config_;
    std::int64_t version_ = kBuiltinVersion;
};

}  // namespace vigil::detect
