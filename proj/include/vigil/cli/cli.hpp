#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vigil/core/json_util.hpp"
#include "vigil/detect/registry.hpp"
#include "vigil/stats/stats.hpp"

namespace vigil::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int internal = 1;
inline constexpr int invalid_input = 2;  // bad file, extension, address, range, CSV header
inline constexpr int tool_selection = 3;  // unknown tool or nothing to run
inline constexpr int not_a_contract = 4;
inline constexpr int rpc = 5;
inline constexpr int storage = 6;
inline constexpr int config = 7;
}  // namespace exit_code

struct ExplorerConfig {
    std::string api_base;
    std::string api_key;
    double rate = 5.0;  // requests per second
};

struct Config {
    std::filesystem::path data_dir = "vigil-data";
    std::filesystem::path inputs_dir;  // defaults to <data_dir>/inputs
    std::filesystem::path tools_dir;   // defaults to the shipped descriptors
    std::optional<std::string> rpc_endpoint;
    std::optional<ExplorerConfig> explorer;
    std::size_t parallelism = 4;
    detect::DetectorConfig detectors;
    std::vector<std::string> disabled_detectors;
    stats::GroupMap stat_groups = stats::default_groups();

    /// Fills the derived paths and makes every path absolute. Throws ConfigError.
    void finalize();
    detect::DetectorRegistry registry() const;
};

/// Overlays a config document on `base`. Relative paths resolve against
/// `base_dir`. Unknown keys are rejected with ConfigError.
Config apply_config(Config base, const Json& doc, const std::filesystem::path& base_dir);

/// Reads and applies a config file. Throws ConfigError.
Config load_config_file(Config base, const std::filesystem::path& path);

/// Entry point shared by the executable and the tests. Documents go to
/// `out`, logs and progress to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vigil::cli
