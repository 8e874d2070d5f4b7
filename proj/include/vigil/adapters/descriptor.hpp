#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vigil/core/json_util.hpp"
#include "vigil/core/time.hpp"

namespace vigil::adapters {

enum class Level { bytecode, solidity };

std::string_view to_string(Level l);

struct LevelSet {
    bool bytecode = false;
    bool solidity = false;

    bool empty() const { return !bytecode && !solidity; }
    bool has(Level l) const { return l == Level::bytecode ? bytecode : solidity; }
    friend bool operator==(const LevelSet&, const LevelSet&) = default;
};

enum class ParserKind { raw_text, json_passthrough, line_findings };

std::string_view to_string(ParserKind p);

/// Declarative registration of an external analyzer. Command templates may
/// use {input_file} (exactly once), {workdir} and {image}.
struct ToolDescriptor {
    std::string name;
    LevelSet level;
    std::string image;
    std::vector<std::string> command_template;
    Seconds timeout{300.0};
    ParserKind parser = ParserKind::raw_text;
    bool enabled = true;
    /// Free-form inventory notes (installation effort, dependencies, ...).
    std::map<std::string, std::string> metadata;

    /// Throws DescriptorError naming the offending field.
    void validate() const;
};

/// Validating reader; every violation throws DescriptorError naming the field.
ToolDescriptor descriptor_from_json(const Json& j);
Json to_json(const ToolDescriptor& d);

struct DescriptorLoad {
    std::vector<ToolDescriptor> descriptors;                           // sorted by name
    std::vector<std::pair<std::filesystem::path, std::string>> errors;  // skipped files
};

/// Loads every *.json file in `dir`. Malformed files and duplicate names are
/// reported in `errors` and skipped. A missing directory yields an empty load.
DescriptorLoad load_descriptors(const std::filesystem::path& dir);

}  // namespace vigil::adapters
