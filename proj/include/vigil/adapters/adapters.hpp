#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vigil/adapters/descriptor.hpp"
#include "vigil/adapters/executor.hpp"
#include "vigil/adapters/tool_result.hpp"
#include "vigil/core/contract.hpp"

namespace vigil::adapters {

inline constexpr std::string_view kIncompatibleExtension = "Contract extension doesn't allow this analysis";
inline constexpr std::size_t kOutputCap = 1u << 20;

struct Compatibility {
    bool ok = false;
    std::string reason;  // set when !ok
};

Compatibility check_compatibility(const ToolDescriptor& tool, const Contract& contract);

struct CommandPlan {
    std::string tool;
    std::vector<std::string> argv;
    std::filesystem::path input_file;
    std::filesystem::path workdir;
    Seconds timeout{0.0};
};

/// Input file name for a contract inside a workdir.
std::filesystem::path input_path(const std::filesystem::path& workdir, const Contract& c, Level level);

/// Picks the .sol input for solidity-capable tools when source exists, the
/// .hex input otherwise. Throws MissingInputFile if that file is absent.
CommandPlan plan_commands(const ToolDescriptor& tool, const Contract& contract, const std::filesystem::path& workdir);

/// Runs the plan; wall time is measured here rather than trusted from the
/// executor.
RawOutput execute(const CommandPlan& plan, Executor& executor);

/// Pure mapping from raw process output to a result.
ToolResult normalize(const RawOutput& raw, const ToolDescriptor& tool);

/// Parses `<vuln_class>:<decimal offset>:<text>` lines. Unknown classes are
/// counted in `dropped`.
FindingList parse_line_findings(std::string_view text, const std::string& tool, std::size_t& dropped);

/// check_compatibility, plan_commands, execute and normalize in sequence.
/// Never throws for per-tool problems; they become failed results.
ToolResult run_tool(const ToolDescriptor& tool, const Contract& contract, const std::filesystem::path& workdir,
                    Executor& executor);

ToolResult skipped_result(const std::string& tool, const std::string& reason);

}  // namespace vigil::adapters
