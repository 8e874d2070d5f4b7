#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vigil/core/finding.hpp"
#include "vigil/core/json_util.hpp"

namespace vigil::adapters {

enum class ToolStatus { ok, skipped, failed, timeout };

std::string_view to_string(ToolStatus s);
std::optional<ToolStatus> tool_status_from_string(std::string_view s);

/// One analyzer's outcome on one contract. Serialized documents always carry
/// "output" and "time_elapsed".
struct ToolResult {
    std::string tool;
    ToolStatus status = ToolStatus::ok;
    std::string output;
    double time_elapsed = 0.0;  // seconds
    FindingList findings;
    std::optional<std::string> skip_reason;
    std::vector<std::string> notes;  // normalization remarks
    std::size_t dropped_findings = 0;

    friend bool operator==(const ToolResult&, const ToolResult&) = default;
};

void to_json(Json& j, const ToolResult& r);
void from_json(const Json& j, ToolResult& r);

}  // namespace vigil::adapters
