#include "vigil/adapters/tool_result.hpp"

#include "vigil/core/errors.hpp"

namespace vigil::adapters {

std::string_view to_string(ToolStatus s) {
    switch (s) {
        case ToolStatus::ok: return "ok";
        case ToolStatus::skipped: return "skipped";
        case ToolStatus::failed: return "failed";
        case ToolStatus::timeout: return "timeout";
    }
    return "failed";
}

std::optional<ToolStatus> tool_status_from_string(std::string_view s) {
    for (auto st : {ToolStatus::ok, ToolStatus::skipped, ToolStatus::failed, ToolStatus::timeout})
        if (to_string(st) == s) return st;
    return std::nullopt;
}

void to_json(Json& j, const ToolResult& r) {
    j = Json{{"tool", r.tool},
             {"status", to_string(r.status)},
             {"output", r.output},
             {"time_elapsed", r.time_elapsed},
             {"findings", r.findings},
             {"notes", r.notes},
             {"dropped_findings", r.dropped_findings}};
    j["skip_reason"] = r.skip_reason ? Json(*r.skip_reason) : Json(nullptr);
}

void from_json(const Json& j, ToolResult& r) {
    r.tool = j.at("tool").get<std::string>();
    const auto status = tool_status_from_string(j.at("status").get<std::string>());
    if (!status) throw Error("unknown tool status '" + j.at("status").get<std::string>() + "'");
    r.status = *status;
    r.output = j.at("output").get<std::string>();
    r.time_elapsed = j.at("time_elapsed").get<double>();
    r.findings = j.at("findings").get<FindingList>();
    r.notes = j.value("notes", std::vector<std::string>{});
    r.dropped_findings = j.value("dropped_findings", std::size_t{0});
    const auto& reason = j.at("skip_reason");
    r.skip_reason = reason.is_null() ? std::nullopt : std::optional(reason.get<std::string>());
}

}  // namespace vigil::adapters
