#include "vigil/adapters/adapters.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <sstream>

#include "vigil/core/errors.hpp"

namespace vigil::adapters {

namespace {

using Clock = std::chrono::steady_clock;

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
        s.replace(pos, from.size(), to);
}

// Cut at a byte cap without splitting a UTF-8 sequence.
std::string cap_output(std::string text) {
    if (text.size() <= kOutputCap) return text;
    std::size_t cut = kOutputCap;
    while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xc0) == 0x80) --cut;
    const auto dropped = text.size() - cut;
    text.resize(cut);
    text += "\n[output truncated: " + std::to_string(dropped) + " bytes dropped]";
    return text;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::optional<std::size_t> parse_offset(const Json& v) {
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::size_t>(v.get<long long>());
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        std::size_t out = 0;
        const bool hex = s.rfind("0x", 0) == 0;
        const char* b = s.data() + (hex ? 2 : 0);
        const auto [p, ec] = std::from_chars(b, s.data() + s.size(), out, hex ? 16 : 10);
        if (ec == std::errc() && p == s.data() + s.size() && p != b) return out;
    }
    return std::nullopt;
}

const Json* first_of(const Json& obj, std::initializer_list<const char*> keys) {
    for (const auto* k : keys)
        if (const auto it = obj.find(k); it != obj.end() && !it->is_null()) return &*it;
    return nullptr;
}

FindingList parse_json_findings(const Json& doc, const std::string& tool, std::size_t& dropped) {
    FindingList out;
    const auto it = doc.is_object() ? doc.find("findings") : doc.end();
    if (!doc.is_object() || it == doc.end() || !it->is_array()) return out;
    for (const auto& item : *it) {
        if (!item.is_object()) {
            ++dropped;
            continue;
        }
        const auto* cls = first_of(item, {"vuln_class", "class", "type", "title", "check"});
        const auto vc = cls && cls->is_string() ? match_vuln_class(cls->get<std::string>()) : std::nullopt;
        if (!vc) {
            ++dropped;
            continue;
        }
        Finding f;
        f.vuln_class = *vc;
        f.detector = tool;
        f.severity = Severity::medium;
        if (const auto* sev = first_of(item, {"severity", "impact"}); sev && sev->is_string())
            f.severity = severity_from_string(sev->get<std::string>()).value_or(Severity::medium);
        if (const auto* loc = first_of(item, {"location", "offset", "pc", "address"})) f.location = parse_offset(*loc);
        if (const auto* msg = first_of(item, {"message", "description"}); msg && msg->is_string())
            f.message = msg->get<std::string>();
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace

Compatibility check_compatibility(const ToolDescriptor& tool, const Contract& contract) {
    if ((tool.level.bytecode && !contract.bytecode.empty()) || (tool.level.solidity && contract.source_available()))
        return {true, {}};
    return {false, std::string(kIncompatibleExtension)};
}

std::filesystem::path input_path(const std::filesystem::path& workdir, const Contract& c, Level level) {
    return workdir / (contract_id(c) + (level == Level::solidity ? ".sol" : ".hex"));
}

CommandPlan plan_commands(const ToolDescriptor& tool, const Contract& contract, const std::filesystem::path& workdir) {
    const bool use_source = tool.level.solidity && contract.source_available();
    const auto file = input_path(workdir, contract, use_source ? Level::solidity : Level::bytecode);
    std::error_code ec;
    if (!std::filesystem::is_regular_file(file, ec))
        throw MissingInputFile("input file " + file.string() + " not found for tool " + tool.name);

    CommandPlan plan{tool.name, {}, file, workdir, tool.timeout};
    for (auto tok : tool.command_template) {
        replace_all(tok, "{input_file}", file.string());
        replace_all(tok, "{workdir}", workdir.string());
        replace_all(tok, "{image}", tool.image);
        plan.argv.push_back(std::move(tok));
    }
    return plan;
}

RawOutput execute(const CommandPlan& plan, Executor& executor) {
    const auto start = Clock::now();
    auto raw = executor.run(plan.argv, plan.workdir, plan.timeout);
    raw.wall_time = std::chrono::duration_cast<Seconds>(Clock::now() - start);
    return raw;
}

FindingList parse_line_findings(std::string_view text, const std::string& tool, std::size_t& dropped) {
    FindingList out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        const auto c1 = line.find(':');
        if (c1 == std::string::npos) continue;
        const auto c2 = line.find(':', c1 + 1);
        if (c2 == std::string::npos) continue;
        const auto offset_text = trim(std::string_view(line).substr(c1 + 1, c2 - c1 - 1));
        std::size_t offset = 0;
        const auto [p, ec] = std::from_chars(offset_text.data(), offset_text.data() + offset_text.size(), offset);
        if (offset_text.empty() || ec != std::errc() || p != offset_text.data() + offset_text.size()) continue;
        const auto vc = match_vuln_class(trim(std::string_view(line).substr(0, c1)));
        if (!vc) {
            ++dropped;
            continue;
        }
        out.push_back(Finding{*vc, Severity::medium, tool, offset, trim(std::string_view(line).substr(c2 + 1))});
    }
    return out;
}

ToolResult normalize(const RawOutput& raw, const ToolDescriptor& tool) {
    ToolResult r;
    r.tool = tool.name;
    r.time_elapsed = std::max(0.0, raw.wall_time.count());

    std::string output = raw.stdout_text;
    if (raw.timed_out) {
        r.status = ToolStatus::timeout;
        r.time_elapsed = std::max(r.time_elapsed, tool.timeout.count());
        r.notes.push_back("killed after " + std::to_string(tool.timeout.count()) + "s timeout");
    } else if (raw.exit_code != 0) {
        r.status = ToolStatus::failed;
        if (!raw.stderr_text.empty()) {
            if (!output.empty() && output.back() != '\n') output += '\n';
            output += raw.stderr_text;
        }
        r.notes.push_back("exit code " + std::to_string(raw.exit_code));
    }
    r.output = cap_output(sanitize_utf8(output));

    switch (tool.parser) {
        case ParserKind::raw_text: break;
        case ParserKind::line_findings:
            r.findings = parse_line_findings(raw.stdout_text, tool.name, r.dropped_findings);
            break;
        case ParserKind::json_passthrough: {
            const auto doc = Json::parse(raw.stdout_text, nullptr, false);
            if (doc.is_discarded()) {
                if (!trim(raw.stdout_text).empty()) r.notes.push_back("output is not valid JSON; kept as raw text");
            } else {
                r.findings = parse_json_findings(doc, tool.name, r.dropped_findings);
            }
            break;
        }
    }
    if (r.dropped_findings > 0)
        r.notes.push_back(std::to_string(r.dropped_findings) + " finding(s) with unrecognized class dropped");
    return r;
}

ToolResult skipped_result(const std::string& tool, const std::string& reason) {
    ToolResult r;
    r.tool = tool;
    r.status = ToolStatus::skipped;
    r.output = reason;
    r.skip_reason = reason;
    r.time_elapsed = 0.0;
    return r;
}

ToolResult run_tool(const ToolDescriptor& tool, const Contract& contract, const std::filesystem::path& workdir,
                    Executor& executor) {
    if (const auto compat = check_compatibility(tool, contract); !compat.ok) return skipped_result(tool.name, compat.reason);
    const auto failed = [&](const std::string& why) {
        ToolResult r;
        r.tool = tool.name;
        r.status = ToolStatus::failed;
        r.output = why;
        r.notes.push_back(why);
        return r;
    };
    try {
        const auto plan = plan_commands(tool, contract, workdir);
        return normalize(execute(plan, executor), tool);
    } catch (const MissingInputFile& e) {
        return failed(e.what());
    } catch (const ExecutorUnavailable& e) {
        return failed(std::string("executor unavailable: ") + e.what());
    }
}

}  // namespace vigil::adapters
