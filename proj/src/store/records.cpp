#include <charconv>

#include "vigil/core/errors.hpp"
#include "vigil/core/json_util.hpp"
#include "vigil/store/store.hpp"

namespace vigil::store {

void to_json(Json& j, const StoredContract& s) {
    j = Json{{"seq", s.seq},
             {"id", s.id},
             {"version", s.version},
             {"ingested_at", format_iso8601(s.ingested_at)},
             {"contract", s.contract}};
}

void from_json(const Json& j, StoredContract& s) {
    s.seq = j.at("seq").get<std::uint64_t>();
    s.id = j.at("id").get<std::string>();
    s.version = j.at("version").get<std::uint32_t>();
    s.ingested_at = parse_iso8601(j.at("ingested_at").get<std::string>());
    s.contract = j.at("contract").get<Contract>();
}

void to_json(Json& j, const ScanReport& r) {
    Json tools = Json::object();
    for (const auto& [name, result] : r.tool_results) tools[name] = result;
    j = Json{{"contract_id", r.contract_id},
             {"contract_seq", r.contract_seq},
             {"started_at", format_iso8601(r.started_at)},
             {"registry_version", r.registry_version},
             {"builtin_ran", r.builtin_ran},
             {"builtin_time_elapsed", r.builtin_time_elapsed},
             {"builtin_findings", r.builtin_findings},
             {"tool_results", tools}};
}

void from_json(const Json& j, ScanReport& r) {
    r.contract_id = j.at("contract_id").get<std::string>();
    r.contract_seq = j.at("contract_seq").get<std::uint64_t>();
    r.started_at = parse_iso8601(j.at("started_at").get<std::string>());
    r.registry_version = j.at("registry_version").get<std::int64_t>();
    r.builtin_ran = j.at("builtin_ran").get<bool>();
    r.builtin_time_elapsed = j.at("builtin_time_elapsed").get<double>();
    r.builtin_findings = j.at("builtin_findings").get<FindingList>();
    r.tool_results.clear();
    for (const auto& [name, v] : j.at("tool_results").items()) r.tool_results[name] = v.get<adapters::ToolResult>();
}

Selection Selection::seq_range(std::uint64_t a, std::uint64_t b) {
    Selection s;
    s.kind = Kind::seq;
    s.lo = a;
    s.hi = b;
    return s;
}

Selection Selection::block_range(std::uint64_t a, std::uint64_t b) {
    Selection s;
    s.kind = Kind::block;
    s.lo = a;
    s.hi = b;
    return s;
}

Selection Selection::of(const Address& a) {
    Selection s;
    s.kind = Kind::address;
    s.address = a;
    return s;
}

void Selection::validate() const {
    if ((kind == Kind::seq || kind == Kind::block) && lo > hi)
        throw InvalidRange("empty interval: " + std::to_string(lo) + " > " + std::to_string(hi));
    if (kind == Kind::address && !address) throw InvalidRange("address selection without an address");
}

bool Selection::matches(const StoredContract& c) const {
    switch (kind) {
        case Kind::all: return true;
        case Kind::seq: return c.seq >= lo && c.seq <= hi;
        case Kind::block: return c.contract.block_number && *c.contract.block_number >= lo && *c.contract.block_number <= hi;
        case Kind::address: return address && c.contract.address == address;
    }
    return false;
}

std::string Selection::describe() const {
    switch (kind) {
        case Kind::all: return "all";
        case Kind::seq: return "seq " + std::to_string(lo) + ".." + std::to_string(hi);
        case Kind::block: return "block " + std::to_string(lo) + ".." + std::to_string(hi);
        case Kind::address: return "address " + (address ? address->to_string() : std::string("?"));
    }
    return "?";
}

std::pair<std::uint64_t, std::uint64_t> parse_range(std::string_view text) {
    const auto dots = text.find("..");
    const auto num = [&](std::string_view s) {
        std::uint64_t v = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || p != s.data() + s.size())
            throw InvalidRange("bad range '" + std::string(text) + "'; expected a..b");
        return v;
    };
    if (dots == std::string_view::npos) {
        const auto v = num(text);
        return {v, v};
    }
    const auto a = num(text.substr(0, dots));
    const auto b = num(text.substr(dots + 2));
    if (a > b) throw InvalidRange("empty interval: " + std::to_string(a) + " > " + std::to_string(b));
    return {a, b};
}

}  // namespace vigil::store
