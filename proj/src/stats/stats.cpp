#include "vigil/stats/stats.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "vigil/core/errors.hpp"

namespace vigil::stats {

namespace {

constexpr std::string_view kBuiltin = "builtin";

bool usage_class(VulnClass c) { return c == VulnClass::SelfDestructUse || c == VulnClass::DelegateCallUse; }

bool counts_for_class(const Finding& f) { return usage_class(f.vuln_class) || counts_as_vulnerable(f); }

struct AnalyzerView {
    bool ok = false;
    const FindingList* findings = nullptr;
};

std::map<std::string, AnalyzerView> analyzers(const store::ScanReport& r) {
    std::map<std::string, AnalyzerView> out;
    if (r.builtin_ran) out[std::string(kBuiltin)] = {true, &r.builtin_findings};
    for (const auto& [name, tr] : r.tool_results) out[name] = {tr.status == adapters::ToolStatus::ok, &tr.findings};
    return out;
}

std::size_t code_size(const store::Store& st, const store::StoredContract& latest, std::uint64_t seq) {
    if (seq == latest.seq) return latest.contract.bytecode.size();
    auto sel = store::Selection::seq_range(seq, seq);
    sel.all_versions = true;
    auto cur = st.select(sel);
    if (auto c = cur.next()) return c->contract.bytecode.size();
    return latest.contract.bytecode.size();
}

AgreementMatrix agreement_over(const std::vector<std::string>& names,
                               const std::map<std::string, std::set<std::string>>& flagged) {
    AgreementMatrix m;
    static const std::set<std::string> none;
    const auto set_of = [&](const std::string& n) -> const std::set<std::string>& {
        auto it = flagged.find(n);
        return it == flagged.end() ? none : it->second;
    };
    for (const auto& a : names) {
        for (const auto& b : names) {
            const auto& sa = set_of(a);
            const auto& sb = set_of(b);
            std::size_t inter = 0;
            for (const auto& id : sa) inter += sb.count(id);
            const std::size_t uni = sa.size() + sb.size() - inter;
            m[a][b] = uni == 0 ? std::nullopt : std::optional<double>(jaccard(inter, uni));
        }
    }
    return m;
}

Json ratio_json(const Ratio& r) {
    const auto p = r.pct();
    return Json{{"count", r.count}, {"of", r.of}, {"pct", p ? Json(*p) : Json(nullptr)}};
}

Json matrix_json(const AgreementMatrix& m) {
    Json j = Json::object();
    for (const auto& [a, row] : m)
        for (const auto& [b, v] : row) j[a][b] = v ? Json(*v) : Json(nullptr);
    return j;
}

std::string pct_text(const Ratio& r) {
    const auto p = r.pct();
    if (!p) return "no data";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f%% (%zu/%zu)", *p, r.count, r.of);
    return buf;
}

std::string num_text(const std::optional<double>& v) {
    if (!v) return "no data";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

}  // namespace

const GroupMap& default_groups() {
    static const GroupMap g{
        {"arithmetic", {VulnClass::TypeConversion, VulnClass::StackSize}},
        {"transaction",
         {VulnClass::Reentrancy, VulnClass::ExceptionDisorder, VulnClass::CallsToUnknown, VulnClass::UnpredictableState,
          VulnClass::RandomNumbers, VulnClass::TimeRestrictions, VulnClass::LossOfEther, VulnClass::UncheckedCall}},
        {"access_visibility", {VulnClass::Secrets, VulnClass::TxOriginAuth}},
    };
    return g;
}

bool counts_as_vulnerable(const Finding& f) { return f.severity >= Severity::low; }

double jaccard(std::size_t intersection, std::size_t union_size) {
    return static_cast<double>(intersection) / static_cast<double>(union_size);
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 3) return std::nullopt;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0 || syy == 0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

StatsSummary compute_stats(const store::Store& st, const store::Selection& scope, const StatsOptions& options) {
    auto sel = scope;
    sel.all_versions = false;

    StatsSummary s;
    std::set<std::string> seen_analyzers;
    std::map<std::string, std::set<std::string>> flagged;  // analyzer -> contract ids
    std::map<std::string, std::size_t> ok_count;
    std::map<VulnClass, std::size_t> class_count;
    std::map<std::string, std::size_t> group_count;
    std::size_t selfdestruct = 0, delegatecall = 0, outdated = 0, with_source = 0;
    std::vector<double> sizes, counts;

    auto cur = st.select(sel);
    while (auto c = cur.next()) {
        ++s.contracts_in_scope;
        const auto report = st.latest_report(c->id);
        if (!report) continue;
        ++s.total_contracts;
        if (c->contract.source_available()) ++with_source;

        std::set<VulnClass> classes;
        std::size_t vulnerable_findings = 0;
        bool sd = false, dc = false, oc = false;
        for (const auto& [name, view] : analyzers(*report)) {
            seen_analyzers.insert(name);
            if (view.ok) ++ok_count[name];
            bool flags = false;
            for (const auto& f : *view.findings) {
                s.classes_per_tool[name].insert(f.vuln_class);
                if (counts_for_class(f)) classes.insert(f.vuln_class);
                if (counts_as_vulnerable(f)) {
                    flags = true;
                    ++vulnerable_findings;
                }
                sd |= f.vuln_class == VulnClass::SelfDestructUse;
                dc |= f.vuln_class == VulnClass::DelegateCallUse;
                oc |= f.vuln_class == VulnClass::OutdatedCompiler && counts_as_vulnerable(f);
            }
            if (flags) flagged[name].insert(c->id);
        }
        for (auto vc : classes) ++class_count[vc];
        for (const auto& [group, members] : options.groups) {
            for (auto vc : members) {
                if (classes.count(vc) && !usage_class(vc)) {
                    ++group_count[group];
                    break;
                }
            }
        }
        selfdestruct += sd;
        delegatecall += dc;
        outdated += oc;
        sizes.push_back(static_cast<double>(code_size(st, *c, report->contract_seq)));
        counts.push_back(static_cast<double>(vulnerable_findings));
    }

    const std::size_t n = s.total_contracts;
    for (auto vc : kAllVulnClasses) s.pct_by_vuln_class[vc] = {class_count[vc], n};
    s.pct_selfdestruct = {selfdestruct, n};
    s.pct_delegatecall = {delegatecall, n};
    s.pct_outdated_compiler = {outdated, n};
    s.pct_with_source = {with_source, n};
    for (const auto& [group, members] : options.groups) s.groups[group] = {group_count[group], n};
    for (const auto& name : seen_analyzers) s.per_tool_execution_pct[name] = {ok_count[name], n};

    const std::vector<std::string> names(seen_analyzers.begin(), seen_analyzers.end());
    s.agreement = agreement_over(names, flagged);

    std::map<std::string, adapters::LevelSet> levels;
    for (const auto& d : options.descriptors) levels[d.name] = d.level;
    levels[std::string(kBuiltin)] = adapters::LevelSet{true, false};
    for (auto level : {adapters::Level::bytecode, adapters::Level::solidity}) {
        std::vector<std::string> part;
        for (const auto& name : names) {
            auto it = levels.find(name);
            if (it != levels.end() && it->second.has(level)) part.push_back(name);
        }
        if (!part.empty()) s.agreement_by_level[std::string(adapters::to_string(level))] = agreement_over(part, flagged);
    }

    s.size_vs_findings = pearson(sizes, counts);
    return s;
}

void to_json(Json& j, const StatsSummary& s) {
    Json classes = Json::object();
    for (const auto& [vc, r] : s.pct_by_vuln_class) classes[std::string(to_string(vc))] = ratio_json(r);
    Json groups = Json::object();
    for (const auto& [g, r] : s.groups) groups[g] = ratio_json(r);
    Json exec = Json::object();
    for (const auto& [t, r] : s.per_tool_execution_pct) exec[t] = ratio_json(r);
    Json by_level = Json::object();
    for (const auto& [l, m] : s.agreement_by_level) by_level[l] = matrix_json(m);
    Json per_tool = Json::object();
    for (const auto& [t, set] : s.classes_per_tool) {
        Json arr = Json::array();
        for (auto vc : set) arr.push_back(std::string(to_string(vc)));
        per_tool[t] = arr;
    }
    j = Json{{"contracts_in_scope", s.contracts_in_scope},
             {"total_contracts", s.total_contracts},
             {"pct_by_vuln_class", classes},
             {"pct_selfdestruct", ratio_json(s.pct_selfdestruct)},
             {"pct_delegatecall", ratio_json(s.pct_delegatecall)},
             {"pct_outdated_compiler", ratio_json(s.pct_outdated_compiler)},
             {"pct_with_source", ratio_json(s.pct_with_source)},
             {"groups", groups},
             {"per_tool_execution_pct", exec},
             {"agreement", matrix_json(s.agreement)},
             {"agreement_by_level", by_level},
             {"size_vs_findings", s.size_vs_findings ? Json(*s.size_vs_findings) : Json(nullptr)},
             {"classes_per_tool", per_tool}};
}

std::string render_table(const StatsSummary& s) {
    std::vector<std::pair<std::string, std::string>> rows;
    rows.emplace_back("contracts in scope", std::to_string(s.contracts_in_scope));
    rows.emplace_back("contracts with a report", std::to_string(s.total_contracts));
    rows.emplace_back("selfdestruct", pct_text(s.pct_selfdestruct));
    rows.emplace_back("delegatecall", pct_text(s.pct_delegatecall));
    rows.emplace_back("outdated compiler", pct_text(s.pct_outdated_compiler));
    rows.emplace_back("with source", pct_text(s.pct_with_source));
    for (const auto& [g, r] : s.groups) rows.emplace_back("group " + g, pct_text(r));
    for (const auto& [vc, r] : s.pct_by_vuln_class) rows.emplace_back("class " + std::string(to_string(vc)), pct_text(r));
    for (const auto& [t, r] : s.per_tool_execution_pct) rows.emplace_back("executed " + t, pct_text(r));
    for (const auto& [a, row] : s.agreement)
        for (const auto& [b, v] : row)
            if (a < b) rows.emplace_back("agreement " + a + " / " + b, num_text(v));
    rows.emplace_back("size vs findings (pearson)", num_text(s.size_vs_findings));
    for (const auto& [t, set] : s.classes_per_tool) {
        std::string list;
        for (auto vc : set) list += (list.empty() ? "" : ",") + std::string(to_string(vc));
        rows.emplace_back("classes " + t, list);
    }

    std::size_t width = 0;
    for (const auto& r : rows) width = std::max(width, r.first.size());
    std::ostringstream out;
    for (const auto& [k, v] : rows) out << std::left << std::setw(static_cast<int>(width)) << k << "  " << v << '\n';
    return out.str();
}

std::vector<TimelineEntry> findings_over_time(const store::Store& st, const std::string& contract_id) {
    if (!st.latest(contract_id)) throw UnknownContract("no stored contract with id " + contract_id);
    std::vector<TimelineEntry> out;
    for (const auto& r : st.get_reports(contract_id)) {
        TimelineEntry e;
        e.started_at = r.started_at;
        e.registry_version = r.registry_version;
        e.contract_seq = r.contract_seq;
        for (const auto& [name, view] : analyzers(r))
            for (const auto& f : *view.findings) ++e.counts[f.vuln_class];
        out.push_back(std::move(e));
    }
    return out;
}

void to_json(Json& j, const TimelineEntry& e) {
    Json counts = Json::object();
    for (const auto& [vc, n] : e.counts) counts[std::string(to_string(vc))] = n;
    j = Json{{"started_at", format_iso8601(e.started_at)},
             {"registry_version", e.registry_version},
             {"contract_seq", e.contract_seq},
             {"counts", counts}};
}

}  // namespace vigil::stats
