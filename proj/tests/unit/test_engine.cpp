#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "doctest.h"
#include "support/tempdir.hpp"
#include "vigil/core/errors.hpp"
#include "vigil/engine/engine.hpp"

using namespace vigil;
using namespace vigil::engine;
using adapters::MockExecutor;
using adapters::ToolDescriptor;
using adapters::ToolStatus;
using testutil::TempDir;

namespace {

ToolDescriptor tool(std::string name, bool bytecode = true, bool solidity = false) {
    ToolDescriptor d;
    d.name = std::move(name);
    d.level = {bytecode, solidity};
    d.command_template = {"run", "{input_file}"};
    d.timeout = Seconds{5};
    d.parser = adapters::ParserKind::line_findings;
    return d;
}

Contract random_contract(std::mt19937_64& rng, std::size_t max_len = 64) {
    Contract c;
    Address::Storage raw{};
    for (auto& b : raw) b = static_cast<std::uint8_t>(rng());
    c.address = Address(raw);
    c.bytecode.resize(1 + rng() % max_len);
    for (auto& b : c.bytecode) b = static_cast<std::uint8_t>(rng());
    c.origin = Origin::rpc;
    return c;
}

std::vector<store::StoredContract> fill(store::Store& st, std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::vector<store::StoredContract> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(st.put_contract(random_contract(rng)));
    return out;
}

// Report content minus wall-clock fields.
std::string stable(store::ScanReport r) {
    r.started_at = {};
    r.builtin_time_elapsed = 0;
    for (auto& [name, tr] : r.tool_results) tr.time_elapsed = 0;
    return canonical_dump(Json(r));
}

std::multiset<std::string> persisted(const store::Store& st) {
    std::multiset<std::string> out;
    auto cur = st.select(store::Selection::everything());
    while (auto c = cur.next())
        for (const auto& r : st.get_reports(c->id)) out.insert(stable(r));
    return out;
}

ScanPlan plan_of(std::vector<ToolDescriptor> tools, bool builtin, std::size_t par, std::filesystem::path inputs) {
    ScanPlan p;
    p.tools = std::move(tools);
    p.run_builtin = builtin;
    p.parallelism = par;
    p.inputs_dir = std::move(inputs);
    return p;
}

// Deterministic tool output derived from the input file name.
MockExecutor::Script scripted(const std::vector<std::string>& argv) {
    const auto name = std::filesystem::path(argv.back()).filename().string();
    const auto h = std::hash<std::string>{}(name);
    MockExecutor::Script s;
    s.stdout_text = "Reentrancy:0:from " + name + "\n";
    s.exit_code = static_cast<int>(h % 5 == 0);
    return s;
}

class FailingStore final : public store::Store {
public:
    explicit FailingStore(store::Store& inner) : inner_(inner) {}
    store::StoredContract put_contract(const Contract& c) override { return inner_.put_contract(c); }
    std::optional<store::StoredContract> latest(const std::string& id) const override { return inner_.latest(id); }
    store::ContractCursor select(const store::Selection& s) const override { return inner_.select(s); }
    std::size_t contract_records() const override { return inner_.contract_records(); }
    void put_report(const store::ScanReport&) override { throw StorageFailure("disk full"); }
    std::vector<store::ScanReport> get_reports(const std::string& id) const override { return inner_.get_reports(id); }
    std::optional<store::ScanReport> latest_report(const std::string& id) const override {
        return inner_.latest_report(id);
    }
    std::size_t report_records() const override { return inner_.report_records(); }

private:
    store::Store& inner_;
};

}  // namespace

TEST_CASE("scan plans") {
    const std::vector<ToolDescriptor> descs = {tool("alpha"), tool("beta"), [] {
                                                   auto d = tool("gamma");
                                                   d.enabled = false;
                                                   return d;
                                               }()};
    auto p = build_scan_plan(store::Selection::everything(), {"builtin"}, descs, {});
    CHECK(p.run_builtin);
    CHECK(p.tools.empty());
    CHECK(p.parallelism == 4);

    CHECK_THROWS_AS(build_scan_plan(store::Selection::everything(), {"oyente2"}, descs, {}), UnknownTool);
    CHECK_THROWS_AS(build_scan_plan(store::Selection::everything(), {}, descs, {}), EmptyPlan);
    CHECK_THROWS_AS(build_scan_plan(store::Selection::everything(), {"gamma"}, descs, {}), EmptyPlan);
    CHECK_THROWS_AS(build_scan_plan(store::Selection::seq_range(4, 2), {"builtin"}, descs, {}), InvalidRange);
    CHECK_THROWS_AS(build_scan_plan(store::Selection::everything(), {"builtin"}, descs, {0, {}}), ConfigError);

    p = build_scan_plan(store::Selection::seq_range(1, 10), {"alpha", "builtin", "gamma", "beta", "alpha"}, descs, {});
    CHECK(p.tools.size() == 2);
    CHECK(p.analyzers_per_contract() == 3);
    REQUIRE(p.notices.size() == 1);
    CHECK(p.notices[0].find("gamma") != std::string::npos);
}

TEST_CASE("2 contracts x 3 tools, all ok") {
    TempDir dir;
    store::FileStore st(dir / "data");
    fill(st, 1, 2);
    MockExecutor mock(MockExecutor::Script{"fine", "", 0, Seconds{0}});
    const auto plan = plan_of({tool("a"), tool("b"), tool("c")}, false, 2, dir / "inputs");
    const auto s = run_scan(plan, mock, st, detect::DetectorRegistry::defaults());
    CHECK(s.contracts_scanned == 2);
    CHECK(s.records_produced == 6);
    CHECK(s.per_status.ok == 6);
    CHECK(s.errors.empty());
    CHECK(mock.calls() == 6);
    CHECK(st.report_records() == 2);
}

TEST_CASE("solidity-only tool against bytecode-only contract") {
    TempDir dir;
    store::FileStore st(dir / "data");
    const auto c = fill(st, 2, 1)[0];
    MockExecutor mock;
    const auto s = run_scan(plan_of({tool("madmax", false, true)}, false, 1, dir / "inputs"), mock, st,
                            detect::DetectorRegistry::defaults());
    CHECK(s.records_produced == 1);
    CHECK(s.per_status.skipped == 1);
    CHECK(mock.calls() == 0);
    const auto r = st.latest_report(c.id);
    REQUIRE(r);
    const Json j = r->tool_results.at("madmax");
    CHECK(j["output"] == "Contract extension doesn't allow this analysis");
    CHECK(j["time_elapsed"] == 0);
}

TEST_CASE("1000 random contracts, builtin only") {
    TempDir dir;
    store::FileStore st(dir / "data");
    fill(st, 3, 1000);
    MockExecutor unused;
    std::ostringstream log;
    const auto s = run_scan(plan_of({}, true, 4, {}), unused, st, detect::DetectorRegistry::defaults(), {&log, nullptr});
    CHECK(s.errors.empty());
    CHECK(s.records_produced == 1000);
    CHECK(s.contracts_scanned == 1000);
    CHECK_FALSE(s.partial);

    // One progress line per 10%.
    const std::regex line(R"(^\d{4}-\d\d-\d\dT\d\d:\d\d:\d\d\.\d{6}Z - (\d+) items processed\. Progress is (\d+)%\.$)");
    std::istringstream in(log.str());
    std::string l;
    int k = 0;
    while (std::getline(in, l)) {
        std::smatch m;
        REQUIRE(std::regex_match(l, m, line));
        ++k;
        CHECK(std::stoi(m[2]) == 10 * k);
        CHECK(std::stoul(m[1]) >= 100u * k);
    }
    CHECK(k == 10);
}

TEST_CASE("record-count law and parallel determinism") {
    std::mt19937 rng(17);
    for (int round = 0; round < 12; ++round) {
        const std::size_t n = rng() % 6;
        std::vector<ToolDescriptor> tools;
        const int nt = static_cast<int>(rng() % 4);
        for (int t = 0; t < nt; ++t) tools.push_back(tool("t" + std::to_string(t), rng() % 2 == 0, rng() % 2 == 0));
        for (auto& t : tools)
            if (t.level.empty()) t.level.bytecode = true;
        const bool builtin = nt == 0 || rng() % 2;
        std::optional<std::multiset<std::string>> reference;
        for (std::size_t par : {1, 2, 8}) {
            TempDir dir;
            store::FileStore st(dir / "data");
            fill(st, 100 + round, n);
            MockExecutor mock(scripted);
            const auto s = run_scan(plan_of(tools, builtin, par, dir / "in"), mock, st,
                                    detect::DetectorRegistry::defaults());
            CHECK(s.records_produced == n * (tools.size() + (builtin ? 1 : 0)));
            CHECK(s.records_produced == s.per_status.total());
            const auto got = persisted(st);
            if (reference) CHECK(got == *reference);
            else reference = got;
        }
    }
}

TEST_CASE("a failing analyzer on one contract leaves the others alone") {
    const auto run = [](bool poison) {
        TempDir dir;
        store::FileStore st(dir / "data");
        const auto cs = fill(st, 9, 5);
        const auto victim = cs[2].id;
        MockExecutor mock([&](const std::vector<std::string>& argv) {
            auto s = scripted(argv);
            if (poison && argv.back().find(victim) != std::string::npos) s.delay = Seconds{100};
            return s;
        });
        auto t = tool("t");
        t.timeout = Seconds{0.05};
        run_scan(plan_of({t, tool("u")}, true, 3, dir / "in"), mock, st, detect::DetectorRegistry::defaults());
        std::map<std::string, std::string> out;
        for (const auto& c : cs) out[c.id] = stable(*st.latest_report(c.id));
        return std::pair(out, victim);
    };
    auto [clean, victim] = run(false);
    auto [poisoned, victim2] = run(true);
    CHECK(victim == victim2);
    for (const auto& [id, doc] : clean) {
        if (id == victim) CHECK(poisoned[id] != doc);
        else CHECK(poisoned[id] == doc);
    }
    CHECK(Json::parse(poisoned[victim])["tool_results"]["t"]["status"] == "timeout");
}

TEST_CASE("tool locations outside the instruction grid are cleared") {
    TempDir dir;
    store::FileStore st(dir / "data");
    Contract c;
    c.bytecode = decode_hex("0x6001600255");  // instructions at 0, 2, 4
    const auto sc = st.put_contract(c);
    MockExecutor mock(MockExecutor::Script{"reentrancy:2:ok\nreentrancy:3:inside push data\n", "", 0, Seconds{0}});
    run_scan(plan_of({tool("t")}, false, 1, dir / "in"), mock, st, detect::DetectorRegistry::defaults());
    const auto r = st.latest_report(sc.id)->tool_results.at("t");
    REQUIRE(r.findings.size() == 2);
    CHECK(r.findings[0].location == 2u);
    CHECK_FALSE(r.findings[1].location);
    CHECK_FALSE(r.notes.empty());
}

TEST_CASE("storage failure is fatal") {
    TempDir dir;
    store::FileStore inner(dir / "data");
    fill(inner, 4, 3);
    FailingStore st(inner);
    MockExecutor mock;
    CHECK_THROWS_AS(run_scan(plan_of({}, true, 2, {}), mock, st, detect::DetectorRegistry::defaults()), StorageFailure);
}

TEST_CASE("cancellation persists only finished contracts") {
    TempDir dir;
    store::FileStore st(dir / "data");
    fill(st, 5, 40);
    std::atomic<bool> cancel{false};
    std::atomic<int> calls{0};
    MockExecutor mock([&](const std::vector<std::string>& argv) {
        if (++calls == 10) cancel = true;
        return scripted(argv);
    });
    const auto s = run_scan(plan_of({tool("a"), tool("b")}, true, 2, dir / "in"), mock, st,
                            detect::DetectorRegistry::defaults(), {nullptr, &cancel});
    CHECK(s.partial);
    CHECK(s.contracts_scanned < 40);
    CHECK(st.report_records() == s.contracts_scanned);
    CHECK(s.records_produced == 3 * s.contracts_scanned);
    auto cur = st.select(store::Selection::everything());
    while (auto c = cur.next())
        if (const auto r = st.latest_report(c->id)) CHECK(r->tool_results.size() == 2);
}

TEST_CASE("monitor rescans exactly the stale contracts") {
    TempDir dir;
    store::FileStore st(dir / "data");
    auto registry = detect::DetectorRegistry::defaults();
    MockExecutor mock;
    const auto plan = plan_of({}, true, 2, {});

    // CALL then SSTORE: reentrancy. TIMESTAMP alone: time dependence (info).
    Contract a;
    a.bytecode = decode_hex("0x600060006000600060006000f1600055");
    Contract b;
    b.bytecode = decode_hex("0x4250");
    const auto sa = st.put_contract(a);
    const auto sb = st.put_contract(b);

    auto m = monitor_rescan(st, registry, mock, plan);
    CHECK(m.summary.contracts_scanned == 2);  // no prior report
    for (const auto& d : m.diffs) {
        CHECK_FALSE(d.had_baseline);
        CHECK(d.removed.empty());
    }

    m = monitor_rescan(st, registry, mock, plan);
    CHECK(m.summary.contracts_scanned == 0);
    CHECK(m.diffs.empty());

    // Turning a detector off bumps the version; every contract goes stale.
    registry.set_enabled(detect::ids::reentrancy, false);
    CHECK(stale_contracts(st, registry).size() == 2);
    m = monitor_rescan(st, registry, mock, plan);
    CHECK(m.summary.contracts_scanned == 2);
    REQUIRE(m.diffs.size() == 2);
    const auto& da = m.diffs[0].contract_id == sa.id ? m.diffs[0] : m.diffs[1];
    const auto& db = m.diffs[0].contract_id == sb.id ? m.diffs[0] : m.diffs[1];
    CHECK(da.had_baseline);
    CHECK(da.added.empty());
    REQUIRE(da.removed.size() == 1);
    CHECK(da.removed[0].finding.vuln_class == VulnClass::Reentrancy);
    CHECK(da.removed[0].source == "builtin");
    CHECK(db.added.empty());
    CHECK(db.removed.empty());
    CHECK(st.get_reports(sa.id).size() == 2);

    // A third contract with no report is the only stale one now.
    Contract c;
    c.bytecode = decode_hex("0x00");
    st.put_contract(c);
    CHECK(stale_contracts(st, registry).size() == 1);
}
