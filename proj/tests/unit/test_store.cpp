#include <random>

#include "doctest.h"
#include "support/tempdir.hpp"
#include "vigil/core/errors.hpp"
#include "vigil/store/store.hpp"

using namespace vigil;
using namespace vigil::store;
using testutil::TempDir;

namespace {

Contract at(unsigned n, Bytes code, std::optional<std::uint64_t> block = std::nullopt) {
    Contract c;
    Address::Storage raw{};
    raw[18] = static_cast<std::uint8_t>(n >> 8);
    raw[19] = static_cast<std::uint8_t>(n);
    c.address = Address(raw);
    c.bytecode = std::move(code);
    c.block_number = block;
    c.origin = Origin::rpc;
    return c;
}

ScanReport report_for(const StoredContract& s, std::int64_t t, std::int64_t version) {
    ScanReport r;
    r.contract_id = s.id;
    r.contract_seq = s.seq;
    r.started_at = from_unix_seconds(t) + std::chrono::microseconds(123457);
    r.registry_version = version;
    r.builtin_ran = true;
    r.builtin_time_elapsed = 0.000123456789;
    r.builtin_findings = {Finding{VulnClass::Reentrancy, Severity::high, "reentrancy", 12, "call before store"}};
    adapters::ToolResult tr;
    tr.tool = "madmax";
    tr.status = adapters::ToolStatus::skipped;
    tr.output = "Contract extension doesn't allow this analysis";
    tr.skip_reason = tr.output;
    r.tool_results["madmax"] = tr;
    tr = {};
    tr.tool = "mythril";
    tr.output = "ok \xe2\x9c\x93";
    tr.time_elapsed = 0.0227155660001645;
    r.tool_results["mythril"] = tr;
    return r;
}

std::vector<StoredContract> drain(ContractCursor cur) {
    std::vector<StoredContract> out;
    while (auto c = cur.next()) out.push_back(*c);
    return out;
}

}  // namespace

TEST_CASE("put is idempotent and seq is dense") {
    TempDir dir;
    FileStore st(dir.path());
    const auto a = st.put_contract(at(1, {0x60, 0x00}));
    const auto b = st.put_contract(at(1, {0x60, 0x00}));
    CHECK(a.seq == 1);
    CHECK(b == a);
    CHECK(st.contract_records() == 1);
    for (unsigned i = 2; i <= 10; ++i) CHECK(st.put_contract(at(i, {0x00})).seq == i);
    CHECK(st.contract_records() == 10);
    CHECK_THROWS_AS(st.put_contract(Contract{}), InvalidContract);
}

TEST_CASE("code change appends a version") {
    TempDir dir;
    FileStore st(dir.path());
    const auto v1 = st.put_contract(at(7, {0x01}));
    st.put_contract(at(8, {0x02}));
    const auto v2 = st.put_contract(at(7, {0x03}));
    CHECK(v2.id == v1.id);
    CHECK(v2.version == 2);
    CHECK(v2.seq == 3);
    CHECK(st.latest(v1.id)->contract.bytecode == Bytes{0x03});

    auto sel = Selection::of(*v1.contract.address);
    auto got = drain(st.select(sel));
    REQUIRE(got.size() == 1);
    CHECK(got[0].version == 2);
    sel.all_versions = true;
    got = drain(st.select(sel));
    REQUIRE(got.size() == 2);
    CHECK(got[0].contract.bytecode == Bytes{0x01});
    CHECK(got[1].contract.bytecode == Bytes{0x03});
    CHECK(drain(st.select(Selection::everything())).size() == 2);
}

TEST_CASE("select ranges") {
    TempDir dir;
    FileStore st(dir.path());
    CHECK(st.select(Selection::everything()).size() == 0);
    CHECK_FALSE(st.select(Selection::everything()).next());
    for (unsigned i = 1; i <= 10; ++i) st.put_contract(at(i, {static_cast<std::uint8_t>(i)}, 100 + i));
    const auto got = drain(st.select(Selection::seq_range(3, 5)));
    REQUIRE(got.size() == 3);
    CHECK(got[0].seq == 3);
    CHECK(got[2].seq == 5);
    CHECK(drain(st.select(Selection::block_range(109, 500))).size() == 2);
    CHECK_THROWS_AS(st.select(Selection::seq_range(5, 3)), InvalidRange);
    CHECK(parse_range("3..5") == std::pair<std::uint64_t, std::uint64_t>{3, 5});
    CHECK(parse_range("7") == std::pair<std::uint64_t, std::uint64_t>{7, 7});
    CHECK_THROWS_AS(parse_range("5..3"), InvalidRange);
    CHECK_THROWS_AS(parse_range("a..b"), InvalidRange);
}

TEST_CASE("select respects bounds on random stores") {
    std::mt19937 rng(11);
    for (int round = 0; round < 20; ++round) {
        TempDir dir;
        FileStore st(dir.path());
        const unsigned n = 1 + rng() % 30;
        for (unsigned i = 0; i < n; ++i)
            st.put_contract(at(rng() % 12, {static_cast<std::uint8_t>(rng())}, rng() % 50));
        for (int q = 0; q < 20; ++q) {
            std::uint64_t a = rng() % 40, b = rng() % 40;
            if (a > b) std::swap(a, b);
            for (auto sel : {Selection::seq_range(a, b), Selection::block_range(a, b)}) {
                for (bool all : {false, true}) {
                    sel.all_versions = all;
                    std::uint64_t prev = 0;
                    for (const auto& c : drain(st.select(sel))) {
                        CHECK(sel.matches(c));
                        CHECK(c.seq > prev);
                        prev = c.seq;
                        if (!all) CHECK(st.latest(c.id)->seq == c.seq);
                    }
                }
            }
        }
    }
}

TEST_CASE("reports round trip and stay append-only") {
    TempDir dir;
    StoredContract s;
    ScanReport r1, r2;
    {
        FileStore st(dir.path());
        s = st.put_contract(at(1, {0x60, 0x00}));
        r1 = report_for(s, 1'600'000'000, 1);
        r2 = report_for(s, 1'500'000'000, 2);  // older stamp, later append
        st.put_report(r1);
        st.put_report(r2);
        auto bogus = r1;
        bogus.contract_id = "0xdeadbeef";
        CHECK_THROWS_AS(st.put_report(bogus), UnknownContract);
        CHECK(st.report_records() == 2);
    }
    FileStore st(dir.path());
    const auto got = st.get_reports(s.id);
    REQUIRE(got.size() == 2);
    CHECK(got[0] == r2);
    CHECK(got[1] == r1);
    CHECK(Json(got[1]).dump() == Json(r1).dump());
    CHECK(st.latest_report(s.id) == r1);
    CHECK(st.latest(s.id) == s);
    CHECK(st.get_reports("nobody").empty());
    for (const auto& [name, tr] : Json(r1)["tool_results"].items()) {
        CHECK(tr.contains("output"));
        CHECK(tr.contains("time_elapsed"));
    }
}

TEST_CASE("torn tails are dropped on reopen") {
    TempDir dir;
    std::vector<ScanReport> written;
    {
        FileStore st(dir.path());
        for (unsigned i = 1; i <= 5; ++i) {
            const auto s = st.put_contract(at(i, {0x00, static_cast<std::uint8_t>(i)}));
            written.push_back(report_for(s, 1'600'000'000 + i, 1));
            st.put_report(written.back());
        }
    }
    const auto reports = dir / "reports.ndjson";
    const auto full = testutil::read_file(reports);
    std::vector<std::size_t> ends;
    for (std::size_t i = 0; i < full.size(); ++i)
        if (full[i] == '\n') ends.push_back(i + 1);

    std::mt19937 rng(5);
    for (int k = 0; k < 30; ++k) {
        const std::size_t cut = rng() % (full.size() + 1);
        testutil::write_file(reports, full.substr(0, cut));
        const auto complete = static_cast<std::size_t>(std::count_if(ends.begin(), ends.end(), [&](auto e) { return e <= cut; }));
        FileStore st(dir.path());
        CHECK(st.report_records() == complete);
        for (std::size_t i = 0; i < complete; ++i) CHECK(st.latest_report(written[i].contract_id) == written[i]);
        CHECK(std::filesystem::file_size(reports) == (complete ? ends[complete - 1] : 0));
        // The store keeps working after recovery.
        st.put_report(written[0]);
        CHECK(st.report_records() == complete + 1);
    }

    // A torn contract record loses only that contract.
    const auto contracts = dir / "contracts.ndjson";
    auto ctext = testutil::read_file(contracts);
    testutil::write_file(contracts, ctext.substr(0, ctext.size() - 3));
    testutil::write_file(reports, "");
    FileStore st(dir.path());
    CHECK(st.contract_records() == 4);
    CHECK(st.recovered_contract_bytes() > 0);
    CHECK(st.put_contract(at(5, {0x00, 5})).seq == 5);
}

TEST_CASE("corrupt complete records are fatal") {
    TempDir dir;
    { FileStore st(dir.path()); st.put_contract(at(1, {0x00})); }
    testutil::write_file(dir / "reports.ndjson", "{oops\n");
    CHECK_THROWS_AS(FileStore(dir.path()), StorageFailure);
}

TEST_CASE("cursors stream while the store grows") {
    TempDir dir;
    FileStore st(dir.path());
    for (unsigned i = 1; i <= 5; ++i) st.put_contract(at(i, {0x00}));
    auto cur = st.select(Selection::everything());
    for (unsigned i = 6; i <= 8; ++i) st.put_contract(at(i, {0x00}));
    CHECK(drain(std::move(cur)).size() == 5);  // the prefix seen at select time
}
