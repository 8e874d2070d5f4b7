#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "support/stats_fixture.hpp"
#include "support/stub_server.hpp"
#include "support/tempdir.hpp"
#include "vigil/cli/cli.hpp"
#include "vigil/core/errors.hpp"
#include "vigil/ingest/csv.hpp"

using namespace vigil;
using testutil::StubServer;
using testutil::TempDir;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args) {
    ::unsetenv("VIGIL_RPC_ENDPOINT");
    ::unsetenv("VIGIL_EXPLORER_KEY");
    std::ostringstream out, err;
    Run r;
    r.code = cli::run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        if (!l.empty()) out.push_back(l);
    return out;
}

// A real subprocess tool: reports one reentrancy finding at offset 0.
void write_echo_tool(const std::filesystem::path& dir, const std::string& name, const std::string& levels) {
    testutil::write_file(dir / (name + ".json"), R"({"name": ")" + name + R"(", "level": )" + levels + R"j(,
        "image": "none", "parser": "line_findings", "timeout": 10,
        "command_template": ["/bin/sh", "-c", "echo reentrancy:0:$(basename \"$0\")", "{input_file}"]})j");
}

std::string csv_batch(int rows, bool with_bad_row = false) {
    std::string s = "address,bytecode,block_number,block_timestamp\n";
    for (int i = 0; i < rows; ++i) {
        char addr[43];
        std::snprintf(addr, sizeof addr, "0x%040x", i + 1);
        s += std::string(addr) + ",0x6001600055" + std::to_string(10 + i % 80) + "," + std::to_string(1000 + i) +
             ",1559347200\n";
    }
    if (with_bad_row) s += "0x12,0x00,1,1559347200\n";
    return s;
}

std::string rpc_result(const std::string& code) {
    return R"({"jsonrpc":"2.0","id":1,"result":")" + code + R"("})";
}

}  // namespace

TEST_CASE("help exits 0 without touching the data directory") {
    TempDir dir;
    const auto data = (dir / "data").string();
    for (std::vector<std::string> args :
         {std::vector<std::string>{"--help"}, {"scan-file", "--help"}, {"scan-address", "--help"}, {"import", "--help"},
          {"scan-range", "--help"}, {"tools", "list", "--help"}, {"stats", "--help"}, {"monitor", "--help"},
          {"export", "--help"}, {"timeline", "--help"}}) {
        args.insert(args.begin(), {"--data-dir", data});
        const auto r = invoke(args);
        CHECK(r.code == 0);
        CHECK_FALSE(r.out.empty());
    }
    CHECK(invoke({"--help"}).out.find("address holds no code") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(dir / "data"));
    CHECK(invoke({"--data-dir", data, "frobnicate"}).code == cli::exit_code::invalid_input);
}

TEST_CASE("scan-file") {
    TempDir dir;
    const auto data = (dir / "data").string();
    testutil::write_file(dir / "a.hex", "0x600060006000600060006000f1600055\n");
    testutil::write_file(dir / "a.sol", "pragma solidity ^0.4.24;\ncontract A {}\n");
    testutil::write_file(dir / "b.hex", "0x00");
    testutil::write_file(dir / "a.txt", "hi");
    write_echo_tool(dir / "tools", "echo", R"(["bytecode", "solidity"])");
    write_echo_tool(dir / "tools", "solonly", R"("solidity")");
    const std::vector<std::string> base{"--data-dir", data, "--tools-dir", (dir / "tools").string(),
                                        "--inputs-dir", (dir / "in").string()};
    const auto with = [&](std::vector<std::string> extra) {
        auto a = base;
        a.insert(a.end(), extra.begin(), extra.end());
        return invoke(a);
    };

    auto r = with({"scan-file", (dir / "b.hex").string()});
    CHECK(r.code == 0);
    auto docs = lines(r.out);
    REQUIRE(docs.size() == 1);
    auto rep = Json::parse(docs[0]);
    CHECK(rep["builtin_ran"] == true);
    CHECK(rep["tool_results"].empty());

    r = with({"scan-file", (dir / "a.txt").string()});
    CHECK(r.code == cli::exit_code::invalid_input);
    CHECK(r.err.find(".hex") != std::string::npos);
    CHECK(r.err.find(".sol") != std::string::npos);
    CHECK(with({"scan-file", (dir / "missing.hex").string()}).code == cli::exit_code::invalid_input);
    CHECK(with({"scan-file", (dir / "b.hex").string(), "--tools", "nosuchtool"}).code == cli::exit_code::tool_selection);
    CHECK(with({"scan-file", (dir / "b.hex").string(), "--tools", "builtin", "--no-builtin"}).code ==
          cli::exit_code::tool_selection);

    // Pairing: one contract carrying both inputs; dual-level tools run on the source.
    r = with({"scan-file", (dir / "a.hex").string(), (dir / "a.sol").string(), "--tools", "builtin,echo,solonly"});
    CHECK(r.code == 0);
    docs = lines(r.out);
    REQUIRE(docs.size() == 1);
    rep = Json::parse(docs[0]);
    CHECK(rep["tool_results"]["echo"]["status"] == "ok");
    CHECK(rep["tool_results"]["echo"]["output"].get<std::string>().find(".sol") != std::string::npos);
    CHECK(rep["tool_results"]["solonly"]["status"] == "ok");
    bool reentrancy = false, outdated = false;
    for (const auto& f : rep["builtin_findings"]) {
        reentrancy |= f["vuln_class"] == "reentrancy";
        outdated |= f["vuln_class"] == "outdated_compiler";
    }
    CHECK(reentrancy);
    CHECK(outdated);

    // Bytecode alone: the solidity-only tool is skipped with the fixed message.
    r = with({"scan-file", (dir / "b.hex").string(), "--tools", "solonly", "--out", (dir / "reports").string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir / "reports")) {
        ++files;
        const auto doc = Json::parse(testutil::read_file(e.path()));
        CHECK(doc["tool_results"]["solonly"]["output"] == "Contract extension doesn't allow this analysis");
    }
    CHECK(files == 1);
    CHECK_FALSE(std::filesystem::exists(dir / "data" / "contracts.ndjson"));  // ad-hoc scans are not stored
}

TEST_CASE("import, scan-range, export") {
    TempDir dir;
    const auto data = (dir / "data").string();
    testutil::write_file(dir / "batch.csv", csv_batch(12, true));
    auto r = invoke({"--data-dir", data, "import", (dir / "batch.csv").string()});
    CHECK(r.code == 0);
    auto doc = Json::parse(r.out);
    CHECK(doc["rows_accepted"] == 12);
    CHECK(doc["records_added"] == 12);
    REQUIRE(doc["rejected"].size() == 1);
    CHECK(doc["rejected"][0]["line"] == 14);
    CHECK(r.err.find("line 14") != std::string::npos);

    r = invoke({"--data-dir", data, "scan-range", "--all", "--tools", "builtin"});
    CHECK(r.code == 0);
    doc = Json::parse(r.out);
    CHECK(doc["records_produced"] == 12);
    CHECK(doc["contracts_scanned"] == 12);

    r = invoke({"--data-dir", data, "-j", "2", "scan-range", "--seq", "3..5"});
    CHECK(Json::parse(r.out)["records_produced"] == 3);
    CHECK(invoke({"--data-dir", data, "scan-range", "--seq", "5..3"}).code == cli::exit_code::invalid_input);
    CHECK(invoke({"--data-dir", data, "scan-range", "--seq", "1..2", "--all"}).code == cli::exit_code::invalid_input);

    r = invoke({"--data-dir", data, "export", "--out", (dir / "out.csv").string()});
    CHECK(r.code == 0);
    const auto exported = ingest::import_csv(dir / "out.csv");
    CHECK(exported.contracts.size() == 12);
    CHECK(exported.rejected.empty());
    const auto original = ingest::import_csv(dir / "batch.csv");
    CHECK(exported.contracts == original.contracts);

    testutil::write_file(dir / "noheader.csv", "");
    CHECK(invoke({"--data-dir", data, "import", (dir / "noheader.csv").string()}).code == cli::exit_code::invalid_input);
    CHECK(invoke({"--data-dir", data, "import", (dir / "absent.csv").string()}).code == cli::exit_code::invalid_input);
    CHECK(invoke({"--data-dir", data, "timeline", "0xnobody"}).code == cli::exit_code::invalid_input);
    const auto tl = invoke({"--data-dir", data, "timeline", "0x0000000000000000000000000000000000000003"});
    CHECK(tl.code == 0);
    CHECK(Json::parse(tl.out).size() == 2);
}

TEST_CASE("tools list") {
    TempDir dir;
    write_echo_tool(dir.path(), "one", R"("bytecode")");
    write_echo_tool(dir.path(), "two", R"("solidity")");
    write_echo_tool(dir.path(), "three", R"(["bytecode", "solidity"])");
    testutil::write_file(dir / "broken.json", "{");
    auto r = invoke({"--tools-dir", dir.path().string(), "tools", "list"});
    CHECK(r.code == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 4);  // header plus three tools
    CHECK(rows[1].rfind("one", 0) == 0);
    CHECK(rows[2].find("bytecode,solidity") != std::string::npos);
    CHECK(r.err.find("broken.json") != std::string::npos);

    r = invoke({"--tools-dir", dir.path().string(), "tools", "list", "--json"});
    CHECK(Json::parse(r.out).size() == 3);

    r = invoke({"tools", "list"});  // shipped inventory
    CHECK(lines(r.out).size() == 18);
}

TEST_CASE("scan-address") {
    TempDir dir;
    const auto data = (dir / "data").string();
    std::string reply;
    StubServer server([&](const httplib::Request&, httplib::Response& res) { res.set_content(reply, "application/json"); });
    const std::string addr = "0x00000000000000000000000000000000000000aa";

    reply = rpc_result("0x6000ff");
    auto r = invoke({"--data-dir", data, "--rpc", server.url(), "scan-address", addr});
    CHECK(r.code == 0);
    const auto rep = Json::parse(lines(r.out).at(0));
    CHECK(rep["contract_id"] == addr);
    {
        store::FileStore st(data);
        CHECK(st.report_records() == 1);
        CHECK(st.latest(addr)->contract.bytecode == Bytes{0x60, 0x00, 0xff});
    }

    reply = rpc_result("0x");
    r = invoke({"--data-dir", data, "--rpc", server.url(), "scan-address", addr});
    CHECK(r.code == cli::exit_code::not_a_contract);
    CHECK(r.err.find("address holds no code (user account)") != std::string::npos);

    CHECK(invoke({"--data-dir", data, "--rpc", server.url(), "scan-address", "0x12"}).code == cli::exit_code::invalid_input);
    CHECK(invoke({"--data-dir", data, "scan-address", addr}).code == cli::exit_code::config);

    reply = "<html>";
    CHECK(invoke({"--data-dir", data, "--rpc", server.url(), "scan-address", addr}).code == cli::exit_code::rpc);

    // Environment supplies the endpoint when no flag is given.
    reply = rpc_result("0x00");
    ::setenv("VIGIL_RPC_ENDPOINT", server.url().c_str(), 1);
    std::ostringstream out, err;
    CHECK(cli::run_cli({"--data-dir", data, "scan-address", addr}, out, err) == 0);
    ::unsetenv("VIGIL_RPC_ENDPOINT");
}

TEST_CASE("config file and precedence") {
    TempDir dir;
    testutil::write_file(dir / "batch.csv", csv_batch(3));
    testutil::write_file(dir / "cfg" / "vigil.json", R"({"data_dir": "store", "parallelism": 2,
        "detectors": {"pragma_floor": "0.5.0", "disabled": ["tx-origin"]}})");
    const auto cfg = (dir / "cfg" / "vigil.json").string();

    CHECK(invoke({"--config", cfg, "import", (dir / "batch.csv").string()}).code == 0);
    CHECK(std::filesystem::exists(dir / "cfg" / "store" / "contracts.ndjson"));  // relative to the file

    CHECK(invoke({"--config", cfg, "--data-dir", (dir / "flag").string(), "import", (dir / "batch.csv").string()}).code == 0);
    CHECK(std::filesystem::exists(dir / "flag" / "contracts.ndjson"));

    testutil::write_file(dir / "bad1.json", R"({"parallelism": 0})");
    testutil::write_file(dir / "bad2.json", R"({"colour": "blue"})");
    testutil::write_file(dir / "bad3.json", R"({"detectors": {"disabled": ["nope"]}})");
    testutil::write_file(dir / "bad4.json", "{");
    for (const char* f : {"bad1.json", "bad2.json", "bad3.json", "bad4.json", "absent.json"}) {
        const auto r = invoke({"--config", (dir / f).string(), "--data-dir", (dir / "x").string(), "stats"});
        CHECK_MESSAGE(r.code == cli::exit_code::config, f);
    }
    CHECK(invoke({"--data-dir", (dir / "x").string(), "-j", "0", "stats"}).code == cli::exit_code::config);

    const auto c = cli::load_config_file({}, cfg);
    CHECK(c.parallelism == 2);
    CHECK(c.detectors.pragma_floor == detect::Version{0, 5, 0});
    auto fin = c;
    fin.finalize();
    CHECK(fin.inputs_dir == fin.data_dir / "inputs");
    CHECK_FALSE(fin.registry().enabled("tx-origin"));
}

TEST_CASE("stats matches the library on the labeled fixture") {
    TempDir dir;
    const auto corpus = fixtures::labeled_corpus(1, 50);
    {
        store::FileStore st(dir / "data");
        fixtures::populate(st, corpus);
    }
    for (const auto& d : fixtures::corpus_descriptors())
        testutil::write_file(dir / "tools" / (d.name + ".json"), adapters::to_json(d).dump());

    const auto r = invoke({"--data-dir", (dir / "data").string(), "--tools-dir", (dir / "tools").string(), "stats", "--json"});
    CHECK(r.code == 0);
    store::FileStore st(dir / "data");
    const auto direct = stats::compute_stats(st, store::Selection::everything(),
                                             {stats::default_groups(), fixtures::corpus_descriptors()});
    CHECK(Json::parse(r.out) == Json(direct));
    std::string why;
    CHECK_MESSAGE(fixtures::same_stats(direct, fixtures::brute_force_stats(corpus), 1e-9, &why), why);

    const auto table = invoke({"--data-dir", (dir / "data").string(), "stats"});
    CHECK(table.out == stats::render_table(stats::compute_stats(st, store::Selection::everything(), {})));
}

TEST_CASE("monitor passes") {
    TempDir dir;
    const auto data = (dir / "data").string();
    testutil::write_file(dir / "batch.csv", csv_batch(4));
    invoke({"--data-dir", data, "import", (dir / "batch.csv").string()});
    auto r = invoke({"--data-dir", data, "monitor", "--iterations", "2", "--interval", "0"});
    CHECK(r.code == 0);
    const auto passes = lines(r.out);
    REQUIRE(passes.size() == 2);
    CHECK(Json::parse(passes[0])["summary"]["contracts_scanned"] == 4);
    CHECK(Json::parse(passes[1])["summary"]["contracts_scanned"] == 0);

    // Disabling a detector through config makes everything stale again.
    testutil::write_file(dir / "cfg.json", R"({"detectors": {"disabled": ["reentrancy"]}})");
    r = invoke({"--config", (dir / "cfg.json").string(), "--data-dir", data, "monitor", "--iterations", "1"});
    CHECK(Json::parse(lines(r.out).at(0))["summary"]["contracts_scanned"] == 4);
}

TEST_CASE("storage failure is never exit 0") {
    TempDir dir;
    testutil::write_file(dir / "data" / "reports.ndjson", "{garbage\n");
    for (std::vector<std::string> args : {std::vector<std::string>{"stats"}, {"scan-range", "--all"}, {"export"}}) {
        args.insert(args.begin(), {"--data-dir", (dir / "data").string()});
        CHECK(invoke(args).code == cli::exit_code::storage);
    }
}
