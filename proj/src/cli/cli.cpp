#include "vigil/cli/cli.hpp"

#include <array>
#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "vigil/core/errors.hpp"
#include "vigil/engine/engine.hpp"
#include "vigil/ingest/csv.hpp"
#include "vigil/ingest/inputs.hpp"
#include "vigil/ingest/rate_limiter.hpp"
#include "vigil/ingest/remote.hpp"

#ifndef VIGIL_DEFAULT_TOOLS_DIR
#define VIGIL_DEFAULT_TOOLS_DIR "descriptors"
#endif

namespace vigil::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kDefaultExplorer = "https://api.etherscan.io/api";

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

const char* kExitCodes =
    "Exit codes:\n"
    "  0  success (individual analyzer failures are recorded in reports)\n"
    "  1  internal error\n"
    "  2  invalid input: file, extension, address, range or CSV header\n"
    "  3  unknown tool or empty analyzer selection\n"
    "  4  address holds no code (user account)\n"
    "  5  RPC transport or protocol error\n"
    "  6  storage failure\n"
    "  7  configuration error";

fs::path absolute_from(const fs::path& p, const fs::path& base) {
    if (p.empty()) return p;
    return (p.is_absolute() ? p : base / p).lexically_normal();
}

template <typename T>
T get_field(const Json& doc, const char* key) {
    try {
        return doc.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
}

// Logs from the library go to the caller's error stream for the duration of one command.
class LogRedirect {
public:
    explicit LogRedirect(std::ostream& err) : previous_(spdlog::default_logger()) {
        auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
        auto logger = std::make_shared<spdlog::logger>("vigil", sink);
        logger->set_pattern("%Y-%m-%dT%H:%M:%S.%fZ %l: %v", spdlog::pattern_time_type::utc);
        spdlog::set_default_logger(logger);
    }
    ~LogRedirect() { spdlog::set_default_logger(previous_); }

private:
    std::shared_ptr<spdlog::logger> previous_;
};

class SignalGuard {
public:
    SignalGuard() {
        g_interrupted = false;
        old_int_ = std::signal(SIGINT, on_signal);
        old_term_ = std::signal(SIGTERM, on_signal);
    }
    ~SignalGuard() {
        std::signal(SIGINT, old_int_);
        std::signal(SIGTERM, old_term_);
    }

private:
    void (*old_int_)(int) = SIG_DFL;
    void (*old_term_)(int) = SIG_DFL;
};

struct TempStoreDir {
    fs::path path;
    TempStoreDir() {
        auto tmpl = (fs::temp_directory_path() / "vigil-scan-XXXXXX").string();
        if (!::mkdtemp(tmpl.data())) throw IoFailure("cannot create a scratch directory");
        path = tmpl;
    }
    ~TempStoreDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::vector<adapters::ToolDescriptor> descriptors_of(const Config& cfg) {
    auto load = adapters::load_descriptors(cfg.tools_dir);
    for (const auto& [path, why] : load.errors) spdlog::warn("skipping descriptor {}: {}", path.string(), why);
    return load.descriptors;
}

engine::ScanPlan make_plan(const Config& cfg, const store::Selection& sel, std::vector<std::string> tools,
                           bool no_builtin) {
    if (no_builtin) std::erase(tools, std::string(engine::kBuiltinName));
    auto plan = engine::build_scan_plan(sel, tools, descriptors_of(cfg), {cfg.parallelism, cfg.inputs_dir});
    for (const auto& n : plan.notices) spdlog::warn("{}", n);
    return plan;
}

void log_summary(const engine::ScanSummary& s) {
    spdlog::info("scanned {} contracts, {} records (ok {}, skipped {}, failed {}, timeout {}) in {:.3f}s",
                 s.contracts_scanned, s.records_produced, s.per_status.ok, s.per_status.skipped, s.per_status.failed,
                 s.per_status.timeout, s.wall_time);
    for (const auto& e : s.errors) spdlog::error("{}", e);
}

store::Selection selection_from(const std::string& seq, const std::string& block, bool all) {
    const int given = !seq.empty() + !block.empty() + all;
    if (given > 1) throw InvalidRange("choose one of --seq, --block, --all");
    if (!seq.empty()) {
        const auto [a, b] = store::parse_range(seq);
        return store::Selection::seq_range(a, b);
    }
    if (!block.empty()) {
        const auto [a, b] = store::parse_range(block);
        return store::Selection::block_range(a, b);
    }
    return store::Selection::everything();
}

void write_reports(const store::Store& st, const std::vector<store::StoredContract>& contracts,
                   const std::string& out_dir, std::ostream& out) {
    if (!out_dir.empty()) fs::create_directories(out_dir);
    for (const auto& c : contracts) {
        const auto r = st.latest_report(c.id);
        if (!r) continue;
        const auto doc = canonical_dump(Json(*r));
        if (out_dir.empty()) {
            out << doc << '\n';
            continue;
        }
        const auto path = fs::path(out_dir) / (c.id + ".json");
        std::ofstream f(path, std::ios::binary);
        f << doc << '\n';
        if (!f) throw IoFailure("cannot write " + path.string());
        spdlog::info("wrote {}", path.string());
    }
}

// Same-stem .hex/.sol files become one contract.
std::vector<Contract> contracts_from_files(const std::vector<std::string>& paths) {
    for (const auto& p : paths) {
        const auto ext = fs::path(p).extension().string();
        if (ext != ".hex" && ext != ".sol")
            throw UnsupportedInput("unsupported file extension '" + ext + "' for " + p +
                                   "; supported extensions are .hex (bytecode) and .sol (Solidity source)");
    }
    std::vector<std::string> order;
    std::map<std::string, Contract> by_stem;
    for (const auto& p : paths) {
        const auto path = fs::path(p);
        const auto stem = (path.parent_path() / path.stem()).lexically_normal().string();
        auto loaded = ingest::load_local_file(path);
        auto [it, fresh] = by_stem.try_emplace(stem, loaded);
        if (fresh) {
            order.push_back(stem);
            continue;
        }
        if (!loaded.bytecode.empty()) it->second.bytecode = loaded.bytecode;
        if (loaded.source) it->second.source = loaded.source;
    }
    std::vector<Contract> out;
    for (const auto& s : order) out.push_back(by_stem.at(s));
    return out;
}

int report_error(std::ostream& err, const std::string& message, int code) {
    err << "error: " << message << '\n';
    return code;
}

std::string levels_text(const adapters::LevelSet& l) {
    std::string s;
    if (l.bytecode) s += "bytecode";
    if (l.solidity) s += std::string(s.empty() ? "" : ",") + "solidity";
    return s;
}

}  // namespace

void Config::finalize() {
    if (parallelism == 0) throw ConfigError("field 'parallelism': must be at least 1");
    const auto cwd = fs::current_path();
    data_dir = absolute_from(data_dir, cwd);
    inputs_dir = inputs_dir.empty() ? data_dir / "inputs" : absolute_from(inputs_dir, cwd);
    tools_dir = tools_dir.empty() ? fs::path(VIGIL_DEFAULT_TOOLS_DIR) : tools_dir;
    tools_dir = absolute_from(tools_dir, cwd);
    if (explorer && explorer->api_base.empty()) explorer->api_base = kDefaultExplorer;
}

detect::DetectorRegistry Config::registry() const {
    auto r = detect::DetectorRegistry::defaults();
    r.set_config(detectors);
    for (const auto& id : disabled_detectors) {
        if (!r.contains(id)) throw ConfigError("field 'detectors.disabled': unknown detector '" + id + "'");
        r.set_enabled(id, false);
    }
    return r;
}

Config apply_config(Config cfg, const Json& doc, const fs::path& base_dir) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> known = {"data_dir",    "inputs_dir", "tools_dir",  "rpc_endpoint",
                                                "explorer",    "parallelism", "detectors", "stat_groups"};
    for (const auto& [key, v] : doc.items())
        if (!known.count(key)) throw ConfigError("unknown config field '" + key + "'");

    if (doc.contains("data_dir")) cfg.data_dir = absolute_from(get_field<std::string>(doc, "data_dir"), base_dir);
    if (doc.contains("inputs_dir")) cfg.inputs_dir = absolute_from(get_field<std::string>(doc, "inputs_dir"), base_dir);
    if (doc.contains("tools_dir")) cfg.tools_dir = absolute_from(get_field<std::string>(doc, "tools_dir"), base_dir);
    if (doc.contains("rpc_endpoint")) cfg.rpc_endpoint = get_field<std::string>(doc, "rpc_endpoint");
    if (doc.contains("parallelism")) {
        const auto p = get_field<std::int64_t>(doc, "parallelism");
        if (p < 1) throw ConfigError("field 'parallelism': must be at least 1");
        cfg.parallelism = static_cast<std::size_t>(p);
    }
    if (doc.contains("explorer")) {
        const auto& e = doc.at("explorer");
        ExplorerConfig ex = cfg.explorer.value_or(ExplorerConfig{});
        if (e.contains("api_base")) ex.api_base = get_field<std::string>(e, "api_base");
        if (e.contains("api_key")) ex.api_key = get_field<std::string>(e, "api_key");
        if (e.contains("rate")) ex.rate = get_field<double>(e, "rate");
        cfg.explorer = ex;
    }
    if (doc.contains("detectors")) {
        const auto& d = doc.at("detectors");
        if (d.contains("pragma_floor")) {
            const auto text = get_field<std::string>(d, "pragma_floor");
            const auto v = detect::Version::parse(text);
            if (!v) throw ConfigError("field 'detectors.pragma_floor': not a version: '" + text + "'");
            cfg.detectors.pragma_floor = *v;
        }
        if (d.contains("call_chain_depth")) {
            const auto n = get_field<int>(d, "call_chain_depth");
            if (n < 1) throw ConfigError("field 'detectors.call_chain_depth': must be at least 1");
            cfg.detectors.call_chain_depth = n;
        }
        if (d.contains("disabled")) cfg.disabled_detectors = get_field<std::vector<std::string>>(d, "disabled");
    }
    if (doc.contains("stat_groups")) {
        stats::GroupMap groups;
        for (const auto& [name, members] : doc.at("stat_groups").items()) {
            for (const auto& m : members) {
                const auto text = m.is_string() ? m.get<std::string>() : std::string();
                const auto vc = vuln_class_from_string(text);
                if (!vc) throw ConfigError("field 'stat_groups." + name + "': unknown class '" + text + "'");
                groups[name].insert(*vc);
            }
        }
        cfg.stat_groups = std::move(groups);
    }
    return cfg;
}

Config load_config_file(Config base, const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return apply_config(std::move(base), doc, fs::absolute(path).parent_path());
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    LogRedirect logs(err);

    CLI::App app{"Smart-contract bytecode and source scanner with pluggable external analyzers", "vigil"};
    app.footer(kExitCodes);
    app.require_subcommand(1);

    std::string config_path, data_dir, tools_dir, inputs_dir, rpc;
    std::size_t parallelism = 0;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--data-dir", data_dir, "Store directory");
    app.add_option("--tools-dir", tools_dir, "Tool descriptor directory");
    app.add_option("--inputs-dir", inputs_dir, "Where analyzer input files are written");
    app.add_option("--rpc", rpc, "JSON-RPC endpoint (env VIGIL_RPC_ENDPOINT)");
    auto* parallelism_opt = app.add_option("-j,--parallelism", parallelism, "Concurrent analyzer runs");

    std::vector<std::string> tools{std::string(engine::kBuiltinName)};
    bool no_builtin = false;
    const auto add_tools = [&](CLI::App* sub) {
        sub->add_option("--tools", tools, "Analyzers to run, comma separated (builtin = built-in detectors)")
            ->delimiter(',');
        sub->add_flag("--no-builtin", no_builtin, "Drop the built-in detectors from the selection");
    };
    std::string seq, block;
    bool all = false;
    const auto add_range = [&](CLI::App* sub) {
        sub->add_option("--seq", seq, "Inclusive store sequence range a..b");
        sub->add_option("--block", block, "Inclusive block number range a..b");
        sub->add_flag("--all", all, "Every stored contract (the default)");
    };

    auto* scan_file = app.add_subcommand("scan-file", "Scan local .hex/.sol files");
    std::vector<std::string> files;
    std::string out_dir;
    scan_file->add_option("paths", files, "Files; same-stem .hex and .sol form one contract")->required();
    scan_file->add_option("--out", out_dir, "Directory for report documents instead of stdout");
    add_tools(scan_file);

    auto* scan_address = app.add_subcommand("scan-address", "Fetch, store and scan one deployed contract");
    std::string address_text;
    scan_address->add_option("address", address_text, "Contract address")->required();
    add_tools(scan_address);

    auto* import = app.add_subcommand("import", "Import a CSV contract export into the store");
    std::string csv_path;
    import->add_option("csv", csv_path, "CSV file with address, bytecode, block_number, block_timestamp")->required();

    auto* scan_range = app.add_subcommand("scan-range", "Scan stored contracts");
    add_range(scan_range);
    add_tools(scan_range);

    auto* tools_cmd = app.add_subcommand("tools", "Tool descriptors");
    tools_cmd->require_subcommand(1);
    auto* tools_list = tools_cmd->add_subcommand("list", "List loaded descriptors");
    bool as_json = false;
    tools_list->add_flag("--json", as_json, "One JSON array instead of a table");

    auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics over the latest reports");
    add_range(stats_cmd);
    stats_cmd->add_flag("--json", as_json, "JSON document instead of a table");

    auto* timeline = app.add_subcommand("timeline", "Finding counts of every report of one contract");
    std::string contract_id;
    timeline->add_option("id", contract_id, "Contract id (address or sha256-...)")->required();

    auto* monitor = app.add_subcommand("monitor", "Re-scan stale contracts periodically");
    double interval = 3600;
    std::size_t iterations = 0;
    monitor->add_option("--interval", interval, "Seconds between passes")->check(CLI::NonNegativeNumber);
    monitor->add_option("--iterations", iterations, "Stop after this many passes (0 = until interrupted)");
    add_tools(monitor);

    auto* export_cmd = app.add_subcommand("export", "Write the newest version of stored contracts as CSV");
    std::string export_path;
    export_cmd->add_option("--out", export_path, "Output file instead of stdout");
    add_range(export_cmd);

    std::vector<const char*> argv{"vigil"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_code::invalid_input;
    }

    try {
        Config cfg;
        if (!config_path.empty()) cfg = load_config_file(cfg, config_path);
        if (const char* env = std::getenv("VIGIL_RPC_ENDPOINT"); env && *env) cfg.rpc_endpoint = env;
        if (const char* env = std::getenv("VIGIL_EXPLORER_KEY"); env && *env) {
            if (!cfg.explorer) cfg.explorer = ExplorerConfig{};
            cfg.explorer->api_key = env;
        }
        if (!data_dir.empty()) cfg.data_dir = data_dir;
        if (!tools_dir.empty()) cfg.tools_dir = tools_dir;
        if (!inputs_dir.empty()) cfg.inputs_dir = inputs_dir;
        if (!rpc.empty()) cfg.rpc_endpoint = rpc;
        if (parallelism_opt->count()) cfg.parallelism = parallelism;
        cfg.finalize();
        const auto registry = cfg.registry();

        if (*tools_list) {
            const auto descs = descriptors_of(cfg);
            if (as_json) {
                Json arr = Json::array();
                for (const auto& d : descs) arr.push_back(adapters::to_json(d));
                out << canonical_dump(arr) << '\n';
                return exit_code::ok;
            }
            std::vector<std::array<std::string, 5>> rows{{"NAME", "LEVELS", "ENABLED", "IMAGE", "INSTALLATION"}};
            for (const auto& d : descs) {
                const auto it = d.metadata.find("ease_of_installation");
                rows.push_back({d.name, levels_text(d.level), d.enabled ? "yes" : "no", d.image,
                                it == d.metadata.end() ? "" : it->second});
            }
            std::array<std::size_t, 5> w{};
            for (const auto& r : rows)
                for (std::size_t i = 0; i < 5; ++i) w[i] = std::max(w[i], r[i].size());
            for (const auto& r : rows) {
                std::string line;
                for (std::size_t i = 0; i < 5; ++i) {
                    line += r[i];
                    if (i + 1 < 5) line += std::string(w[i] - r[i].size() + 2, ' ');
                }
                while (!line.empty() && line.back() == ' ') line.pop_back();
                out << line << '\n';
            }
            return exit_code::ok;
        }

        if (*scan_file) {
            const auto contracts = contracts_from_files(files);
            auto plan = make_plan(cfg, store::Selection::everything(), tools, no_builtin);
            TempStoreDir scratch;
            store::FileStore st(scratch.path / "store");
            std::vector<store::StoredContract> stored;
            for (const auto& c : contracts) stored.push_back(st.put_contract(c));
            adapters::SubprocessExecutor exec;
            const auto summary = engine::run_scan(plan, stored, exec, st, registry, {&err, nullptr});
            write_reports(st, stored, out_dir, out);
            log_summary(summary);
            return exit_code::ok;
        }

        store::FileStore st(cfg.data_dir);

        if (*scan_address) {
            const auto address = Address::parse(address_text);
            if (!cfg.rpc_endpoint) throw ConfigError("no RPC endpoint configured (--rpc or VIGIL_RPC_ENDPOINT)");
            auto plan = make_plan(cfg, store::Selection::of(address), tools, no_builtin);
            auto contract = ingest::fetch_code_rpc(*cfg.rpc_endpoint, address);
            if (cfg.explorer) {
                ingest::RateLimiter limiter(cfg.explorer->rate);
                ingest::ExplorerClient client;
                client.api_base = cfg.explorer->api_base;
                client.api_key = cfg.explorer->api_key;
                client.limiter = &limiter;
                if (auto src = ingest::fetch_source_explorer(client, address)) {
                    contract.source = std::move(*src);
                    contract.origin = Origin::explorer;
                }
            }
            const auto stored = st.put_contract(contract);
            adapters::SubprocessExecutor exec;
            const auto summary = engine::run_scan(plan, {stored}, exec, st, registry, {&err, nullptr});
            write_reports(st, {stored}, {}, out);
            log_summary(summary);
            return exit_code::ok;
        }

        if (*import) {
            const auto batch = ingest::import_csv(csv_path);
            const auto before = st.contract_records();
            for (const auto& c : batch.contracts) st.put_contract(c);
            Json rejected = Json::array();
            for (const auto& [line, why] : batch.rejected) {
                spdlog::warn("line {}: {}", line, why);
                rejected.push_back(Json{{"line", line}, {"reason", why}});
            }
            out << canonical_dump(Json{{"rows_accepted", batch.contracts.size()},
                                       {"records_added", st.contract_records() - before},
                                       {"rejected", rejected}})
                << '\n';
            return exit_code::ok;
        }

        if (*scan_range) {
            const auto plan = make_plan(cfg, selection_from(seq, block, all), tools, no_builtin);
            adapters::SubprocessExecutor exec;
            const auto summary = engine::run_scan(plan, exec, st, registry, {&err, nullptr});
            out << canonical_dump(Json(summary)) << '\n';
            log_summary(summary);
            return exit_code::ok;
        }

        if (*stats_cmd) {
            const auto s = stats::compute_stats(st, selection_from(seq, block, all),
                                                {cfg.stat_groups, descriptors_of(cfg)});
            if (as_json) out << canonical_dump(Json(s)) << '\n';
            else out << stats::render_table(s);
            return exit_code::ok;
        }

        if (*timeline) {
            Json arr = Json::array();
            for (const auto& e : stats::findings_over_time(st, contract_id)) arr.push_back(e);
            out << canonical_dump(arr) << '\n';
            return exit_code::ok;
        }

        if (*export_cmd) {
            std::vector<Contract> contracts;
            auto cur = st.select(selection_from(seq, block, all));
            while (auto c = cur.next()) contracts.push_back(c->contract);
            if (export_path.empty()) {
                ingest::write_csv(out, contracts);
            } else {
                std::ofstream f(export_path, std::ios::binary);
                ingest::write_csv(f, contracts);
                if (!f) throw IoFailure("cannot write " + export_path);
            }
            spdlog::info("exported {} contracts", contracts.size());
            return exit_code::ok;
        }

        if (*monitor) {
            const auto plan = make_plan(cfg, store::Selection::everything(), tools, no_builtin);
            SignalGuard guard;
            adapters::SubprocessExecutor exec;
            for (std::size_t pass = 1; !g_interrupted; ++pass) {
                const auto m = engine::monitor_rescan(st, registry, exec, plan, {&err, &g_interrupted});
                Json diffs = Json::array();
                for (const auto& d : m.diffs) diffs.push_back(d);
                out << canonical_dump(Json{{"pass", pass}, {"summary", m.summary}, {"diffs", diffs}}) << '\n';
                out.flush();
                if (iterations && pass >= iterations) break;
                const auto until = std::chrono::steady_clock::now() + std::chrono::duration<double>(interval);
                while (!g_interrupted && std::chrono::steady_clock::now() < until)
                    std::this_thread::sleep_for(std::chrono::milliseconds(50));
            }
            if (g_interrupted) spdlog::info("interrupted; stopping");
            return exit_code::ok;
        }
        return report_error(err, "no command", exit_code::invalid_input);
    } catch (const NotAContract& e) {
        return report_error(err, std::string("address holds no code (user account): ") + e.what(),
                            exit_code::not_a_contract);
    } catch (const InvalidAddress& e) {
        return report_error(err, e.what(), exit_code::invalid_input);
    } catch (const InvalidHex& e) {
        return report_error(err, e.what(), exit_code::invalid_input);
    } catch (const InvalidContract& e) {
        return report_error(err, e.what(), exit_code::invalid_input);
    } catch (const UnsupportedInput& e) {
        return report_error(err, e.what(), exit_code::invalid_input);
    } catch (const FileUnreadable& e) {
        return report_error(err, e.what(), exit_code::invalid_input);
    } catch (const MissingHeader& e) {
        return report_error(err, e.what(), exit_code::invalid_input);
    } catch (const InvalidRange& e) {
        return report_error(err, e.what(), exit_code::invalid_input);
    } catch (const UnknownContract& e) {
        return report_error(err, e.what(), exit_code::invalid_input);
    } catch (const MissingInputFile& e) {
        return report_error(err, e.what(), exit_code::invalid_input);
    } catch (const UnknownTool& e) {
        return report_error(err, e.what(), exit_code::tool_selection);
    } catch (const EmptyPlan& e) {
        return report_error(err, e.what(), exit_code::tool_selection);
    } catch (const RpcTransport& e) {
        return report_error(err, e.what(), exit_code::rpc);
    } catch (const RpcError& e) {
        return report_error(err, e.what(), exit_code::rpc);
    } catch (const StorageFailure& e) {
        return report_error(err, e.what(), exit_code::storage);
    } catch (const IoFailure& e) {
        return report_error(err, e.what(), exit_code::storage);
    } catch (const ConfigError& e) {
        return report_error(err, e.what(), exit_code::config);
    } catch (const DescriptorError& e) {
        return report_error(err, e.what(), exit_code::config);
    } catch (const std::exception& e) {
        return report_error(err, e.what(), exit_code::internal);
    }
}

}  // namespace vigil::cli
