#include "vigil/engine/engine.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <exception>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "vigil/core/errors.hpp"
#include "vigil/detect/detectors.hpp"
#include "vigil/evm/disasm.hpp"
#include "vigil/ingest/inputs.hpp"

namespace vigil::engine {

namespace {

using Clock = std::chrono::steady_clock;
using adapters::ToolResult;
using adapters::ToolStatus;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Job {
    store::StoredContract sc;
    store::ScanReport report;
    std::set<std::size_t> offsets;  // valid instruction starts
    std::atomic<std::size_t> remaining{0};
    std::atomic<bool> abandoned{false};
    std::mutex mu;
};

struct Task {
    std::shared_ptr<Job> job;
    int analyzer = -1;  // -1 is the builtin pass, otherwise a tool index
};

class TaskQueue {
public:
    explicit TaskQueue(std::size_t capacity) : capacity_(capacity) {}

    void push(Task t) {
        std::unique_lock lock(mu_);
        not_full_.wait(lock, [&] { return q_.size() < capacity_; });
        q_.push_back(std::move(t));
        not_empty_.notify_one();
    }
    std::optional<Task> pop() {
        std::unique_lock lock(mu_);
        not_empty_.wait(lock, [&] { return !q_.empty() || closed_; });
        if (q_.empty()) return std::nullopt;
        Task t = std::move(q_.front());
        q_.pop_front();
        not_full_.notify_one();
        return t;
    }
    void close() {
        std::lock_guard lock(mu_);
        closed_ = true;
        not_empty_.notify_all();
    }

private:
    std::size_t capacity_;
    std::mutex mu_;
    std::condition_variable not_empty_, not_full_;
    std::deque<Task> q_;
    bool closed_ = false;
};

class Progress {
public:
    Progress(std::ostream* out, std::size_t total) : out_(out), total_(total) {}

    void tick() {
        const auto done = ++done_;
        if (!out_ || total_ == 0) return;
        const auto decile = done * 10 / total_;
        std::lock_guard lock(mu_);
        while (printed_ < decile) {
            ++printed_;
            *out_ << format_iso8601(now_utc()) << " - " << done << " items processed. Progress is " << printed_ * 10
                  << "%." << std::endl;
        }
    }

private:
    std::ostream* out_;
    std::size_t total_;
    std::atomic<std::size_t> done_{0};
    std::mutex mu_;
    std::size_t printed_ = 0;
};

std::filesystem::path make_temp_inputs() {
    auto tmpl = (std::filesystem::temp_directory_path() / "vigil-inputs-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw IoFailure("cannot create a temporary inputs directory");
    return tmpl;
}

// Tool locations must name an instruction start of the analyzed bytecode.
void clear_foreign_locations(ToolResult& r, const std::set<std::size_t>& offsets) {
    for (auto& f : r.findings) {
        if (f.location && !offsets.count(*f.location)) {
            r.notes.push_back("location " + std::to_string(*f.location) + " is not an instruction offset; cleared");
            f.location.reset();
        }
    }
}

ScanSummary run_cursor(const ScanPlan& plan, store::ContractCursor cursor, adapters::Executor& executor,
                       store::Store& st, const detect::DetectorRegistry& registry, const RunControls& controls) {
    const auto t0 = Clock::now();
    const auto per_contract = plan.analyzers_per_contract();
    if (per_contract == 0) throw EmptyPlan("nothing to run: no tools selected and builtin disabled");

    std::filesystem::path inputs = plan.inputs_dir;
    bool temp_inputs = false;
    if (!plan.tools.empty() && inputs.empty()) {
        inputs = make_temp_inputs();
        temp_inputs = true;
    }

    ScanSummary summary;
    std::mutex summary_mu;  // also the single-writer gate for the store
    std::atomic<bool> stop{false};
    std::exception_ptr fatal;
    const auto cancelled = [&] { return stop.load() || (controls.cancel && controls.cancel->load()); };

    Progress progress(controls.progress, cursor.size() * per_contract);
    const auto workers_n = std::max<std::size_t>(1, plan.parallelism);
    TaskQueue queue(workers_n * 4);

    const auto finish = [&](Job& job) {
        if (job.abandoned) return;
        std::lock_guard lock(summary_mu);
        if (stop) return;
        try {
            st.put_report(job.report);
        } catch (const StorageFailure&) {
            fatal = std::current_exception();
            stop = true;
            return;
        } catch (const Error& e) {
            summary.errors.push_back(job.sc.id + ": report not stored: " + e.what());
            return;
        }
        ++summary.contracts_scanned;
        if (job.report.builtin_ran) summary.per_status.add(ToolStatus::ok);
        for (const auto& [name, r] : job.report.tool_results) summary.per_status.add(r.status);
        summary.report_ids.push_back(job.sc.id);
    };

    const auto work = [&] {
        while (auto task = queue.pop()) {
            auto& job = *task->job;
            if (cancelled()) {
                job.abandoned = true;
            } else if (task->analyzer < 0) {
                const auto start = Clock::now();
                auto findings = run_builtin(job.sc.contract, registry);
                std::lock_guard lock(job.mu);
                job.report.builtin_ran = true;
                job.report.builtin_time_elapsed = seconds_since(start);
                job.report.builtin_findings = std::move(findings);
            } else {
                const auto& tool = plan.tools[static_cast<std::size_t>(task->analyzer)];
                ToolResult r;
                try {
                    r = adapters::run_tool(tool, job.sc.contract, inputs, executor);
                } catch (const std::exception& e) {
                    r.tool = tool.name;
                    r.status = ToolStatus::failed;
                    r.output = std::string("analyzer error: ") + e.what();
                }
                clear_foreign_locations(r, job.offsets);
                std::lock_guard lock(job.mu);
                job.report.tool_results[tool.name] = std::move(r);
            }
            progress.tick();
            if (--job.remaining == 0) finish(job);
        }
    };

    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < workers_n; ++i) workers.emplace_back(work);

    try {
        while (!cancelled()) {
            auto next = cursor.next();
            if (!next) break;
            auto job = std::make_shared<Job>();
            job->sc = std::move(*next);
            job->report.contract_id = job->sc.id;
            job->report.contract_seq = job->sc.seq;
            job->report.registry_version = registry.registry_version();
            for (const auto& ins : evm::disassemble(job->sc.contract.bytecode)) job->offsets.insert(ins.offset);
            if (!plan.tools.empty()) {
                try {
                    if (const auto files = ingest::write_input_files(job->sc.contract, inputs); files.warning) {
                        std::lock_guard lock(summary_mu);
                        summary.errors.push_back(job->sc.id + ": " + *files.warning);
                    }
                } catch (const IoFailure& e) {
                    std::lock_guard lock(summary_mu);
                    summary.errors.push_back(job->sc.id + ": " + e.what());
                }
            }
            job->report.started_at = now_utc();
            job->remaining = per_contract;
            if (plan.run_builtin) queue.push({job, -1});
            for (std::size_t t = 0; t < plan.tools.size(); ++t) queue.push({job, static_cast<int>(t)});
        }
        if (cursor.next()) summary.partial = true;
    } catch (const StorageFailure&) {
        std::lock_guard lock(summary_mu);
        if (!fatal) fatal = std::current_exception();
        stop = true;
    }
    queue.close();
    for (auto& w : workers) w.join();

    if (temp_inputs) {
        std::error_code ec;
        std::filesystem::remove_all(inputs, ec);
    }
    if (fatal) std::rethrow_exception(fatal);

    if (controls.cancel && controls.cancel->load()) summary.partial = true;
    summary.records_produced = summary.per_status.total();
    summary.wall_time = seconds_since(t0);
    std::sort(summary.report_ids.begin(), summary.report_ids.end());
    return summary;
}

}  // namespace

void StatusCounts::add(ToolStatus s) {
    switch (s) {
        case ToolStatus::ok: ++ok; break;
        case ToolStatus::skipped: ++skipped; break;
        case ToolStatus::failed: ++failed; break;
        case ToolStatus::timeout: ++timeout; break;
    }
}

void to_json(Json& j, const ScanSummary& s) {
    j = Json{{"contracts_scanned", s.contracts_scanned},
             {"records_produced", s.records_produced},
             {"per_status",
              {{"ok", s.per_status.ok},
               {"skipped", s.per_status.skipped},
               {"failed", s.per_status.failed},
               {"timeout", s.per_status.timeout}}},
             {"wall_time", s.wall_time},
             {"errors", s.errors},
             {"partial", s.partial}};
}

ScanPlan build_scan_plan(const store::Selection& selection, const std::vector<std::string>& tool_names,
                         const std::vector<adapters::ToolDescriptor>& descriptors, const PlanOptions& options) {
    selection.validate();
    if (options.parallelism < 1) throw ConfigError("parallelism must be at least 1");
    ScanPlan plan;
    plan.selection = selection;
    plan.parallelism = options.parallelism;
    plan.inputs_dir = options.inputs_dir;
    std::set<std::string> seen;
    for (const auto& name : tool_names) {
        if (!seen.insert(name).second) continue;
        if (name == kBuiltinName) {
            plan.run_builtin = true;
            continue;
        }
        const auto it = std::find_if(descriptors.begin(), descriptors.end(),
                                     [&](const adapters::ToolDescriptor& d) { return d.name == name; });
        if (it == descriptors.end()) throw UnknownTool("unknown tool '" + name + "'");
        if (!it->enabled) {
            plan.notices.push_back("tool '" + name + "' is disabled; skipped");
            continue;
        }
        plan.tools.push_back(*it);
    }
    if (plan.analyzers_per_contract() == 0) throw EmptyPlan("nothing to run: no enabled tools and builtin disabled");
    return plan;
}

FindingList run_builtin(const Contract& contract, const detect::DetectorRegistry& registry) {
    try {
        return detect::analyze(contract, registry);
    } catch (const std::exception& e) {
        return {Finding{VulnClass::ImmutableBugs, Severity::info, "builtin", std::nullopt,
                        std::string("detector-error: ") + e.what()}};
    }
}

ScanSummary run_scan(const ScanPlan& plan, adapters::Executor& executor, store::Store& store,
                     const detect::DetectorRegistry& registry, const RunControls& controls) {
    return run_cursor(plan, store.select(plan.selection), executor, store, registry, controls);
}

ScanSummary run_scan(const ScanPlan& plan, const std::vector<store::StoredContract>& contracts,
                     adapters::Executor& executor, store::Store& store, const detect::DetectorRegistry& registry,
                     const RunControls& controls) {
    store::ContractCursor cursor(contracts.size(), [&contracts](std::size_t i) { return contracts[i]; });
    return run_cursor(plan, std::move(cursor), executor, store, registry, controls);
}

std::vector<SourcedFinding> all_findings(const store::ScanReport& r) {
    std::vector<SourcedFinding> out;
    for (const auto& f : r.builtin_findings) out.push_back({std::string(kBuiltinName), f});
    for (const auto& [name, tr] : r.tool_results)
        for (const auto& f : tr.findings) out.push_back({name, f});
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void to_json(Json& j, const ContractDiff& d) {
    const auto list = [](const std::vector<SourcedFinding>& v) {
        Json a = Json::array();
        for (const auto& s : v) {
            Json f = s.finding;
            f["source"] = s.source;
            a.push_back(std::move(f));
        }
        return a;
    };
    j = Json{{"contract_id", d.contract_id},     {"had_baseline", d.had_baseline},
             {"previous_version", d.previous_version}, {"current_version", d.current_version},
             {"added", list(d.added)},           {"removed", list(d.removed)}};
}

ContractDiff diff_reports(const std::optional<store::ScanReport>& before, const store::ScanReport& after) {
    ContractDiff d;
    d.contract_id = after.contract_id;
    d.current_version = after.registry_version;
    const auto now = all_findings(after);
    std::vector<SourcedFinding> old;
    if (before) {
        d.had_baseline = true;
        d.previous_version = before->registry_version;
        old = all_findings(*before);
    }
    std::set_difference(now.begin(), now.end(), old.begin(), old.end(), std::back_inserter(d.added));
    std::set_difference(old.begin(), old.end(), now.begin(), now.end(), std::back_inserter(d.removed));
    return d;
}

std::vector<store::StoredContract> stale_contracts(const store::Store& st, const detect::DetectorRegistry& registry) {
    std::vector<store::StoredContract> out;
    auto cursor = st.select(store::Selection::everything());
    while (auto c = cursor.next()) {
        const auto last = st.latest_report(c->id);
        if (!last || last->registry_version < registry.registry_version() || last->contract_seq != c->seq)
            out.push_back(std::move(*c));
    }
    return out;
}

MonitorResult monitor_rescan(store::Store& st, const detect::DetectorRegistry& registry, adapters::Executor& executor,
                             const ScanPlan& plan, const RunControls& controls) {
    MonitorResult out;
    const auto stale = stale_contracts(st, registry);
    std::map<std::string, std::optional<store::ScanReport>> before;
    for (const auto& c : stale) before[c.id] = st.latest_report(c.id);
    out.summary = run_scan(plan, stale, executor, st, registry, controls);
    for (const auto& id : out.summary.report_ids) {
        const auto after = st.latest_report(id);
        if (after) out.diffs.push_back(diff_reports(before[id], *after));
    }
    return out;
}

}  // namespace vigil::engine
