#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "vigil/core/errors.hpp"
#include "vigil/core/json_util.hpp"
#include "vigil/store/store.hpp"

namespace vigil::store {

namespace {

// Read-only handle shared with cursors so they can outlive a select() call.
struct Reader {
    int fd = -1;
    explicit Reader(const std::filesystem::path& p) : fd(::open(p.c_str(), O_RDONLY | O_CLOEXEC)) {
        if (fd < 0) throw StorageFailure("cannot open " + p.string() + ": " + std::strerror(errno));
    }
    ~Reader() {
        if (fd >= 0) ::close(fd);
    }
    Reader(const Reader&) = delete;
    Reader& operator=(const Reader&) = delete;

    Json read(std::uint64_t offset, std::uint64_t length) const {
        std::string buf(length, '\0');
        std::size_t got = 0;
        while (got < length) {
            const auto n = ::pread(fd, buf.data() + got, length - got, static_cast<off_t>(offset + got));
            if (n < 0 && errno == EINTR) continue;
            if (n <= 0) throw StorageFailure("short read at offset " + std::to_string(offset));
            got += static_cast<std::size_t>(n);
        }
        auto j = Json::parse(buf, nullptr, false);
        if (j.is_discarded()) throw StorageFailure("corrupt record at offset " + std::to_string(offset));
        return j;
    }
};

struct Span {
    std::uint64_t offset = 0;
    std::uint64_t length = 0;  // without the newline
};

// Streams complete lines; returns the byte length of the valid prefix.
template <class F>
std::uint64_t replay(const std::filesystem::path& p, F&& on_record) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return 0;
    std::uint64_t offset = 0;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (in.eof()) break;  // no terminating newline: a torn write
        ++line_no;
        if (!line.empty()) {
            auto j = Json::parse(line, nullptr, false);
            if (j.is_discarded())
                throw StorageFailure(p.string() + ": corrupt record on line " + std::to_string(line_no));
            on_record(j, Span{offset, line.size()});
        }
        offset += line.size() + 1;
    }
    return offset;
}

class Appender {
public:
    Appender(const std::filesystem::path& p, bool sync) : path_(p), sync_(sync) {
        fd_ = ::open(p.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
        if (fd_ < 0) throw StorageFailure("cannot open " + p.string() + " for append: " + std::strerror(errno));
        size_ = static_cast<std::uint64_t>(::lseek(fd_, 0, SEEK_END));
    }
    ~Appender() {
        if (fd_ >= 0) ::close(fd_);
    }
    Appender(const Appender&) = delete;
    Appender& operator=(const Appender&) = delete;

    Span append(const std::string& doc) {
        const std::string line = doc + '\n';
        std::size_t done = 0;
        while (done < line.size()) {
            const auto n = ::write(fd_, line.data() + done, line.size() - done);
            if (n < 0 && errno == EINTR) continue;
            if (n <= 0) {
                // Cut the torn tail so the log stays a sequence of complete records.
                [[maybe_unused]] auto rc = ::ftruncate(fd_, static_cast<off_t>(size_));
                throw StorageFailure("write to " + path_.string() + " failed: " + std::strerror(errno));
            }
            done += static_cast<std::size_t>(n);
        }
        if (sync_ && ::fdatasync(fd_) != 0) throw StorageFailure("fdatasync " + path_.string() + " failed");
        const Span s{size_, doc.size()};
        size_ += line.size();
        return s;
    }

private:
    std::filesystem::path path_;
    bool sync_;
    int fd_ = -1;
    std::uint64_t size_ = 0;
};

std::uint64_t truncate_to(const std::filesystem::path& p, std::uint64_t valid) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(p, ec);
    if (ec || size <= valid) return 0;
    std::filesystem::resize_file(p, valid, ec);
    if (ec) throw StorageFailure("cannot truncate torn tail of " + p.string() + ": " + ec.message());
    return size - valid;
}

}  // namespace

struct FileStore::Impl {
    struct ContractEntry {
        Span span;
        std::uint64_t seq = 0;
        std::string id;
        std::uint32_t version = 1;
        std::optional<std::uint64_t> block_number;
        std::optional<Address> address;
        std::string digest;  // identifies bytecode + source for the no-op check
    };
    struct ReportEntry {
        Span span;
        Timestamp started_at{};
    };

    std::filesystem::path dir;
    FileStoreOptions opts;
    mutable std::shared_mutex mu;
    std::vector<ContractEntry> contracts;  // index == seq - 1
    std::unordered_map<std::string, std::vector<std::size_t>> versions;
    std::unordered_map<std::string, std::vector<ReportEntry>> reports;
    std::size_t report_count = 0;
    std::uint64_t dropped_contract_bytes = 0;
    std::uint64_t dropped_report_bytes = 0;
    std::unique_ptr<Appender> contract_log;
    std::unique_ptr<Appender> report_log;
    std::shared_ptr<Reader> contract_reader;
    std::shared_ptr<Reader> report_reader;

    std::filesystem::path contracts_path() const { return dir / "contracts.ndjson"; }
    std::filesystem::path reports_path() const { return dir / "reports.ndjson"; }

    static std::string digest_of(const Contract& c) {
        Contract key;
        key.bytecode = c.bytecode;
        key.source = c.source_available() ? c.source : std::nullopt;
        return contract_id(key);
    }

    void index_contract(const StoredContract& s, Span span) {
        if (s.seq != contracts.size() + 1)
            throw StorageFailure("contract log out of sequence at seq " + std::to_string(s.seq));
        versions[s.id].push_back(contracts.size());
        contracts.push_back({span, s.seq, s.id, s.version, s.contract.block_number, s.contract.address,
                             digest_of(s.contract)});
    }

    void index_report(const ScanReport& r, Span span) {
        auto& list = reports[r.contract_id];
        const ReportEntry e{span, r.started_at};
        // Keep started_at order; equal stamps stay in append order.
        const auto pos = std::upper_bound(list.begin(), list.end(), e, [](const ReportEntry& a, const ReportEntry& b) {
            return a.started_at < b.started_at;
        });
        list.insert(pos, e);
        ++report_count;
    }

    bool is_latest(const ContractEntry& e) const { return versions.at(e.id).back() == e.seq - 1; }

    StoredContract load_contract(std::size_t index) const {
        return contract_reader->read(contracts[index].span.offset, contracts[index].span.length).get<StoredContract>();
    }
};

FileStore::FileStore(std::filesystem::path dir, FileStoreOptions opts) : impl_(std::make_unique<Impl>()) {
    impl_->dir = std::move(dir);
    impl_->opts = opts;
    std::error_code ec;
    std::filesystem::create_directories(impl_->dir, ec);
    if (!std::filesystem::is_directory(impl_->dir))
        throw StorageFailure("data directory " + impl_->dir.string() + " is unavailable");

    auto& im = *impl_;
    try {
        const auto c_valid = replay(im.contracts_path(), [&](const Json& j, Span s) {
            im.index_contract(j.get<StoredContract>(), s);
        });
        im.dropped_contract_bytes = truncate_to(im.contracts_path(), c_valid);
        const auto r_valid = replay(im.reports_path(), [&](const Json& j, Span s) {
            im.index_report(j.get<ScanReport>(), s);
        });
        im.dropped_report_bytes = truncate_to(im.reports_path(), r_valid);
    } catch (const Json::exception& e) {
        throw StorageFailure(std::string("malformed stored document: ") + e.what());
    }
    im.contract_log = std::make_unique<Appender>(im.contracts_path(), opts.fsync);
    im.report_log = std::make_unique<Appender>(im.reports_path(), opts.fsync);
    im.contract_reader = std::make_shared<Reader>(im.contracts_path());
    im.report_reader = std::make_shared<Reader>(im.reports_path());
}

FileStore::~FileStore() = default;

StoredContract FileStore::put_contract(const Contract& c) {
    if (c.empty()) throw InvalidContract("cannot store a contract with neither bytecode nor source");
    c.validate();
    auto& im = *impl_;
    std::unique_lock lock(im.mu);
    const auto id = contract_id(c);
    const auto digest = Impl::digest_of(c);
    std::uint32_t version = 1;
    if (const auto it = im.versions.find(id); it != im.versions.end()) {
        const auto& last = im.contracts[it->second.back()];
        if (last.digest == digest) return im.load_contract(it->second.back());
        version = last.version + 1;
    }
    StoredContract s{c, im.contracts.size() + 1, id, version, now_utc()};
    const auto span = im.contract_log->append(canonical_dump(Json(s)));
    im.index_contract(s, span);
    return s;
}

std::optional<StoredContract> FileStore::latest(const std::string& id) const {
    std::shared_lock lock(impl_->mu);
    const auto it = impl_->versions.find(id);
    if (it == impl_->versions.end()) return std::nullopt;
    return impl_->load_contract(it->second.back());
}

ContractCursor FileStore::select(const Selection& s) const {
    s.validate();
    std::shared_lock lock(impl_->mu);
    const auto& im = *impl_;
    std::vector<Span> hits;
    for (const auto& e : im.contracts) {
        if (!s.all_versions && !im.is_latest(e)) continue;
        bool in = false;
        switch (s.kind) {
            case Selection::Kind::all: in = true; break;
            case Selection::Kind::seq: in = e.seq >= s.lo && e.seq <= s.hi; break;
            case Selection::Kind::block: in = e.block_number && *e.block_number >= s.lo && *e.block_number <= s.hi; break;
            case Selection::Kind::address: in = e.address && s.address && *e.address == *s.address; break;
        }
        if (in) hits.push_back(e.span);
    }
    const auto n = hits.size();
    return ContractCursor(n, [reader = im.contract_reader, hits = std::move(hits)](std::size_t i) {
        return reader->read(hits[i].offset, hits[i].length).get<StoredContract>();
    });
}

std::size_t FileStore::contract_records() const {
    std::shared_lock lock(impl_->mu);
    return impl_->contracts.size();
}

void FileStore::put_report(const ScanReport& r) {
    auto& im = *impl_;
    std::unique_lock lock(im.mu);
    if (!im.versions.count(r.contract_id)) throw UnknownContract("no stored contract with id " + r.contract_id);
    const auto span = im.report_log->append(canonical_dump(Json(r)));
    im.index_report(r, span);
}

std::vector<ScanReport> FileStore::get_reports(const std::string& id) const {
    std::shared_lock lock(impl_->mu);
    std::vector<ScanReport> out;
    const auto it = impl_->reports.find(id);
    if (it == impl_->reports.end()) return out;
    for (const auto& e : it->second)
        out.push_back(impl_->report_reader->read(e.span.offset, e.span.length).get<ScanReport>());
    return out;
}

std::optional<ScanReport> FileStore::latest_report(const std::string& id) const {
    std::shared_lock lock(impl_->mu);
    const auto it = impl_->reports.find(id);
    if (it == impl_->reports.end() || it->second.empty()) return std::nullopt;
    const auto& e = it->second.back();
    return impl_->report_reader->read(e.span.offset, e.span.length).get<ScanReport>();
}

std::size_t FileStore::report_records() const {
    std::shared_lock lock(impl_->mu);
    return impl_->report_count;
}

std::size_t FileStore::recovered_contract_bytes() const { return impl_->dropped_contract_bytes; }
std::size_t FileStore::recovered_report_bytes() const { return impl_->dropped_report_bytes; }
std::filesystem::path FileStore::contracts_path() const { return impl_->contracts_path(); }
std::filesystem::path FileStore::reports_path() const { return impl_->reports_path(); }

}  // namespace vigil::store
