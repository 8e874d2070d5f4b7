#include "vigil/ingest/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "vigil/core/errors.hpp"

namespace vigil::ingest {

namespace {

std::string lower_trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\xEF\xBB\xBF");  // also drops a UTF-8 BOM
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    std::string out(s.substr(b, e - b + 1));
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::optional<std::uint64_t> parse_u64(std::string_view s, const char* field) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (s.empty()) return std::nullopt;
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw InvalidContract(std::string(field) + " is not a non-negative integer: '" + std::string(s) + "'");
    return v;
}

bool blank(const CsvRecord& r) { return r.fields.size() == 1 && r.fields[0].empty(); }

}  // namespace

std::vector<CsvRecord> parse_csv(std::string_view text) {
    std::vector<CsvRecord> out;
    std::size_t line = 1;
    std::size_t i = 0;
    while (i < text.size()) {
        CsvRecord rec;
        rec.line = line;
        std::string field;
        bool in_quotes = false;
        bool done = false;
        while (i < text.size() && !done) {
            const char c = text[i];
            if (in_quotes) {
                if (c == '"') {
                    if (i + 1 < text.size() && text[i + 1] == '"') {
                        field.push_back('"');
                        ++i;
                    } else {
                        in_quotes = false;
                    }
                } else {
                    if (c == '\n') ++line;
                    field.push_back(c);
                }
                ++i;
                continue;
            }
            switch (c) {
                case '"':
                    in_quotes = true;
                    break;
                case ',':
                    rec.fields.push_back(std::move(field));
                    field.clear();
                    break;
                case '\r':
                    if (i + 1 < text.size() && text[i + 1] == '\n') break;
                    field.push_back(c);
                    break;
                case '\n':
                    ++line;
                    done = true;
                    break;
                default:
                    field.push_back(c);
            }
            ++i;
        }
        rec.fields.push_back(std::move(field));
        out.push_back(std::move(rec));
    }
    return out;
}

ContractBatch import_csv_text(std::string_view text) {
    auto records = parse_csv(text);
    const auto first = std::find_if(records.begin(), records.end(), [](const CsvRecord& r) { return !blank(r); });
    if (first == records.end()) throw MissingHeader("CSV input is empty; expected a header row");

    std::map<std::string, std::size_t> col;
    for (std::size_t k = 0; k < first->fields.size(); ++k) col.emplace(lower_trim(first->fields[k]), k);
    for (const auto* required : {"address", "bytecode", "block_number", "block_timestamp"})
        if (!col.count(required))
            throw MissingHeader(std::string("CSV header lacks column '") + required +
                                "'; expected address,bytecode,block_number,block_timestamp,source_code");
    const auto source_col = col.count("source_code") ? std::optional(col.at("source_code")) : std::nullopt;

    ContractBatch batch;
    for (auto it = std::next(first); it != records.end(); ++it) {
        if (blank(*it)) continue;
        const auto& f = it->fields;
        try {
            if (f.size() != first->fields.size())
                throw InvalidContract("expected " + std::to_string(first->fields.size()) + " fields, found " +
                                      std::to_string(f.size()));
            Contract c;
            c.origin = Origin::csv_import;
            c.address = parse_address(f[col.at("address")]);
            c.bytecode = decode_hex(f[col.at("bytecode")]);
            c.block_number = parse_u64(f[col.at("block_number")], "block_number");
            if (const auto ts = parse_u64(f[col.at("block_timestamp")], "block_timestamp"))
                c.timestamp = from_unix_seconds(static_cast<std::int64_t>(*ts));
            if (source_col && !f[*source_col].empty()) c.source = f[*source_col];
            if (c.empty()) throw InvalidContract("row has neither bytecode nor source");
            batch.contracts.push_back(std::move(c));
        } catch (const InvalidAddress& e) {
            batch.rejected.emplace_back(it->line, std::string("InvalidAddress: ") + e.what());
        } catch (const InvalidHex& e) {
            batch.rejected.emplace_back(it->line, std::string("InvalidHex: ") + e.what());
        } catch (const InvalidContract& e) {
            batch.rejected.emplace_back(it->line, std::string("InvalidRow: ") + e.what());
        }
    }
    return batch;
}

ContractBatch import_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileUnreadable("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw FileUnreadable("error reading " + path.string());
    return import_csv_text(ss.str());
}

std::string csv_escape(std::string_view field) {
    const bool quote = field.find_first_of(",\"\r\n") != std::string_view::npos ||
                       (!field.empty() && (field.front() == ' ' || field.back() == ' '));
    if (!quote) return std::string(field);
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_csv(std::ostream& out, const std::vector<Contract>& contracts) {
    out << "address,bytecode,block_number,block_timestamp,source_code\n";
    for (const auto& c : contracts) {
        out << (c.address ? c.address->to_string() : "") << ',' << encode_hex(c.bytecode) << ','
            << (c.block_number ? std::to_string(*c.block_number) : "") << ','
            << (c.timestamp ? std::to_string(to_unix_seconds(*c.timestamp)) : "") << ','
            << csv_escape(c.source.value_or("")) << '\n';
    }
}

}  // namespace vigil::ingest
