#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "vigil/core/contract.hpp"

namespace vigil::ingest {

inline constexpr const char* kCsvColumns[] = {"address", "bytecode", "block_number", "block_timestamp", "source_code"};

struct ContractBatch {
    std::vector<Contract> contracts;
    std::vector<std::pair<std::size_t, std::string>> rejected;  // (line, reason)
};

/// RFC 4180 record splitter. Quoted fields may span lines; CRLF and LF are
/// both accepted. Each record carries the 1-based line it starts on.
struct CsvRecord {
    std::size_t line = 0;
    std::vector<std::string> fields;
};
std::vector<CsvRecord> parse_csv(std::string_view text);

/// Throws FileUnreadable or MissingHeader. Bad rows never abort the batch.
ContractBatch import_csv(const std::filesystem::path& path);
ContractBatch import_csv_text(std::string_view text);

std::string csv_escape(std::string_view field);
void write_csv(std::ostream& out, const std::vector<Contract>& contracts);

}  // namespace vigil::ingest
