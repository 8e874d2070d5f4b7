#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "vigil/core/contract.hpp"

namespace vigil::ingest {

struct InputFiles {
    std::optional<std::filesystem::path> hex_path;
    std::optional<std::filesystem::path> sol_path;
    std::optional<std::string> warning;  // set when nothing was written
};

/// Writes <id>.hex and/or <id>.sol into `dir`. Files are replaced atomically
/// and left untouched when their content is already current. Throws IoFailure.
InputFiles write_input_files(const Contract& contract, const std::filesystem::path& dir);

/// Reads a local .hex (bytecode) or .sol (source) file. Throws
/// UnsupportedInput for any other extension, FileUnreadable, or InvalidHex.
Contract load_local_file(const std::filesystem::path& path);

}  // namespace vigil::ingest
