#include "vigil/ingest/inputs.hpp"

#include <unistd.h>

#include <atomic>
#include <fstream>
#include <sstream>

#include "vigil/core/errors.hpp"

namespace vigil::ingest {

namespace {

std::optional<std::string> slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomically(const std::filesystem::path& target, const std::string& content) {
    if (slurp(target) == content) return;
    static std::atomic<unsigned> counter{0};
    auto tmp = target;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoFailure("cannot write " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoFailure("cannot move input file into place at " + target.string());
    }
}

}  // namespace

InputFiles write_input_files(const Contract& contract, const std::filesystem::path& dir) {
    InputFiles out;
    if (contract.empty()) {
        out.warning = "contract has neither bytecode nor source; no input files written";
        return out;
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (!std::filesystem::is_directory(dir)) throw IoFailure("inputs directory " + dir.string() + " is unavailable");

    const auto id = contract_id(contract);
    if (!contract.bytecode.empty()) {
        out.hex_path = dir / (id + ".hex");
        write_atomically(*out.hex_path, encode_hex(contract.bytecode));
    }
    if (contract.source_available()) {
        out.sol_path = dir / (id + ".sol");
        write_atomically(*out.sol_path, *contract.source);
    }
    return out;
}

Contract load_local_file(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext != ".hex" && ext != ".sol")
        throw UnsupportedInput("unsupported file extension '" + ext + "' for " + path.string() +
                               "; expected .hex or .sol");
    const auto text = slurp(path);
    if (!text) throw FileUnreadable("cannot read " + path.string());
    Contract c;
    c.origin = Origin::local_file;
    if (ext == ".hex") c.bytecode = decode_hex(*text);
    else c.source = *text;
    return c;
}

}  // namespace vigil::ingest
