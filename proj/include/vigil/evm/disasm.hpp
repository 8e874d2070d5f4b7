#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "vigil/core/hex.hpp"

namespace vigil::evm {

struct Instruction {
    std::size_t offset = 0;
    std::uint8_t opcode = 0;
    std::string_view mnemonic;
    std::optional<Bytes> push_data;  // PUSH1..PUSH32 only
    bool is_valid = true;
    bool truncated = false;    // PUSH operand ran past the end of code
    bool in_metadata = false;  // inside the compiler-appended CBOR trailer

    std::size_t size() const { return 1 + (push_data ? push_data->size() : 0); }

    friend bool operator==(const Instruction&, const Instruction&) = default;
};

using InstructionList = std::vector<Instruction>;

/// Start offset of the compiler metadata trailer, if the code ends with one.
/// The last two bytes hold the big-endian length of a CBOR map that precedes
/// them; the map must open with a map header (0xa1..0xa7) followed by a
/// text-string key header.
std::optional<std::size_t> metadata_start(std::span<const std::uint8_t> code);

/// Total: every byte is consumed exactly once and PUSH operands are never
/// decoded as opcodes. Unknown bytes become invalid "INVALID" instructions;
/// a PUSH running off the end keeps its partial operand and is marked truncated.
InstructionList disassemble(std::span<const std::uint8_t> code);

/// Offsets of real JUMPDEST instructions (never push data).
std::set<std::size_t> jumpdests(std::span<const Instruction> instructions);

/// Value of a complete PUSH0..PUSH32 operand that fits in 64 bits.
std::optional<std::uint64_t> push_value(const Instruction& ins);

}  // namespace vigil::evm
