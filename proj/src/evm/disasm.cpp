#include "vigil/evm/disasm.hpp"

#include <algorithm>

#include "vigil/evm/opcodes.hpp"

namespace vigil::evm {

std::optional<std::size_t> metadata_start(std::span<const std::uint8_t> code) {
    if (code.size() < 4) return std::nullopt;
    const std::size_t len = (std::size_t{code[code.size() - 2]} << 8) | code[code.size() - 1];
    if (len < 2 || len + 2 > code.size()) return std::nullopt;
    const std::size_t start = code.size() - 2 - len;
    const std::uint8_t map_header = code[start];
    const std::uint8_t key_header = code[start + 1];
    if (map_header < 0xa1 || map_header > 0xa7) return std::nullopt;
    if (key_header < 0x60 || key_header > 0x77) return std::nullopt;
    return start;
}

InstructionList disassemble(std::span<const std::uint8_t> code) {
    InstructionList out;
    const auto meta = metadata_start(code);
    std::size_t pc = 0;
    while (pc < code.size()) {
        const std::uint8_t opcode = code[pc];
        const OpcodeInfo& info = opcode_info(opcode);
        Instruction ins;
        ins.offset = pc;
        ins.opcode = opcode;
        ins.mnemonic = info.mnemonic;
        ins.is_valid = info.valid;
        ins.in_metadata = meta && pc >= *meta;
        if (info.immediate_size > 0) {
            const std::size_t available = std::min<std::size_t>(info.immediate_size, code.size() - pc - 1);
            const auto first = code.begin() + static_cast<std::ptrdiff_t>(pc + 1);
            ins.push_data = Bytes(first, first + static_cast<std::ptrdiff_t>(available));
            ins.truncated = available < info.immediate_size;
        }
        pc += ins.size();
        out.push_back(std::move(ins));
    }
    return out;
}

std::set<std::size_t> jumpdests(std::span<const Instruction> instructions) {
    std::set<std::size_t> out;
    for (const auto& ins : instructions)
        if (ins.opcode == op::JUMPDEST) out.insert(ins.offset);
    return out;
}

std::optional<std::uint64_t> push_value(const Instruction& ins) {
    if (ins.opcode == op::PUSH0) return 0;
    if (!is_push(ins.opcode) || ins.truncated || !ins.push_data) return std::nullopt;
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < ins.push_data->size(); ++i) {
        const std::uint8_t b = (*ins.push_data)[i];
        if ((value >> 56) != 0) return std::nullopt;
        value = (value << 8) | b;
    }
    return value;
}

}  // namespace vigil::evm
