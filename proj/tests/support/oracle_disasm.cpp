#include "support/oracle_disasm.hpp"

#include <sstream>

namespace oracle {

namespace {

// One row per high nibble; "-" marks an unassigned byte. PUSH/DUP/SWAP rows
// are generated.
const char* const kRows[16] = {
    "STOP ADD MUL SUB DIV SDIV MOD SMOD ADDMOD MULMOD EXP SIGNEXTEND - - - -",
    "LT GT SLT SGT EQ ISZERO AND OR XOR NOT BYTE SHL SHR SAR - -",
    "KECCAK256 - - - - - - - - - - - - - - -",
    "ADDRESS BALANCE ORIGIN CALLER CALLVALUE CALLDATALOAD CALLDATASIZE CALLDATACOPY CODESIZE CODECOPY "
    "GASPRICE EXTCODESIZE EXTCODECOPY RETURNDATASIZE RETURNDATACOPY EXTCODEHASH",
    "BLOCKHASH COINBASE TIMESTAMP NUMBER PREVRANDAO GASLIMIT CHAINID SELFBALANCE BASEFEE - - - - - - -",
    "POP MLOAD MSTORE MSTORE8 SLOAD SSTORE JUMP JUMPI PC MSIZE GAS JUMPDEST - - - PUSH0",
    nullptr,
    nullptr,
    nullptr,
    nullptr,
    "LOG0 LOG1 LOG2 LOG3 LOG4 - - - - - - - - - - -",
    "- - - - - - - - - - - - - - - -",
    "- - - - - - - - - - - - - - - -",
    "- - - - - - - - - - - - - - - -",
    "- - - - - - - - - - - - - - - -",
    "CREATE CALL CALLCODE RETURN DELEGATECALL CREATE2 - - - - STATICCALL - - REVERT INVALID SELFDESTRUCT",
};

std::string cell(std::uint8_t opcode) {
    const int row = opcode >> 4;
    const int col = opcode & 0xf;
    if (row == 6 || row == 7) return "PUSH" + std::to_string(opcode - 0x5f);
    if (row == 8) return "DUP" + std::to_string(col + 1);
    if (row == 9) return "SWAP" + std::to_string(col + 1);
    std::istringstream in(kRows[row]);
    std::string word;
    for (int i = 0; i <= col; ++i) in >> word;
    return word;
}

const std::vector<std::string>& grid() {
    static const std::vector<std::string> cells = [] {
        std::vector<std::string> v;
        for (int op = 0; op < 256; ++op) v.push_back(cell(static_cast<std::uint8_t>(op)));
        return v;
    }();
    return cells;
}

}  // namespace

std::string mnemonic(std::uint8_t opcode) {
    const auto& c = grid()[opcode];
    return c == "-" ? "INVALID" : c;
}

bool valid(std::uint8_t opcode) { return grid()[opcode] != "-"; }

int immediate_size(std::uint8_t opcode) { return (opcode >= 0x60 && opcode <= 0x7f) ? opcode - 0x5f : 0; }

int opcode_of(const std::string& name) {
    for (int op = 0; op < 256; ++op)
        if (valid(static_cast<std::uint8_t>(op)) && mnemonic(static_cast<std::uint8_t>(op)) == name) return op;
    return -1;
}

std::vector<Decoded> decode(const std::vector<std::uint8_t>& code) {
    std::vector<Decoded> out;
    std::size_t i = 0;
    while (i < code.size()) {
        Decoded d;
        d.offset = i;
        d.opcode = code[i];
        d.mnemonic = mnemonic(code[i]);
        d.valid = valid(code[i]);
        const int want = immediate_size(code[i]);
        ++i;
        if (want > 0) {
            d.has_data = true;
            for (int k = 0; k < want && i < code.size(); ++k) d.data.push_back(code[i++]);
            d.truncated = static_cast<int>(d.data.size()) < want;
        }
        out.push_back(d);
    }
    return out;
}

}  // namespace oracle
