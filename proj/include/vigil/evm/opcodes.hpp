#pragma once

#include <cstdint>
#include <string_view>

namespace vigil::evm {

// Opcode values referenced by name elsewhere in the code base.
namespace op {
inline constexpr std::uint8_t STOP = 0x00;
inline constexpr std::uint8_t EQ = 0x14;
inline constexpr std::uint8_t ISZERO = 0x15;
inline constexpr std::uint8_t ORIGIN = 0x32;
inline constexpr std::uint8_t CALLER = 0x33;
inline constexpr std::uint8_t BLOCKHASH = 0x40;
inline constexpr std::uint8_t COINBASE = 0x41;
inline constexpr std::uint8_t TIMESTAMP = 0x42;
inline constexpr std::uint8_t NUMBER = 0x43;
inline constexpr std::uint8_t PREVRANDAO = 0x44;  // DIFFICULTY before the merge
inline constexpr std::uint8_t POP = 0x50;
inline constexpr std::uint8_t SLOAD = 0x54;
inline constexpr std::uint8_t SSTORE = 0x55;
inline constexpr std::uint8_t JUMP = 0x56;
inline constexpr std::uint8_t JUMPI = 0x57;
inline constexpr std::uint8_t JUMPDEST = 0x5b;
inline constexpr std::uint8_t PUSH0 = 0x5f;
inline constexpr std::uint8_t PUSH1 = 0x60;
inline constexpr std::uint8_t PUSH32 = 0x7f;
inline constexpr std::uint8_t CALL = 0xf1;
inline constexpr std::uint8_t CALLCODE = 0xf2;
inline constexpr std::uint8_t RETURN = 0xf3;
inline constexpr std::uint8_t DELEGATECALL = 0xf4;
inline constexpr std::uint8_t STATICCALL = 0xfa;
inline constexpr std::uint8_t REVERT = 0xfd;
inline constexpr std::uint8_t INVALID = 0xfe;
inline constexpr std::uint8_t SELFDESTRUCT = 0xff;
}  // namespace op

struct OpcodeInfo {
    std::string_view mnemonic;  // "INVALID" for unassigned bytes
    bool valid = false;         // assigned in the pinned (Shanghai) instruction set
    std::uint8_t immediate_size = 0;
};

/// Table lookup over the Shanghai instruction set (includes PUSH0).
const OpcodeInfo& opcode_info(std::uint8_t opcode);

constexpr bool is_push(std::uint8_t opcode) { return opcode >= op::PUSH1 && opcode <= op::PUSH32; }

constexpr bool is_call_family(std::uint8_t opcode) {
    return opcode == op::CALL || opcode == op::CALLCODE || opcode == op::DELEGATECALL ||
           opcode == op::STATICCALL;
}

}  // namespace vigil::evm
