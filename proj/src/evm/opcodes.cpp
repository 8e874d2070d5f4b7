#include "vigil/evm/opcodes.hpp"

#include <array>
#include <utility>

namespace vigil::evm {

namespace {

constexpr std::string_view kPushNames[] = {
    "PUSH1",  "PUSH2",  "PUSH3",  "PUSH4",  "PUSH5",  "PUSH6",  "PUSH7",  "PUSH8",
    "PUSH9",  "PUSH10", "PUSH11", "PUSH12", "PUSH13", "PUSH14", "PUSH15", "PUSH16",
    "PUSH17", "PUSH18", "PUSH19", "PUSH20", "PUSH21", "PUSH22", "PUSH23", "PUSH24",
    "PUSH25", "PUSH26", "PUSH27", "PUSH28", "PUSH29", "PUSH30", "PUSH31", "PUSH32"};
constexpr std::string_view kDupNames[] = {"DUP1",  "DUP2",  "DUP3",  "DUP4",  "DUP5",  "DUP6",
                                          "DUP7",  "DUP8",  "DUP9",  "DUP10", "DUP11", "DUP12",
                                          "DUP13", "DUP14", "DUP15", "DUP16"};
constexpr std::string_view kSwapNames[] = {"SWAP1",  "SWAP2",  "SWAP3",  "SWAP4",  "SWAP5",  "SWAP6",
                                           "SWAP7",  "SWAP8",  "SWAP9",  "SWAP10", "SWAP11", "SWAP12",
                                           "SWAP13", "SWAP14", "SWAP15", "SWAP16"};
constexpr std::string_view kLogNames[] = {"LOG0", "LOG1", "LOG2", "LOG3", "LOG4"};

constexpr std::pair<std::uint8_t, std::string_view> kNamed[] = {
    {0x00, "STOP"},         {0x01, "ADD"},          {0x02, "MUL"},
    {0x03, "SUB"},          {0x04, "DIV"},          {0x05, "SDIV"},
    {0x06, "MOD"},          {0x07, "SMOD"},         {0x08, "ADDMOD"},
    {0x09, "MULMOD"},       {0x0a, "EXP"},          {0x0b, "SIGNEXTEND"},
    {0x10, "LT"},           {0x11, "GT"},           {0x12, "SLT"},
    {0x13, "SGT"},          {0x14, "EQ"},           {0x15, "ISZERO"},
    {0x16, "AND"},          {0x17, "OR"},           {0x18, "XOR"},
    {0x19, "NOT"},          {0x1a, "BYTE"},         {0x1b, "SHL"},
    {0x1c, "SHR"},          {0x1d, "SAR"},          {0x20, "KECCAK256"},
    {0x30, "ADDRESS"},      {0x31, "BALANCE"},      {0x32, "ORIGIN"},
    {0x33, "CALLER"},       {0x34, "CALLVALUE"},    {0x35, "CALLDATALOAD"},
    {0x36, "CALLDATASIZE"}, {0x37, "CALLDATACOPY"}, {0x38, "CODESIZE"},
    {0x39, "CODECOPY"},     {0x3a, "GASPRICE"},     {0x3b, "EXTCODESIZE"},
    {0x3c, "EXTCODECOPY"},  {0x3d, "RETURNDATASIZE"}, {0x3e, "RETURNDATACOPY"},
    {0x3f, "EXTCODEHASH"},  {0x40, "BLOCKHASH"},    {0x41, "COINBASE"},
    {0x42, "TIMESTAMP"},    {0x43, "NUMBER"},       {0x44, "PREVRANDAO"},
    {0x45, "GASLIMIT"},     {0x46, "CHAINID"},      {0x47, "SELFBALANCE"},
    {0x48, "BASEFEE"},      {0x50, "POP"},          {0x51, "MLOAD"},
    {0x52, "MSTORE"},       {0x53, "MSTORE8"},      {0x54, "SLOAD"},
    {0x55, "SSTORE"},       {0x56, "JUMP"},         {0x57, "JUMPI"},
    {0x58, "PC"},           {0x59, "MSIZE"},        {0x5a, "GAS"},
    {0x5b, "JUMPDEST"},     {0x5f, "PUSH0"},        {0xf0, "CREATE"},
    {0xf1, "CALL"},         {0xf2, "CALLCODE"},     {0xf3, "RETURN"},
    {0xf4, "DELEGATECALL"}, {0xf5, "CREATE2"},      {0xfa, "STATICCALL"},
    {0xfd, "REVERT"},       {0xff, "SELFDESTRUCT"},
};

constexpr std::array<OpcodeInfo, 256> build_table() {
    std::array<OpcodeInfo, 256> table{};
    for (auto& info : table) info = OpcodeInfo{"INVALID", false, 0};
    for (const auto& [code, name] : kNamed) table[code] = OpcodeInfo{name, true, 0};
    for (int i = 0; i < 32; ++i)
        table[0x60 + i] = OpcodeInfo{kPushNames[i], true, static_cast<std::uint8_t>(i + 1)};
    for (int i = 0; i < 16; ++i) {
        table[0x80 + i] = OpcodeInfo{kDupNames[i], true, 0};
        table[0x90 + i] = OpcodeInfo{kSwapNames[i], true, 0};
    }
    for (int i = 0; i < 5; ++i) table[0xa0 + i] = OpcodeInfo{kLogNames[i], true, 0};
    // 0xfe is the designated INVALID instruction: assigned, but always aborts.
    table[0xfe] = OpcodeInfo{"INVALID", true, 0};
    return table;
}

constexpr auto kTable = build_table();

}  // namespace

const OpcodeInfo& opcode_info(std::uint8_t opcode) { return kTable[opcode]; }

}  // namespace vigil::evm
