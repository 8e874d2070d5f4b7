#pragma once

// Reference decoder used only by tests. It shares nothing with the library's
// opcode table or disassembler: the mnemonic grid below was transcribed
// separately and immediates are derived arithmetically.

#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

struct Decoded {
    std::size_t offset = 0;
    std::uint8_t opcode = 0;
    std::string mnemonic;
    bool has_data = false;
    std::vector<std::uint8_t> data;
    bool valid = false;
    bool truncated = false;
};

std::string mnemonic(std::uint8_t opcode);
bool valid(std::uint8_t opcode);
int immediate_size(std::uint8_t opcode);
int opcode_of(const std::string& mnemonic);  // -1 when unknown

std::vector<Decoded> decode(const std::vector<std::uint8_t>& code);

}  // namespace oracle
