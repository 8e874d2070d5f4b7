#include "support/fixtures.hpp"

#include <algorithm>
#include <functional>
#include <random>

#include "support/assembler.hpp"

namespace fixtures {

namespace {

constexpr std::uint8_t kCall = 0xf1, kSstore = 0x55, kJumpdest = 0x5b, kPush1 = 0x60, kJump = 0x56, kJumpi = 0x57;

enum class Tail { fall, stop, ret, revert, jump_const, jumpi_const, jump_dyn, jumpi_dyn };

}  // namespace

std::vector<Bytes> random_structured_programs(std::uint64_t seed, int count, int max_blocks) {
    std::mt19937_64 rng(seed);
    const std::vector<std::uint8_t> body_ops = {kCall, kSstore, 0x01 /*ADD*/, 0x50 /*POP*/, 0x54 /*SLOAD*/,
                                                0x80 /*DUP1*/, 0x33 /*CALLER*/, kCall, kSstore};
    std::vector<Bytes> out;
    for (int n = 0; n < count; ++n) {
        const int blocks = std::uniform_int_distribution<int>(1, max_blocks)(rng);
        std::vector<Bytes> bodies(blocks);
        std::vector<Tail> tails(blocks);
        std::vector<int> targets(blocks, 0);
        for (int b = 0; b < blocks; ++b) {
            const int len = std::uniform_int_distribution<int>(0, 4)(rng);
            for (int i = 0; i < len; ++i)
                bodies[b].push_back(body_ops[std::uniform_int_distribution<std::size_t>(0, body_ops.size() - 1)(rng)]);
            auto tail = static_cast<Tail>(std::uniform_int_distribution<int>(0, 7)(rng));
            if (tail == Tail::fall && b + 1 == blocks) tail = Tail::stop;
            tails[b] = tail;
            targets[b] = std::uniform_int_distribution<int>(0, blocks - 1)(rng);
        }
        // Layout: sizes are fixed (PUSH1 targets), so offsets are known up front.
        std::vector<std::size_t> start(blocks);
        std::size_t pc = 0;
        for (int b = 0; b < blocks; ++b) {
            start[b] = pc;
            pc += (b > 0 ? 1 : 0) + bodies[b].size();
            switch (tails[b]) {
                case Tail::fall: break;
                case Tail::jump_const:
                case Tail::jumpi_const: pc += 3; break;
                default: pc += 1; break;
            }
        }
        Bytes code;
        for (int b = 0; b < blocks; ++b) {
            if (b > 0) code.push_back(kJumpdest);
            code.insert(code.end(), bodies[b].begin(), bodies[b].end());
            switch (tails[b]) {
                case Tail::fall: break;
                case Tail::stop: code.push_back(0x00); break;
                case Tail::ret: code.push_back(0xf3); break;
                case Tail::revert: code.push_back(0xfd); break;
                case Tail::jump_const:
                    code.insert(code.end(), {kPush1, static_cast<std::uint8_t>(start[targets[b]]), kJump});
                    break;
                case Tail::jumpi_const:
                    code.insert(code.end(), {kPush1, static_cast<std::uint8_t>(start[targets[b]]), kJumpi});
                    break;
                case Tail::jump_dyn: code.push_back(kJump); break;
                case Tail::jumpi_dyn: code.push_back(kJumpi); break;
            }
        }
        out.push_back(std::move(code));
    }
    return out;
}

std::vector<std::size_t> oracle_reentrancy_offsets(const vigil::evm::Cfg& cfg) {
    const auto& blocks = cfg.blocks();
    const auto& ins = cfg.instructions();
    std::vector<std::vector<std::size_t>> succ(blocks.size());
    for (const auto& e : cfg.edges()) succ[e.from].push_back(e.to);

    const auto has_store = [&](std::size_t b, std::size_t from_index) {
        for (std::size_t i = from_index; i < blocks[b].last; ++i)
            if (ins[i].opcode == kSstore && !ins[i].in_metadata) return true;
        return false;
    };

    std::vector<std::size_t> out;
    for (const auto& b : blocks) {
        for (std::size_t i = b.first; i < b.last; ++i) {
            if (ins[i].opcode != kCall || ins[i].in_metadata) continue;
            bool found = has_store(b.id, i + 1);
            // Depth-first over every simple path leaving this block; a path may
            // close back onto the call's own block, which then counts in full.
            std::vector<bool> on_path(blocks.size(), false);
            std::function<void(std::size_t)> walk = [&](std::size_t at) {
                for (std::size_t next : succ[at]) {
                    if (found) return;
                    if (next == b.id) {
                        if (has_store(next, blocks[next].first)) found = true;
                        continue;
                    }
                    if (on_path[next]) continue;
                    if (has_store(next, blocks[next].first)) {
                        found = true;
                        return;
                    }
                    on_path[next] = true;
                    walk(next);
                    on_path[next] = false;
                }
            };
            if (!found) walk(b.id);
            if (found) out.push_back(ins[i].offset);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<std::string, Bytes>> shielding_corpus() {
    const std::vector<std::pair<std::string, std::string>> crafted = {
        {"selfdestruct byte", "PUSH1 0xff STOP"},
        {"delegatecall byte", "PUSH1 0xf4 STOP"},
        {"call then sstore", "PUSH2 0xf155 STOP"},
        {"call then pop", "PUSH2 0xf150 STOP"},
        {"staticcall then pop", "PUSH2 0xfa50 STOP"},
        {"callcode split across pushes", "PUSH1 0xf2 PUSH1 0x50 STOP"},
        {"timestamp and jumpi", "PUSH3 0x425700 STOP"},
        {"timestamp then branch opcode", "PUSH1 0x42 PUSH1 0x57 ADD STOP"},
        {"blockhash byte", "PUSH1 0x40 STOP"},
        {"four entropy sources", "PUSH4 0x42434441 STOP"},
        {"origin and eq", "PUSH2 0x3214 STOP"},
        {"origin alone", "PUSH1 0x32 STOP"},
        {"origin run in push20", "PUSH20 0x3214321432143214321432143214321432143214 POP STOP"},
        {"blockhash run in push16", "PUSH16 0x40404040404040404040404040404040 POP STOP"},
        {"call chain bytes", "PUSH3 0xf1f1f1 STOP"},
        {"every trigger in push8", "PUSH8 0x4241434440ff32f4 STOP"},
        {"delegatecall family in push5", "PUSH5 0xf4f2fa50ff STOP"},
        {"resolved jump to clean block", "PUSH1 0x03 JUMP JUMPDEST PUSH1 0xf1 PUSH1 0x55 STOP"},
        {"push32 full of triggers",
         "PUSH32 0xf155f150ff4042433214f4fa5041445755f1f1f1ff32144240f4f2fa505555 POP STOP"},
        {"truncated push32", "PUSH1 0x01 DATA:7fff"},
        {"truncated push3", "DATA:62f155"},
        {"triggers inside loop pushes", "JUMPDEST PUSH2 0xf155 POP PUSH1 0x00 JUMP"},
        {"push0 then push data", "PUSH0 PUSH2 0x42ff ADD STOP"},
    };
    std::vector<std::pair<std::string, Bytes>> out;
    for (const auto& [label, program] : crafted) out.emplace_back(label, testasm::assemble(program));

    // Generated: benign opcodes interleaved with pushes whose operands are
    // drawn only from trigger bytes.
    const std::vector<std::uint8_t> triggers = {0xf1, 0x55, 0x50, 0x42, 0x57, 0x40, 0x41, 0x43,
                                                0x44, 0x32, 0x14, 0xff, 0xf4, 0xf2, 0xfa};
    const std::vector<std::uint8_t> benign = {0x01, 0x02, 0x80, 0x90, 0x51, 0x52, 0x34, 0x5b, 0x36};
    std::mt19937_64 rng(20240601);
    for (int n = 0; n < 100; ++n) {
        Bytes code;
        const int pieces = std::uniform_int_distribution<int>(1, 12)(rng);
        for (int p = 0; p < pieces; ++p) {
            if (std::uniform_int_distribution<int>(0, 1)(rng)) {
                code.push_back(benign[std::uniform_int_distribution<std::size_t>(0, benign.size() - 1)(rng)]);
            } else {
                const int width = std::uniform_int_distribution<int>(1, 32)(rng);
                code.push_back(static_cast<std::uint8_t>(0x5f + width));
                for (int k = 0; k < width; ++k)
                    code.push_back(triggers[std::uniform_int_distribution<std::size_t>(0, triggers.size() - 1)(rng)]);
            }
        }
        code.push_back(0x00);
        out.emplace_back("generated #" + std::to_string(n), std::move(code));
    }
    return out;
}

}  // namespace fixtures
