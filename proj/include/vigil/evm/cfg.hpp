#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vigil/evm/disasm.hpp"

namespace vigil::evm {

using BlockId = std::size_t;

struct BasicBlock {
    BlockId id = 0;
    std::size_t start = 0;  // offset of first instruction
    std::size_t end = 0;    // offset of last instruction
    std::size_t first = 0;  // index range [first, last) into Cfg::instructions()
    std::size_t last = 0;
};

enum class EdgeKind { fall_through, jump, branch_true, branch_false };

std::string_view to_string(EdgeKind k);

struct Edge {
    BlockId from = 0;
    BlockId to = 0;
    EdgeKind kind = EdgeKind::fall_through;
    bool imprecise = false;  // added because the jump target was not a push constant

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Basic-block graph over a disassembled program. Blocks split at JUMPDESTs
/// and after terminators (JUMP, JUMPI, STOP, RETURN, REVERT, SELFDESTRUCT,
/// INVALID). Jump targets are resolved only from a PUSH immediately
/// preceding the jump in the same block; otherwise the jump fans out to
/// every JUMPDEST block and the edges are marked imprecise.
class Cfg {
public:
    Cfg() = default;

    const InstructionList& instructions() const { return instructions_; }
    const std::vector<BasicBlock>& blocks() const { return blocks_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::optional<BlockId> entry() const {
        return blocks_.empty() ? std::nullopt : std::optional<BlockId>(0);
    }

    std::span<const Instruction> block_instructions(BlockId id) const;
    const std::vector<BlockId>& successors(BlockId id) const { return successors_[id]; }

    /// Block starting at the given offset, if any.
    std::optional<BlockId> block_at(std::size_t offset) const;
    /// Block containing the instruction with the given index.
    BlockId block_of_index(std::size_t index) const;

    bool imprecise() const;

private:
    friend Cfg build_cfg(InstructionList instructions);

    InstructionList instructions_;
    std::vector<BasicBlock> blocks_;
    std::vector<Edge> edges_;
    std::vector<std::vector<BlockId>> successors_;
};

bool is_terminator(const Instruction& ins);

Cfg build_cfg(InstructionList instructions);

}  // namespace vigil::evm
