#include "vigil/evm/cfg.hpp"

#include <algorithm>

#include "vigil/evm/opcodes.hpp"

namespace vigil::evm {

std::string_view to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::fall_through: return "fall_through";
        case EdgeKind::jump: return "jump";
        case EdgeKind::branch_true: return "branch_true";
        case EdgeKind::branch_false: return "branch_false";
    }
    return "fall_through";
}

bool is_terminator(const Instruction& ins) {
    if (!ins.is_valid) return true;
    switch (ins.opcode) {
        case op::JUMP:
        case op::JUMPI:
        case op::STOP:
        case op::RETURN:
        case op::REVERT:
        case op::SELFDESTRUCT:
        case op::INVALID:
            return true;
        default:
            return false;
    }
}

std::span<const Instruction> Cfg::block_instructions(BlockId id) const {
    const auto& b = blocks_.at(id);
    return std::span(instructions_).subspan(b.first, b.last - b.first);
}

std::optional<BlockId> Cfg::block_at(std::size_t offset) const {
    const auto it = std::lower_bound(blocks_.begin(), blocks_.end(), offset,
                                     [](const BasicBlock& b, std::size_t off) { return b.start < off; });
    if (it == blocks_.end() || it->start != offset) return std::nullopt;
    return it->id;
}

BlockId Cfg::block_of_index(std::size_t index) const {
    const auto it = std::upper_bound(blocks_.begin(), blocks_.end(), index,
                                     [](std::size_t i, const BasicBlock& b) { return i < b.first; });
    return std::prev(it)->id;
}

bool Cfg::imprecise() const {
    return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.imprecise; });
}

Cfg build_cfg(InstructionList instructions) {
    Cfg cfg;
    cfg.instructions_ = std::move(instructions);
    const auto& ins = cfg.instructions_;

    for (std::size_t i = 0; i < ins.size(); ++i) {
        const bool starts_block =
            i == 0 || ins[i].opcode == op::JUMPDEST || is_terminator(ins[i - 1]);
        if (starts_block) {
            if (!cfg.blocks_.empty()) cfg.blocks_.back().last = i;
            cfg.blocks_.push_back(BasicBlock{cfg.blocks_.size(), ins[i].offset, ins[i].offset, i, i});
        }
        cfg.blocks_.back().end = ins[i].offset;
    }
    if (!cfg.blocks_.empty()) cfg.blocks_.back().last = ins.size();

    std::vector<BlockId> jumpdest_blocks;
    for (const auto& b : cfg.blocks_)
        if (ins[b.first].opcode == op::JUMPDEST) jumpdest_blocks.push_back(b.id);

    const auto add_jump_edges = [&](const BasicBlock& b, EdgeKind kind) {
        const std::size_t jump_index = b.last - 1;
        std::optional<std::uint64_t> target;
        if (jump_index > b.first) target = push_value(ins[jump_index - 1]);
        if (target) {
            // A constant that does not land on a JUMPDEST aborts at runtime: no edge.
            if (const auto dest = cfg.block_at(*target); dest && ins[cfg.blocks_[*dest].first].opcode == op::JUMPDEST)
                cfg.edges_.push_back(Edge{b.id, *dest, kind, false});
            return;
        }
        for (BlockId dest : jumpdest_blocks) cfg.edges_.push_back(Edge{b.id, dest, kind, true});
    };

    for (const auto& b : cfg.blocks_) {
        const Instruction& tail = ins[b.last - 1];
        const bool has_next = b.id + 1 < cfg.blocks_.size();
        if (tail.opcode == op::JUMP && tail.is_valid) {
            add_jump_edges(b, EdgeKind::jump);
        } else if (tail.opcode == op::JUMPI && tail.is_valid) {
            if (has_next) cfg.edges_.push_back(Edge{b.id, b.id + 1, EdgeKind::branch_false, false});
            add_jump_edges(b, EdgeKind::branch_true);
        } else if (!is_terminator(tail) && has_next) {
            cfg.edges_.push_back(Edge{b.id, b.id + 1, EdgeKind::fall_through, false});
        }
    }

    cfg.successors_.assign(cfg.blocks_.size(), {});
    for (const auto& e : cfg.edges_) {
        auto& succ = cfg.successors_[e.from];
        if (std::find(succ.begin(), succ.end(), e.to) == succ.end()) succ.push_back(e.to);
    }
    return cfg;
}

}  // namespace vigil::evm
