#include "vigil/detect/detectors.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <stdexcept>

#include "vigil/evm/opcodes.hpp"

namespace vigil::detect {

namespace {

using evm::BlockId;
using evm::Cfg;
using evm::Instruction;
namespace op = evm::op;

bool live(const Instruction& ins, std::uint8_t opcode) { return ins.opcode == opcode && !ins.in_metadata; }

std::string hex_pc(std::size_t pc) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%zx", pc);
    return buf;
}

Finding make(VulnClass cls, Severity sev, std::string_view detector, std::optional<std::size_t> loc,
             std::string message) {
    return Finding{cls, sev, std::string(detector), loc, std::move(message)};
}

bool block_has(const Cfg& cfg, BlockId b, std::uint8_t opcode) {
    const auto body = cfg.block_instructions(b);
    return std::any_of(body.begin(), body.end(), [&](const Instruction& i) { return live(i, opcode); });
}

// Blocks reachable from the successors of `from` (so `from` itself only when on a cycle).
std::vector<bool> reachable_after(const Cfg& cfg, BlockId from) {
    std::vector<bool> seen(cfg.blocks().size(), false);
    std::vector<BlockId> stack(cfg.successors(from).begin(), cfg.successors(from).end());
    while (!stack.empty()) {
        const BlockId b = stack.back();
        stack.pop_back();
        if (seen[b]) continue;
        seen[b] = true;
        for (BlockId s : cfg.successors(b))
            if (!seen[s]) stack.push_back(s);
    }
    return seen;
}

// Iterative Tarjan; returns the component index of every block, in reverse
// topological order of the condensation (sinks first).
std::vector<std::size_t> strongly_connected(const Cfg& cfg, std::size_t& count) {
    const std::size_t n = cfg.blocks().size();
    constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
    std::vector<bool> on_stack(n, false);
    std::vector<BlockId> stack;
    std::size_t next = 0;
    count = 0;

    struct Frame {
        BlockId block;
        std::size_t child;
    };
    for (BlockId root = 0; root < n; ++root) {
        if (index[root] != kUnset) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = next++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& f = frames.back();
            const auto& succ = cfg.successors(f.block);
            if (f.child < succ.size()) {
                const BlockId w = succ[f.child++];
                if (index[w] == kUnset) {
                    index[w] = low[w] = next++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.block] = std::min(low[f.block], index[w]);
                }
                continue;
            }
            const BlockId v = f.block;
            if (low[v] == index[v]) {
                BlockId w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = count;
                } while (w != v);
                ++count;
            }
            frames.pop_back();
            if (!frames.empty()) low[frames.back().block] = std::min(low[frames.back().block], low[v]);
        }
    }
    return comp;
}

}  // namespace

FindingList detect_reentrancy(const Cfg& cfg) {
    FindingList out;
    const auto& blocks = cfg.blocks();
    std::vector<bool> has_sstore(blocks.size());
    for (const auto& b : blocks) has_sstore[b.id] = block_has(cfg, b.id, op::SSTORE);

    for (const auto& b : blocks) {
        const auto body = cfg.block_instructions(b.id);
        std::optional<bool> store_downstream;  // computed lazily per block
        for (std::size_t i = 0; i < body.size(); ++i) {
            if (!live(body[i], op::CALL)) continue;
            bool hit = std::any_of(body.begin() + static_cast<std::ptrdiff_t>(i) + 1, body.end(),
                                   [](const Instruction& x) { return live(x, op::SSTORE); });
            if (!hit) {
                if (!store_downstream) {
                    const auto seen = reachable_after(cfg, b.id);
                    store_downstream = false;
                    for (std::size_t k = 0; k < seen.size(); ++k)
                        if (seen[k] && has_sstore[k]) store_downstream = true;
                }
                hit = *store_downstream;
            }
            if (hit)
                out.push_back(make(VulnClass::Reentrancy, Severity::high, ids::reentrancy, body[i].offset,
                                   "CALL at " + hex_pc(body[i].offset) +
                                       " can be followed by SSTORE (state written after external call)"));
        }
    }
    return out;
}

FindingList detect_time_dependence(const Cfg& cfg) {
    FindingList out;
    for (const auto& b : cfg.blocks()) {
        const auto body = cfg.block_instructions(b.id);
        const auto ts = std::find_if(body.begin(), body.end(), [](const Instruction& x) { return live(x, op::TIMESTAMP); });
        if (ts == body.end()) continue;
        if (block_has(cfg, b.id, op::JUMPI))
            out.push_back(make(VulnClass::TimeRestrictions, Severity::medium, ids::time_dependence, ts->offset,
                               "TIMESTAMP at " + hex_pc(ts->offset) + " feeds a conditional branch"));
        else
            out.push_back(make(VulnClass::TimeRestrictions, Severity::info, ids::time_dependence, ts->offset,
                               "TIMESTAMP read at " + hex_pc(ts->offset) + " (not branched on in this block)"));
    }
    return out;
}

FindingList detect_bad_randomness(std::span<const Instruction> instructions) {
    const Instruction* blockhash = nullptr;
    const Instruction* first_source = nullptr;
    std::vector<std::uint8_t> distinct;
    for (const auto& ins : instructions) {
        if (ins.in_metadata) continue;
        if (ins.opcode == op::BLOCKHASH && !blockhash) blockhash = &ins;
        if (ins.opcode == op::TIMESTAMP || ins.opcode == op::NUMBER || ins.opcode == op::PREVRANDAO ||
            ins.opcode == op::COINBASE) {
            if (!first_source) first_source = &ins;
            if (std::find(distinct.begin(), distinct.end(), ins.opcode) == distinct.end())
                distinct.push_back(ins.opcode);
        }
    }
    if (blockhash)
        return {make(VulnClass::RandomNumbers, Severity::medium, ids::bad_randomness, blockhash->offset,
                     "BLOCKHASH at " + hex_pc(blockhash->offset) + " used as an entropy source")};
    if (distinct.size() >= 2)
        return {make(VulnClass::RandomNumbers, Severity::medium, ids::bad_randomness, first_source->offset,
                     std::to_string(distinct.size()) + " distinct block-derived values read (predictable entropy)")};
    return {};
}

FindingList detect_tx_origin(const Cfg& cfg) {
    FindingList out;
    for (const auto& b : cfg.blocks()) {
        const auto body = cfg.block_instructions(b.id);
        const auto origin = std::find_if(body.begin(), body.end(), [](const Instruction& x) { return live(x, op::ORIGIN); });
        if (origin == body.end()) continue;
        if (block_has(cfg, b.id, op::EQ))
            out.push_back(make(VulnClass::TxOriginAuth, Severity::high, ids::tx_origin, origin->offset,
                               "ORIGIN at " + hex_pc(origin->offset) + " compared with EQ (tx.origin authorization)"));
        else
            out.push_back(make(VulnClass::TxOriginAuth, Severity::info, ids::tx_origin, origin->offset,
                               "ORIGIN read at " + hex_pc(origin->offset)));
    }
    return out;
}

FindingList detect_unchecked_call(std::span<const Instruction> instructions) {
    FindingList out;
    for (std::size_t i = 0; i + 1 < instructions.size(); ++i) {
        const auto& call = instructions[i];
        if (call.in_metadata || !evm::is_call_family(call.opcode)) continue;
        if (!live(instructions[i + 1], op::POP)) continue;
        out.push_back(make(VulnClass::ExceptionDisorder, Severity::medium, ids::unchecked_call, call.offset,
                           std::string(call.mnemonic) + " at " + hex_pc(call.offset) + " has its success flag discarded"));
    }
    return out;
}

FindingList detect_opcode_usage(std::span<const Instruction> instructions) {
    FindingList out;
    for (const auto& ins : instructions) {
        if (live(ins, op::SELFDESTRUCT))
            out.push_back(make(VulnClass::SelfDestructUse, Severity::info, ids::selfdestruct_use, ins.offset,
                               "SELFDESTRUCT at " + hex_pc(ins.offset)));
        else if (live(ins, op::DELEGATECALL))
            out.push_back(make(VulnClass::DelegateCallUse, Severity::info, ids::delegatecall_use, ins.offset,
                               "DELEGATECALL at " + hex_pc(ins.offset)));
    }
    return out;
}

FindingList detect_outdated_pragma(std::string_view source, const Version& floor) {
    const auto pragmas = solidity_pragmas(source);
    if (pragmas.empty())
        return {make(VulnClass::OutdatedCompiler, Severity::info, ids::outdated_pragma, std::nullopt,
                     "no 'pragma solidity' directive")};
    for (const auto& text : pragmas) {
        const auto constraint = VersionConstraint::parse(text);
        if (!constraint || !constraint->satisfiable())
            return {make(VulnClass::OutdatedCompiler, Severity::info, ids::outdated_pragma, std::nullopt,
                         "malformed pragma: 'pragma solidity " + text + "'")};
        // Pragmas combine by intersection, so one outdated pragma bounds the whole file.
        if (!constraint->admits_at_least(floor))
            return {make(VulnClass::OutdatedCompiler, Severity::low, ids::outdated_pragma, std::nullopt,
                         "compiler constraint '" + text + "' only admits versions below " + floor.to_string())};
    }
    return {};
}

FindingList detect_call_depth(const Cfg& cfg, int min_depth) {
    const auto entry = cfg.entry();
    if (!entry) return {};
    const std::size_t n = cfg.blocks().size();
    std::size_t ncomp = 0;
    const auto comp = strongly_connected(cfg, ncomp);

    std::vector<long> weight(ncomp, 0);
    std::vector<std::size_t> members(ncomp, 0);
    std::vector<bool> cyclic(ncomp, false);
    for (BlockId b = 0; b < n; ++b) {
        ++members[comp[b]];
        for (const auto& ins : cfg.block_instructions(b))
            if (!ins.in_metadata && evm::is_call_family(ins.opcode)) ++weight[comp[b]];
        for (BlockId s : cfg.successors(b))
            if (s == b) cyclic[comp[b]] = true;
    }
    for (std::size_t c = 0; c < ncomp; ++c)
        if (members[c] > 1) cyclic[c] = true;

    constexpr long kUnbounded = std::numeric_limits<long>::max() / 4;
    // Tarjan numbers sinks first, so increasing component index is a valid
    // order for "longest path starting here".
    std::vector<std::vector<std::size_t>> comp_succ(ncomp);
    for (BlockId b = 0; b < n; ++b)
        for (BlockId s : cfg.successors(b))
            if (comp[s] != comp[b]) comp_succ[comp[b]].push_back(comp[s]);
    std::vector<long> longest(ncomp, 0);
    for (std::size_t c = 0; c < ncomp; ++c) {
        long best = 0;
        for (std::size_t s : comp_succ[c]) best = std::max(best, longest[s]);
        longest[c] = (cyclic[c] && weight[c] > 0) ? kUnbounded : std::min(kUnbounded, weight[c] + best);
    }
    const long depth = longest[comp[*entry]];
    if (depth < min_depth) return {};
    const std::string amount = depth >= kUnbounded ? "an unbounded number of" : std::to_string(depth);
    return {make(VulnClass::StackSize, Severity::info, ids::call_depth, std::nullopt,
                 "a single path performs " + amount + " external calls (call stack limit " +
                     std::to_string(kStackLimit) + ")")};
}

FindingList run_all(const Contract& contract, const Cfg& cfg, const DetectorRegistry& registry) {
    const auto& ins = cfg.instructions();
    const auto& config = registry.config();
    FindingList out;
    for (const auto& entry : registry.entries()) {
        if (!entry.enabled) continue;
        const std::string_view id = entry.id;
        try {
            FindingList found;
            if (id == ids::outdated_pragma) {
                if (contract.source_available()) found = detect_outdated_pragma(*contract.source, config.pragma_floor);
            } else if (ins.empty()) {
                continue;
            } else if (id == ids::reentrancy) {
                found = detect_reentrancy(cfg);
            } else if (id == ids::time_dependence) {
                found = detect_time_dependence(cfg);
            } else if (id == ids::bad_randomness) {
                found = detect_bad_randomness(ins);
            } else if (id == ids::tx_origin) {
                found = detect_tx_origin(cfg);
            } else if (id == ids::unchecked_call) {
                found = detect_unchecked_call(ins);
            } else if (id == ids::selfdestruct_use || id == ids::delegatecall_use) {
                for (auto& f : detect_opcode_usage(ins))
                    if (f.detector == id) found.push_back(std::move(f));
            } else if (id == ids::call_depth) {
                found = detect_call_depth(cfg, config.call_chain_depth);
            }
            out.insert(out.end(), std::make_move_iterator(found.begin()), std::make_move_iterator(found.end()));
        } catch (const std::exception& e) {
            out.push_back(make(entry.vuln_class, Severity::info, id, std::nullopt,
                               std::string("detector-error: ") + e.what()));
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Finding& a, const Finding& b) {
        if (a.detector != b.detector) return a.detector < b.detector;
        return a.location < b.location;
    });
    return out;
}

FindingList analyze(const Contract& contract, const DetectorRegistry& registry) {
    const auto cfg = evm::build_cfg(evm::disassemble(contract.bytecode));
    return run_all(contract, cfg, registry);
}

}  // namespace vigil::detect
