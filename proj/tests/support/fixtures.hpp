#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vigil/evm/cfg.hpp"

namespace fixtures {

using Bytes = std::vector<std::uint8_t>;

/// Programs of 1..max_blocks basic blocks (every non-entry block opens with
/// JUMPDEST) mixing CALL/SSTORE bodies with resolved, unresolved and
/// conditional jumps. Deterministic for a given seed.
std::vector<Bytes> random_structured_programs(std::uint64_t seed, int count, int max_blocks = 8);

/// Exhaustive simple-path enumeration over the CFG edges: offsets of every
/// live CALL from which some path reaches a live SSTORE.
std::vector<std::size_t> oracle_reentrancy_offsets(const vigil::evm::Cfg& cfg);

/// Programs whose trigger opcodes for every built-in detector occur only
/// inside PUSH operands. Pairs of (label, bytecode).
std::vector<std::pair<std::string, Bytes>> shielding_corpus();

}  // namespace fixtures
