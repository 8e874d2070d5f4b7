#pragma once

#include <span>
#include <string_view>

#include "vigil/core/contract.hpp"
#include "vigil/core/finding.hpp"
#include "vigil/detect/registry.hpp"
#include "vigil/evm/cfg.hpp"

namespace vigil::detect {

// Bytecode heuristics. Instructions flagged in_metadata never trigger.

/// High severity at every CALL from which an SSTORE is reachable, later in
/// the same block or along any CFG path.
FindingList detect_reentrancy(const evm::Cfg& cfg);

/// Per block containing TIMESTAMP: medium if the block also ends in or
/// contains JUMPI, info otherwise.
FindingList detect_time_dependence(const evm::Cfg& cfg);

/// BLOCKHASH, or two or more distinct block-derived entropy opcodes.
FindingList detect_bad_randomness(std::span<const evm::Instruction> instructions);

/// Per block containing ORIGIN: high when EQ is in the same block, else info.
FindingList detect_tx_origin(const evm::Cfg& cfg);

/// Call-family instruction whose status is immediately POPped.
FindingList detect_unchecked_call(std::span<const evm::Instruction> instructions);

/// Info findings per SELFDESTRUCT and DELEGATECALL instruction.
FindingList detect_opcode_usage(std::span<const evm::Instruction> instructions);

/// Low severity when every `pragma solidity` admits only versions below the
/// floor; info when the pragma is missing or unreadable.
FindingList detect_outdated_pragma(std::string_view source, const Version& floor = Version{0, 8, 0});

/// Info when some CFG path carries at least `min_depth` call-family
/// instructions (a cycle through a call counts as unbounded).
FindingList detect_call_depth(const evm::Cfg& cfg, int min_depth = 3);

/// Runs every enabled detector. Findings are ordered by (detector id,
/// location); a detector that throws contributes a single info
/// "detector-error" finding instead.
FindingList run_all(const Contract& contract, const evm::Cfg& cfg, const DetectorRegistry& registry);

/// disassemble -> build_cfg -> run_all.
FindingList analyze(const Contract& contract, const DetectorRegistry& registry);

}  // namespace vigil::detect
