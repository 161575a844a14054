#pragma once

// Integrity checks: hash-chain linkage, reference resolution, acyclicity.
// Violations are returned, never thrown; an empty list means ok.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chainorder/chain.hpp"

namespace chainorder {

enum class ViolationKind {
    BadChainId,          // chain id empty or not printable
    ChainMismatch,       // block stored under a chain it does not name
    HeightMismatch,      // blocks[k].height != k
    GenesisPrevHash,     // height 0 with nonzero prev_hash, or nonzero height with zero prev_hash
    PrevHashMismatch,    // prev_hash != predecessor's recomputed summary
    SummaryMismatch,     // stored summary_hash != recomputed summary
    SelfReference,       // accepted ref naming the block's own chain
    DuplicateReference,  // accepted ref listed twice in one block
    UnresolvedReference, // accepted ref does not resolve to any block
    DanglingPending,     // pending association with unknown endpoint or hash
    CyclicReferences,    // reference graph has a cycle
};

const char* to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string chain;                   // empty for snapshot-level findings
    std::optional<std::uint64_t> height;
    std::string detail;
};

std::string describe(const Violation& v);

// Structural checks for one chain: contiguous heights, genesis prev_hash,
// prev_hash linkage, per-block ref invariants, and that each stored
// summary_hash matches a recomputation from the block's fields.
std::vector<Violation> verify_chain(const Chain& chain);

// verify_chain over every chain, plus cross-chain checks: every accepted
// ref and pending association resolves (by recomputed summary), and the
// reference graph (intra-chain succession + resolved refs) is acyclic.
std::vector<Violation> verify_snapshot(const NetworkSnapshot& snapshot);

} // namespace chainorder
