#pragma once

// Private single-writer hash chains and the association send/accept lifecycle.
//
// Every block commits to its predecessor through prev_hash and to the
// cross-chain references it packaged through its canonical encoding. The
// summary hash of that encoding is the value a chain shares when it sends
// an association to a peer.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chainorder/digest.hpp"
#include "chainorder/errors.hpp"

namespace chainorder {

// Short printable identifier of a privately owned chain.
struct ChainId {
    std::string value;

    auto operator<=>(const ChainId&) const = default;
};

// Nonempty, no control characters or spaces.
bool valid_chain_id(std::string_view id);

// Reference to a specific block of another chain, identified by the summary
// hash that chain shared. Natural ordering (chain id bytes, hash bytes) is
// the canonical encoding order.
struct AssociationRef {
    ChainId from_chain;
    Digest from_block_hash;

    auto operator<=>(const AssociationRef&) const = default;
};

// An offered association that the recipient has not yet packaged or dropped.
struct PendingAssociation {
    ChainId from_chain;
    Digest from_block_hash;
    ChainId to_chain;
    std::int64_t sent_at = 0;

    auto operator<=>(const PendingAssociation&) const = default;
};

struct Block {
    ChainId chain;
    std::uint64_t height = 0;
    Digest prev_hash;                  // all-zero for genesis
    Digest payload_hash;               // opaque commitment to private data
    std::vector<AssociationRef> accepted;  // canonically sorted, no duplicates
    std::optional<std::int64_t> local_timestamp;  // untrusted metadata, never hashed
    Digest summary_hash;               // hash of the canonical encoding

    bool operator==(const Block&) const = default;
};

struct Chain {
    ChainId id;
    std::vector<Block> blocks;             // heights 0..n-1, contiguous
    std::set<std::uint64_t> forgotten;     // payload content discarded, hash retained

    bool operator==(const Chain&) const = default;

    const Block* tip() const { return blocks.empty() ? nullptr : &blocks.back(); }
    std::size_t size() const { return blocks.size(); }
};

struct NetworkSnapshot {
    std::map<ChainId, Chain> chains;
    std::vector<PendingAssociation> pending;

    bool operator==(const NetworkSnapshot&) const = default;
};

// Accept everything regardless of when it was sent.
inline constexpr std::int64_t kAcceptAnyTick = std::numeric_limits<std::int64_t>::max();

// Canonical block encoding:
//   u32be(len(chain)) | chain utf-8 bytes
//   u64be(height)
//   prev_hash (32 bytes)
//   payload_hash (32 bytes)
//   u32be(count of accepted refs)
//   per ref, ascending by (chain id bytes, hash bytes):
//     u32be(len(from_chain)) | from_chain bytes | from_block_hash (32 bytes)
// local_timestamp is not encoded. Does not validate; hash_block does.
std::vector<std::uint8_t> canonical_block_encoding(const ChainId& chain,
                                                   std::uint64_t height,
                                                   const Digest& prev_hash,
                                                   const Digest& payload_hash,
                                                   std::span<const AssociationRef> accepted);

// SHA-256 of the canonical encoding.
// Throws DuplicateAssociationError / SelfAssociationError on invalid refs.
Digest hash_block(const ChainId& chain, std::uint64_t height,
                  const Digest& prev_hash, const Digest& payload_hash,
                  std::span<const AssociationRef> accepted);

// Appends a block to the chain. Validates the refs against the block
// invariants but not their resolution; use the snapshot overload when an
// ambient snapshot is available.
const Block& append_block(Chain& chain, const Digest& payload_hash,
                          std::vector<AssociationRef> accepted,
                          std::optional<std::int64_t> local_timestamp = std::nullopt);

// Same, but each ref must resolve to an existing block of its source chain.
// Throws UnknownChainError / UnknownReferenceError.
const Block& append_block(NetworkSnapshot& snapshot, const ChainId& chain,
                          const Digest& payload_hash,
                          std::vector<AssociationRef> accepted,
                          std::optional<std::int64_t> local_timestamp = std::nullopt);

// Offers the sender's latest block summary hash to `to`.
const PendingAssociation& send_association(NetworkSnapshot& snapshot,
                                           const ChainId& from, const ChainId& to,
                                           std::int64_t tick);

// Packages every pending association addressed to `to` that was sent before
// `now_tick` into one new block (deduplicated, canonically sorted) and removes
// the consumed entries. Zero eligible associations still produce a block.
const Block& accept_pending(NetworkSnapshot& snapshot, const ChainId& to,
                            const Digest& payload_hash,
                            std::int64_t now_tick = kAcceptAnyTick,
                            std::optional<std::int64_t> local_timestamp = std::nullopt);

// Discards every pending association addressed to `to`; returns how many.
std::size_t drop_pending(NetworkSnapshot& snapshot, const ChainId& to);

// Marks the payload content behind payload_hash as discarded. Hashes and
// verification results are unaffected. Idempotent.
Chain& forget_payload(Chain& chain, std::uint64_t height);

// Resolves a shared summary hash to the block of `chain` that carries it.
const Block* find_block(const NetworkSnapshot& snapshot, const ChainId& chain,
                        const Digest& summary_hash);

} // namespace chainorder
