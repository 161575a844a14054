#include "chainorder/chain.hpp"

#include <algorithm>

namespace chainorder {

bool valid_chain_id(std::string_view id) {
    if (id.empty()) return false;
    for (unsigned char c : id) {
        if (c <= 0x20 || c == 0x7f) return false;
    }
    return true;
}

namespace {

void put_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_u64be(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

void put_chain_id(std::vector<std::uint8_t>& out, const ChainId& id) {
    put_u32be(out, static_cast<std::uint32_t>(id.value.size()));
    out.insert(out.end(), id.value.begin(), id.value.end());
}

void validate_refs(const ChainId& chain, std::span<const AssociationRef> accepted) {
    for (std::size_t i = 0; i < accepted.size(); ++i) {
        if (accepted[i].from_chain == chain) {
            throw SelfAssociationError("block on chain '" + chain.value +
                                       "' references its own chain");
        }
        for (std::size_t j = i + 1; j < accepted.size(); ++j) {
            if (accepted[i] == accepted[j]) {
                throw DuplicateAssociationError(
                    "duplicate association ref from chain '" +
                    accepted[i].from_chain.value + "'");
            }
        }
    }
}

const Chain& chain_or_throw(const NetworkSnapshot& snapshot, const ChainId& id) {
    auto it = snapshot.chains.find(id);
    if (it == snapshot.chains.end()) {
        throw UnknownChainError("unknown chain '" + id.value + "'");
    }
    return it->second;
}

} // namespace

std::vector<std::uint8_t> canonical_block_encoding(const ChainId& chain,
                                                   std::uint64_t height,
                                                   const Digest& prev_hash,
                                                   const Digest& payload_hash,
                                                   std::span<const AssociationRef> accepted) {
    std::vector<AssociationRef> refs(accepted.begin(), accepted.end());
    std::sort(refs.begin(), refs.end());

    std::vector<std::uint8_t> out;
    out.reserve(4 + chain.value.size() + 8 + 64 + 4 + refs.size() * 40);
    put_chain_id(out, chain);
    put_u64be(out, height);
    out.insert(out.end(), prev_hash.bytes.begin(), prev_hash.bytes.end());
    out.insert(out.end(), payload_hash.bytes.begin(), payload_hash.bytes.end());
    put_u32be(out, static_cast<std::uint32_t>(refs.size()));
    for (const AssociationRef& r : refs) {
        put_chain_id(out, r.from_chain);
        out.insert(out.end(), r.from_block_hash.bytes.begin(), r.from_block_hash.bytes.end());
    }
    return out;
}

Digest hash_block(const ChainId& chain, std::uint64_t height,
                  const Digest& prev_hash, const Digest& payload_hash,
                  std::span<const AssociationRef> accepted) {
    validate_refs(chain, accepted);
    return sha256(std::span<const std::uint8_t>(
        canonical_block_encoding(chain, height, prev_hash, payload_hash, accepted)));
}

const Block& append_block(Chain& chain, const Digest& payload_hash,
                          std::vector<AssociationRef> accepted,
                          std::optional<std::int64_t> local_timestamp) {
    std::sort(accepted.begin(), accepted.end());

    Block b;
    b.chain = chain.id;
    b.height = chain.blocks.size();
    b.prev_hash = chain.blocks.empty() ? Digest::zero() : chain.blocks.back().summary_hash;
    b.payload_hash = payload_hash;
    b.accepted = std::move(accepted);
    b.local_timestamp = local_timestamp;
    b.summary_hash = hash_block(b.chain, b.height, b.prev_hash, b.payload_hash, b.accepted);

    chain.blocks.push_back(std::move(b));
    return chain.blocks.back();
}

const Block& append_block(NetworkSnapshot& snapshot, const ChainId& chain,
                          const Digest& payload_hash,
                          std::vector<AssociationRef> accepted,
                          std::optional<std::int64_t> local_timestamp) {
    auto it = snapshot.chains.find(chain);
    if (it == snapshot.chains.end()) {
        throw UnknownChainError("unknown chain '" + chain.value + "'");
    }
    for (const AssociationRef& r : accepted) {
        if (!snapshot.chains.contains(r.from_chain)) {
            throw UnknownChainError("unknown chain '" + r.from_chain.value + "'");
        }
        if (find_block(snapshot, r.from_chain, r.from_block_hash) == nullptr) {
            throw UnknownReferenceError("association ref from chain '" +
                                        r.from_chain.value +
                                        "' does not resolve: " +
                                        r.from_block_hash.to_hex());
        }
    }
    return append_block(it->second, payload_hash, std::move(accepted), local_timestamp);
}

const PendingAssociation& send_association(NetworkSnapshot& snapshot,
                                           const ChainId& from, const ChainId& to,
                                           std::int64_t tick) {
    if (from == to) {
        throw SelfAssociationError("chain '" + from.value + "' cannot associate with itself");
    }
    const Chain& source = chain_or_throw(snapshot, from);
    chain_or_throw(snapshot, to);
    const Block* latest = source.tip();
    if (latest == nullptr) {
        throw EmptyChainError("chain '" + from.value + "' has no blocks to share");
    }
    snapshot.pending.push_back(PendingAssociation{from, latest->summary_hash, to, tick});
    return snapshot.pending.back();
}

const Block& accept_pending(NetworkSnapshot& snapshot, const ChainId& to,
                            const Digest& payload_hash, std::int64_t now_tick,
                            std::optional<std::int64_t> local_timestamp) {
    chain_or_throw(snapshot, to);

    std::vector<AssociationRef> refs;
    std::vector<PendingAssociation> remaining;
    remaining.reserve(snapshot.pending.size());
    for (const PendingAssociation& p : snapshot.pending) {
        if (p.to_chain == to && p.sent_at < now_tick) {
            refs.push_back(AssociationRef{p.from_chain, p.from_block_hash});
        } else {
            remaining.push_back(p);
        }
    }
    std::sort(refs.begin(), refs.end());
    refs.erase(std::unique(refs.begin(), refs.end()), refs.end());

    const Block& b = append_block(snapshot, to, payload_hash, std::move(refs), local_timestamp);
    snapshot.pending = std::move(remaining);
    return b;
}

std::size_t drop_pending(NetworkSnapshot& snapshot, const ChainId& to) {
    chain_or_throw(snapshot, to);
    std::size_t before = snapshot.pending.size();
    std::erase_if(snapshot.pending,
                  [&](const PendingAssociation& p) { return p.to_chain == to; });
    return before - snapshot.pending.size();
}

Chain& forget_payload(Chain& chain, std::uint64_t height) {
    if (height >= chain.blocks.size()) {
        throw UnknownBlockError("chain '" + chain.id.value + "' has no block at height " +
                                std::to_string(height));
    }
    chain.forgotten.insert(height);
    return chain;
}

const Block* find_block(const NetworkSnapshot& snapshot, const ChainId& chain,
                        const Digest& summary_hash) {
    auto it = snapshot.chains.find(chain);
    if (it == snapshot.chains.end()) return nullptr;
    for (const Block& b : it->second.blocks) {
        if (b.summary_hash == summary_hash) return &b;
    }
    return nullptr;
}

} // namespace chainorder
