#include "chainorder/verify.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace chainorder {

const char* to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::BadChainId: return "bad-chain-id";
        case ViolationKind::ChainMismatch: return "chain-mismatch";
        case ViolationKind::HeightMismatch: return "height-mismatch";
        case ViolationKind::GenesisPrevHash: return "genesis-prev-hash";
        case ViolationKind::PrevHashMismatch: return "prev-hash-mismatch";
        case ViolationKind::SummaryMismatch: return "summary-mismatch";
        case ViolationKind::SelfReference: return "self-reference";
        case ViolationKind::DuplicateReference: return "duplicate-reference";
        case ViolationKind::UnresolvedReference: return "unresolved-reference";
        case ViolationKind::DanglingPending: return "dangling-pending";
        case ViolationKind::CyclicReferences: return "cyclic-references";
    }
    return "unknown";
}

std::string describe(const Violation& v) {
    std::string s = to_string(v.kind);
    if (!v.chain.empty()) {
        s += " chain=" + v.chain;
        if (v.height) s += " height=" + std::to_string(*v.height);
    }
    if (!v.detail.empty()) s += ": " + v.detail;
    return s;
}

namespace {

Digest recomputed_summary(const Block& b) {
    return sha256(std::span<const std::uint8_t>(canonical_block_encoding(
        b.chain, b.height, b.prev_hash, b.payload_hash, b.accepted)));
}

void check_blocks(const Chain& chain, std::vector<Violation>& out) {
    if (!valid_chain_id(chain.id.value)) {
        out.push_back({ViolationKind::BadChainId, chain.id.value, std::nullopt,
                       "chain id must be nonempty printable text"});
    }
    for (std::size_t k = 0; k < chain.blocks.size(); ++k) {
        const Block& b = chain.blocks[k];
        auto at = [&](ViolationKind kind, std::string detail) {
            out.push_back({kind, chain.id.value, b.height, std::move(detail)});
        };

        if (b.chain != chain.id) {
            at(ViolationKind::ChainMismatch,
               "block names chain '" + b.chain.value + "'");
        }
        if (b.height != k) {
            out.push_back({ViolationKind::HeightMismatch, chain.id.value, k,
                           "stored height " + std::to_string(b.height)});
        }
        if ((b.height == 0) != b.prev_hash.is_zero()) {
            at(ViolationKind::GenesisPrevHash,
               b.height == 0 ? "genesis prev_hash must be all zeros"
                             : "non-genesis block with zero prev_hash");
        }
        if (k > 0 && b.prev_hash != recomputed_summary(chain.blocks[k - 1])) {
            at(ViolationKind::PrevHashMismatch,
               "prev_hash does not match predecessor summary");
        }

        for (std::size_t i = 0; i < b.accepted.size(); ++i) {
            if (b.accepted[i].from_chain == b.chain) {
                at(ViolationKind::SelfReference,
                   "ref " + std::to_string(i) + " names the block's own chain");
            }
            for (std::size_t j = i + 1; j < b.accepted.size(); ++j) {
                if (b.accepted[i] == b.accepted[j]) {
                    at(ViolationKind::DuplicateReference,
                       "ref from chain '" + b.accepted[i].from_chain.value + "'");
                    break;
                }
            }
        }

        if (b.summary_hash != recomputed_summary(b)) {
            at(ViolationKind::SummaryMismatch,
               "stored summary does not match recomputed encoding hash");
        }
    }
}

} // namespace

std::vector<Violation> verify_chain(const Chain& chain) {
    std::vector<Violation> out;
    check_blocks(chain, out);
    return out;
}

std::vector<Violation> verify_snapshot(const NetworkSnapshot& snapshot) {
    std::vector<Violation> out;

    // References resolve against the summaries the blocks claim. Claims that
    // disagree with the recomputed encoding are reported by check_blocks, and
    // the cycle check below runs over the claimed structure, so a forged
    // snapshot cannot smuggle a cycle past verification by inventing hashes.
    std::map<ChainId, std::map<Digest, std::uint64_t>> index;
    for (const auto& [id, chain] : snapshot.chains) {
        if (id != chain.id) {
            out.push_back({ViolationKind::ChainMismatch, id.value, std::nullopt,
                           "chain stored under key '" + id.value + "' names '" +
                               chain.id.value + "'"});
        }
        check_blocks(chain, out);
        for (const Block& b : chain.blocks) {
            index[id][b.summary_hash] = b.height;
        }
    }

    // Node numbering for the cycle check: (chain ordinal, height) -> id.
    std::vector<std::pair<const ChainId*, const Chain*>> chains;
    std::map<ChainId, std::size_t> chain_ordinal;
    std::vector<std::size_t> offset;
    std::size_t node_count = 0;
    for (const auto& [id, chain] : snapshot.chains) {
        chain_ordinal[id] = chains.size();
        chains.emplace_back(&id, &chain);
        offset.push_back(node_count);
        node_count += chain.blocks.size();
    }

    std::vector<std::vector<std::size_t>> succ(node_count);
    std::vector<std::size_t> indegree(node_count, 0);
    auto add_edge = [&](std::size_t from, std::size_t to) {
        succ[from].push_back(to);
        ++indegree[to];
    };
    for (std::size_t c = 0; c < chains.size(); ++c) {
        for (std::size_t h = 1; h < chains[c].second->blocks.size(); ++h) {
            add_edge(offset[c] + h - 1, offset[c] + h);
        }
    }

    for (const auto& [id, chain] : snapshot.chains) {
        for (const Block& b : chain.blocks) {
            for (const AssociationRef& r : b.accepted) {
                auto chain_it = index.find(r.from_chain);
                if (chain_it == index.end()) {
                    out.push_back({ViolationKind::UnresolvedReference, id.value, b.height,
                                   "ref names unknown chain '" + r.from_chain.value + "'"});
                    continue;
                }
                auto block_it = chain_it->second.find(r.from_block_hash);
                if (block_it == chain_it->second.end()) {
                    out.push_back({ViolationKind::UnresolvedReference, id.value, b.height,
                                   "ref hash " + r.from_block_hash.to_hex() +
                                       " matches no block of chain '" + r.from_chain.value + "'"});
                    continue;
                }
                add_edge(offset[chain_ordinal[r.from_chain]] + block_it->second,
                         offset[chain_ordinal[id]] + b.height);
            }
        }
    }

    for (const PendingAssociation& p : snapshot.pending) {
        auto describe_pending = [&]() {
            return "pending " + p.from_chain.value + " -> " + p.to_chain.value;
        };
        if (p.from_chain == p.to_chain) {
            out.push_back({ViolationKind::DanglingPending, p.to_chain.value, std::nullopt,
                           describe_pending() + ": self-association"});
            continue;
        }
        if (!snapshot.chains.contains(p.to_chain)) {
            out.push_back({ViolationKind::DanglingPending, p.to_chain.value, std::nullopt,
                           describe_pending() + ": unknown recipient"});
        }
        auto chain_it = index.find(p.from_chain);
        if (chain_it == index.end()) {
            out.push_back({ViolationKind::DanglingPending, p.from_chain.value, std::nullopt,
                           describe_pending() + ": unknown sender"});
        } else if (!chain_it->second.contains(p.from_block_hash)) {
            out.push_back({ViolationKind::DanglingPending, p.from_chain.value, std::nullopt,
                           describe_pending() + ": hash " + p.from_block_hash.to_hex() +
                               " matches no block"});
        }
    }

    // Kahn's algorithm; any node never released sits on a cycle.
    std::deque<std::size_t> ready;
    for (std::size_t v = 0; v < node_count; ++v) {
        if (indegree[v] == 0) ready.push_back(v);
    }
    std::size_t released = 0;
    while (!ready.empty()) {
        std::size_t v = ready.front();
        ready.pop_front();
        ++released;
        for (std::size_t w : succ[v]) {
            if (--indegree[w] == 0) ready.push_back(w);
        }
    }
    if (released != node_count) {
        out.push_back({ViolationKind::CyclicReferences, "", std::nullopt,
                       std::to_string(node_count - released) +
                           " block(s) participate in a reference cycle"});
    }

    return out;
}

} // namespace chainorder
