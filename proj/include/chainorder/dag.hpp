#pragma once

// Happens-before DAG over block-creation events.
//
// Nodes are (chain, height) events. Edges are intra-chain succession
// (implicit, every (X,k) -> (X,k+1)) plus one cross edge per accepted
// association, from the referenced block to the accepting block.
// Transitive closure is never stored; each node instead carries a
// per-chain frontier (the highest block of every chain that reaches it),
// which answers reachability in O(1) because chains are total orders.

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "chainorder/chain.hpp"

namespace chainorder {

// One block-creation event.
struct EventId {
    ChainId chain;
    std::uint64_t height = 0;

    auto operator<=>(const EventId&) const = default;

    std::string label() const { return chain.value + ":" + std::to_string(height); }
};

using CrossEdge = std::pair<EventId, EventId>;

class HappensBeforeDag {
public:
    HappensBeforeDag() = default;

    // Builds from per-chain block counts plus cross-chain edges.
    // Throws UnknownEventError for out-of-range endpoints, SelfAssociationError
    // for same-chain cross edges, CyclicReferencesError if the result cycles.
    static HappensBeforeDag from_structure(const std::map<ChainId, std::uint64_t>& chain_lengths,
                                           std::vector<CrossEdge> cross_edges);

    std::size_t node_count() const { return total_nodes_; }
    bool contains(const EventId& e) const;

    const std::vector<ChainId>& chains() const { return chains_; }
    std::uint64_t chain_length(const ChainId& id) const;

    // Cross edges, sorted and deduplicated.
    const std::vector<CrossEdge>& cross_edges() const { return cross_edges_; }

    // Intra-chain edges followed by cross edges, both in deterministic order.
    std::vector<CrossEdge> all_edges() const;

    // --- flat node indexing (chains in sorted order, then height) ---
    std::uint32_t index_of(const EventId& e) const;  // throws UnknownEventError
    EventId event_at(std::uint32_t index) const;
    std::uint32_t chain_ordinal(const ChainId& id) const;  // throws UnknownEventError

    // reflexive reachability: true iff `from == to` or a directed path exists
    bool reaches(std::uint32_t from, std::uint32_t to) const;

    const std::vector<std::uint32_t>& cross_predecessors(std::uint32_t index) const {
        return cross_in_[index];
    }
    const std::vector<std::uint32_t>& cross_successors(std::uint32_t index) const {
        return cross_out_[index];
    }

private:
    void build_reach();

    std::vector<ChainId> chains_;            // sorted ascending by id bytes
    std::vector<std::uint64_t> lengths_;
    std::vector<std::uint32_t> offsets_;     // flat index of (chain, 0)
    std::vector<std::uint32_t> node_chain_;  // flat index -> chain ordinal
    std::map<ChainId, std::uint32_t> ordinals_;
    std::size_t total_nodes_ = 0;

    std::vector<CrossEdge> cross_edges_;
    std::vector<std::vector<std::uint32_t>> cross_in_;
    std::vector<std::vector<std::uint32_t>> cross_out_;

    // reach_[v][c]: highest height of chain c with a path into v (self
    // included), or -1 when chain c does not reach v.
    std::vector<std::vector<std::int64_t>> reach_;
};

// Derives the DAG from a snapshot. The snapshot must verify cleanly;
// otherwise InvalidSnapshotError carries the violation list.
HappensBeforeDag build_dag(const NetworkSnapshot& snapshot);

} // namespace chainorder
