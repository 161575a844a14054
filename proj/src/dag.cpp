#include "chainorder/dag.hpp"

#include <algorithm>
#include <deque>

#include "chainorder/verify.hpp"

namespace chainorder {

HappensBeforeDag HappensBeforeDag::from_structure(
    const std::map<ChainId, std::uint64_t>& chain_lengths,
    std::vector<CrossEdge> cross_edges) {
    HappensBeforeDag dag;
    for (const auto& [id, len] : chain_lengths) {
        dag.ordinals_[id] = static_cast<std::uint32_t>(dag.chains_.size());
        dag.chains_.push_back(id);
        dag.lengths_.push_back(len);
        dag.offsets_.push_back(static_cast<std::uint32_t>(dag.total_nodes_));
        dag.total_nodes_ += len;
    }
    dag.node_chain_.reserve(dag.total_nodes_);
    for (std::size_t c = 0; c < dag.chains_.size(); ++c) {
        dag.node_chain_.insert(dag.node_chain_.end(), dag.lengths_[c],
                               static_cast<std::uint32_t>(c));
    }

    std::sort(cross_edges.begin(), cross_edges.end());
    cross_edges.erase(std::unique(cross_edges.begin(), cross_edges.end()),
                      cross_edges.end());
    for (const CrossEdge& e : cross_edges) {
        if (e.first.chain == e.second.chain) {
            throw SelfAssociationError("cross edge within chain '" +
                                       e.first.chain.value + "'");
        }
    }
    dag.cross_edges_ = std::move(cross_edges);

    dag.cross_in_.resize(dag.total_nodes_);
    dag.cross_out_.resize(dag.total_nodes_);
    for (const CrossEdge& e : dag.cross_edges_) {
        std::uint32_t from = dag.index_of(e.first);
        std::uint32_t to = dag.index_of(e.second);
        dag.cross_out_[from].push_back(to);
        dag.cross_in_[to].push_back(from);
    }

    dag.build_reach();
    return dag;
}

bool HappensBeforeDag::contains(const EventId& e) const {
    auto it = ordinals_.find(e.chain);
    return it != ordinals_.end() && e.height < lengths_[it->second];
}

std::uint64_t HappensBeforeDag::chain_length(const ChainId& id) const {
    auto it = ordinals_.find(id);
    return it == ordinals_.end() ? 0 : lengths_[it->second];
}

std::vector<CrossEdge> HappensBeforeDag::all_edges() const {
    std::vector<CrossEdge> edges;
    for (std::size_t c = 0; c < chains_.size(); ++c) {
        for (std::uint64_t h = 1; h < lengths_[c]; ++h) {
            edges.emplace_back(EventId{chains_[c], h - 1}, EventId{chains_[c], h});
        }
    }
    edges.insert(edges.end(), cross_edges_.begin(), cross_edges_.end());
    return edges;
}

std::uint32_t HappensBeforeDag::index_of(const EventId& e) const {
    auto it = ordinals_.find(e.chain);
    if (it == ordinals_.end() || e.height >= lengths_[it->second]) {
        throw UnknownEventError("no event " + e.label());
    }
    return offsets_[it->second] + static_cast<std::uint32_t>(e.height);
}

EventId HappensBeforeDag::event_at(std::uint32_t index) const {
    if (index >= total_nodes_) {
        throw UnknownEventError("node index " + std::to_string(index) + " out of range");
    }
    std::uint32_t c = node_chain_[index];
    return EventId{chains_[c], index - offsets_[c]};
}

std::uint32_t HappensBeforeDag::chain_ordinal(const ChainId& id) const {
    auto it = ordinals_.find(id);
    if (it == ordinals_.end()) {
        throw UnknownEventError("no chain '" + id.value + "' in dag");
    }
    return it->second;
}

bool HappensBeforeDag::reaches(std::uint32_t from, std::uint32_t to) const {
    if (from == to) return true;
    std::uint32_t c = node_chain_[from];
    return reach_[to][c] >= static_cast<std::int64_t>(from - offsets_[c]);
}

void HappensBeforeDag::build_reach() {
    // Kahn order doubles as the acyclicity check.
    std::vector<std::uint32_t> indegree(total_nodes_, 0);
    for (std::size_t c = 0; c < chains_.size(); ++c) {
        for (std::uint64_t h = 1; h < lengths_[c]; ++h) {
            ++indegree[offsets_[c] + h];
        }
    }
    for (std::size_t v = 0; v < total_nodes_; ++v) {
        indegree[v] += static_cast<std::uint32_t>(cross_in_[v].size());
    }

    std::deque<std::uint32_t> ready;
    for (std::size_t v = 0; v < total_nodes_; ++v) {
        if (indegree[v] == 0) ready.push_back(static_cast<std::uint32_t>(v));
    }

    std::vector<std::uint32_t> topo;
    topo.reserve(total_nodes_);
    auto release = [&](std::uint32_t w) {
        if (--indegree[w] == 0) ready.push_back(w);
    };
    while (!ready.empty()) {
        std::uint32_t v = ready.front();
        ready.pop_front();
        topo.push_back(v);
        std::uint32_t c = node_chain_[v];
        if (v - offsets_[c] + 1 < lengths_[c]) release(v + 1);
        for (std::uint32_t w : cross_out_[v]) release(w);
    }
    if (topo.size() != total_nodes_) {
        throw CyclicReferencesError("reference graph has a cycle (" +
                                    std::to_string(total_nodes_ - topo.size()) +
                                    " nodes unreleased)");
    }

    reach_.assign(total_nodes_, std::vector<std::int64_t>(chains_.size(), -1));
    auto merge_into = [&](std::uint32_t v, std::uint32_t pred) {
        for (std::size_t c = 0; c < chains_.size(); ++c) {
            reach_[v][c] = std::max(reach_[v][c], reach_[pred][c]);
        }
    };
    for (std::uint32_t v : topo) {
        std::uint32_t c = node_chain_[v];
        std::uint64_t height = v - offsets_[c];
        if (height > 0) merge_into(v, v - 1);
        for (std::uint32_t pred : cross_in_[v]) merge_into(v, pred);
        reach_[v][c] = static_cast<std::int64_t>(height);
    }
}

HappensBeforeDag build_dag(const NetworkSnapshot& snapshot) {
    std::vector<Violation> violations = verify_snapshot(snapshot);
    if (!violations.empty()) {
        std::string msg = "snapshot fails verification:";
        for (const Violation& v : violations) msg += "\n  " + describe(v);
        throw InvalidSnapshotError(msg);
    }

    std::map<ChainId, std::uint64_t> lengths;
    std::map<ChainId, std::map<Digest, std::uint64_t>> height_by_hash;
    for (const auto& [id, chain] : snapshot.chains) {
        lengths[id] = chain.blocks.size();
        for (const Block& b : chain.blocks) {
            height_by_hash[id][b.summary_hash] = b.height;
        }
    }

    std::vector<CrossEdge> cross;
    for (const auto& [id, chain] : snapshot.chains) {
        for (const Block& b : chain.blocks) {
            for (const AssociationRef& r : b.accepted) {
                std::uint64_t src_height = height_by_hash.at(r.from_chain).at(r.from_block_hash);
                cross.emplace_back(EventId{r.from_chain, src_height},
                                   EventId{id, b.height});
            }
        }
    }
    return HappensBeforeDag::from_structure(lengths, std::move(cross));
}

} // namespace chainorder
