#include "chainorder/order.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>

namespace chainorder {

const char* to_string(OrderRelation r) {
    switch (r) {
        case OrderRelation::Before: return "before";
        case OrderRelation::After: return "after";
        case OrderRelation::Concurrent: return "concurrent";
        case OrderRelation::Equal: return "equal";
    }
    return "unknown";
}

OrderRelation precedes(const HappensBeforeDag& dag, const EventId& a, const EventId& b) {
    std::uint32_t ia = dag.index_of(a);
    std::uint32_t ib = dag.index_of(b);
    if (ia == ib) return OrderRelation::Equal;
    if (dag.reaches(ia, ib)) return OrderRelation::Before;
    if (dag.reaches(ib, ia)) return OrderRelation::After;
    return OrderRelation::Concurrent;
}

LinearExtension canonical_order(const HappensBeforeDag& dag) {
    // Flat indices are already ordered by (chain id bytes, height), so a
    // sorted ready set realizes the tie-break.
    std::size_t n = dag.node_count();
    std::vector<std::uint32_t> indegree(n, 0);
    const auto& chains = dag.chains();
    for (const ChainId& id : chains) {
        for (std::uint64_t h = 1; h < dag.chain_length(id); ++h) {
            ++indegree[dag.index_of(EventId{id, h})];
        }
    }
    for (std::size_t v = 0; v < n; ++v) {
        indegree[v] += static_cast<std::uint32_t>(dag.cross_predecessors(
            static_cast<std::uint32_t>(v)).size());
    }

    std::set<std::uint32_t> ready;
    for (std::size_t v = 0; v < n; ++v) {
        if (indegree[v] == 0) ready.insert(static_cast<std::uint32_t>(v));
    }

    LinearExtension order;
    order.reserve(n);
    auto release = [&](std::uint32_t w) {
        if (--indegree[w] == 0) ready.insert(w);
    };
    while (!ready.empty()) {
        std::uint32_t v = *ready.begin();
        ready.erase(ready.begin());
        EventId e = dag.event_at(v);
        order.push_back(e);
        if (e.height + 1 < dag.chain_length(e.chain)) release(v + 1);
        for (std::uint32_t w : dag.cross_successors(v)) release(w);
    }
    return order;
}

namespace {

// Per-chain consumption frontier. next[c] blocks of chain c are consumed;
// the candidate event of chain c is (c, next[c]).
struct FrontierState {
    std::vector<std::uint32_t> next;

    bool operator==(const FrontierState&) const = default;
};

struct FrontierHash {
    std::size_t operator()(const FrontierState& s) const {
        std::size_t h = 1469598103934665603ull;
        for (std::uint32_t v : s.next) {
            h ^= v;
            h *= 1099511628211ull;
        }
        return h;
    }
};

// Cross predecessors of each node as (chain ordinal, height) pairs.
struct EnumContext {
    const HappensBeforeDag& dag;
    std::vector<std::uint64_t> lengths;
    std::vector<std::uint32_t> offsets;  // flat index of (chain, 0); 0 for empty chains
    std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> preds;

    explicit EnumContext(const HappensBeforeDag& d) : dag(d) {
        const auto& chains = d.chains();
        std::uint32_t offset = 0;
        for (const ChainId& id : chains) {
            lengths.push_back(d.chain_length(id));
            offsets.push_back(offset);
            offset += static_cast<std::uint32_t>(lengths.back());
        }
        preds.resize(d.node_count());
        for (std::uint32_t v = 0; v < d.node_count(); ++v) {
            for (std::uint32_t p : d.cross_predecessors(v)) {
                EventId e = d.event_at(p);
                preds[v].emplace_back(d.chain_ordinal(e.chain), e.height);
            }
        }
    }

    bool ready(const FrontierState& s, std::uint32_t c) const {
        if (s.next[c] >= lengths[c]) return false;
        std::uint32_t v = offsets[c] + s.next[c];
        for (const auto& [pc, ph] : preds[v]) {
            if (s.next[pc] <= ph) return false;
        }
        return true;
    }
};

} // namespace

ExtensionEnumeration linear_extensions(const HappensBeforeDag& dag, std::size_t limit,
                                       const ProgressHook& progress) {
    EnumContext ctx(dag);
    std::size_t n = dag.node_count();
    std::size_t num_chains = dag.chains().size();

    ExtensionEnumeration result;
    FrontierState state{std::vector<std::uint32_t>(num_chains, 0)};
    std::vector<EventId> current;
    current.reserve(n);
    std::uint64_t steps = 0;

    // Depth-first over frontier states, trying chains in ascending id order:
    // sequences come out lexicographic in the canonical tie-break.
    auto recurse = [&](auto&& self) -> bool {
        if (current.size() == n) {
            if (result.extensions.size() == limit) {
                result.overflowed = true;
                return false;
            }
            result.extensions.push_back(current);
            if (progress && !progress(result.extensions.size())) {
                result.cancelled = true;
                return false;
            }
            return true;
        }
        for (std::uint32_t c = 0; c < num_chains; ++c) {
            if (!ctx.ready(state, c)) continue;
            if (progress && (++steps & 0xfff) == 0 &&
                !progress(result.extensions.size())) {
                result.cancelled = true;
                return false;
            }
            current.push_back(EventId{dag.chains()[c], state.next[c]});
            ++state.next[c];
            bool keep_going = self(self);
            --state.next[c];
            current.pop_back();
            if (!keep_going) return false;
        }
        return true;
    };
    recurse(recurse);
    return result;
}

BigCount count_linear_extensions(const HappensBeforeDag& dag, std::size_t max_nodes) {
    if (dag.node_count() > max_nodes) {
        throw TooLargeError("dag has " + std::to_string(dag.node_count()) +
                            " nodes; counting is bounded at " + std::to_string(max_nodes));
    }
    EnumContext ctx(dag);
    std::size_t n = dag.node_count();
    std::size_t num_chains = dag.chains().size();

    std::unordered_map<FrontierState, BigCount, FrontierHash> memo;
    FrontierState state{std::vector<std::uint32_t>(num_chains, 0)};

    auto recurse = [&](auto&& self, std::size_t consumed) -> BigCount {
        if (consumed == n) return 1;
        auto it = memo.find(state);
        if (it != memo.end()) return it->second;
        BigCount total = 0;
        for (std::uint32_t c = 0; c < num_chains; ++c) {
            if (!ctx.ready(state, c)) continue;
            ++state.next[c];
            total += self(self, consumed + 1);
            --state.next[c];
        }
        memo.emplace(state, total);
        return total;
    };
    return recurse(recurse, 0);
}

Certificate order_certificate(const HappensBeforeDag& dag, const EventId& a, const EventId& b) {
    OrderRelation rel = precedes(dag, a, b);
    Certificate cert{rel, {}};
    if (rel != OrderRelation::Before) return cert;

    std::uint32_t from = dag.index_of(a);
    std::uint32_t to = dag.index_of(b);
    std::vector<std::int64_t> parent(dag.node_count(), -1);
    std::deque<std::uint32_t> queue{from};
    parent[from] = from;
    while (!queue.empty()) {
        std::uint32_t v = queue.front();
        queue.pop_front();
        if (v == to) break;
        EventId e = dag.event_at(v);
        auto visit = [&](std::uint32_t w) {
            if (parent[w] < 0) {
                parent[w] = v;
                queue.push_back(w);
            }
        };
        if (e.height + 1 < dag.chain_length(e.chain)) visit(v + 1);
        for (std::uint32_t w : dag.cross_successors(v)) visit(w);
    }

    std::vector<EventId> path;
    for (std::uint32_t v = to;; v = static_cast<std::uint32_t>(parent[v])) {
        path.push_back(dag.event_at(v));
        if (v == from) break;
    }
    std::reverse(path.begin(), path.end());
    cert.path = std::move(path);
    return cert;
}

} // namespace chainorder
