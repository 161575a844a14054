#pragma once

// Comparability queries, canonical linearization, exhaustive linear-extension
// enumeration and exact counting at desk scale.

#include <cstdint>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "chainorder/dag.hpp"

namespace chainorder {

using BigCount = boost::multiprecision::cpp_int;

enum class OrderRelation { Before, After, Concurrent, Equal };

const char* to_string(OrderRelation r);

// One admissible total order of all events.
using LinearExtension = std::vector<EventId>;

// Before iff b is reachable from a, After iff a from b, Equal iff a == b,
// Concurrent otherwise.
OrderRelation precedes(const HappensBeforeDag& dag, const EventId& a, const EventId& b);

// Kahn topological order; among simultaneously ready events the smallest
// (chain id bytes, height) wins. Deterministic.
LinearExtension canonical_order(const HappensBeforeDag& dag);

// Invoked periodically during enumeration; return false to cancel.
using ProgressHook = std::function<bool(std::uint64_t extensions_found)>;

struct ExtensionEnumeration {
    std::vector<LinearExtension> extensions;  // lexicographic by the canonical tie-break
    bool overflowed = false;                  // more than `limit` extensions exist
    bool cancelled = false;

    BigCount count() const { return BigCount(extensions.size()); }
};

// Exhaustive backtracking enumeration of every linear extension, in
// lexicographic order of the canonical tie-break. Stops (with
// overflowed = true, keeping the first `limit`) once more than `limit`
// extensions are found.
ExtensionEnumeration linear_extensions(const HappensBeforeDag& dag, std::size_t limit,
                                       const ProgressHook& progress = {});

// Exact count via dynamic programming over per-chain consumption frontiers
// (the downsets of a union of chains). Throws TooLargeError above max_nodes.
BigCount count_linear_extensions(const HappensBeforeDag& dag, std::size_t max_nodes = 20);

// Explicit edge path a -> ... -> b when precedes(a, b) = Before; every hop
// is an intra-chain link or an accepted association.
struct Certificate {
    OrderRelation relation = OrderRelation::Concurrent;
    std::vector<EventId> path;  // nonempty iff relation == Before

    bool ordered() const { return relation == OrderRelation::Before; }
};

Certificate order_certificate(const HappensBeforeDag& dag, const EventId& a, const EventId& b);

} // namespace chainorder
