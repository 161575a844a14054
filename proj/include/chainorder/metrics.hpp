#pragma once

// Time-granularity and mainstream metrics over a snapshot and its DAG.

#include <cstdint>
#include <map>
#include <optional>

#include "chainorder/dag.hpp"
#include "chainorder/order.hpp"

namespace chainorder {

// Exact nonnegative fraction, normalized.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    Rational() = default;
    Rational(std::uint64_t n, std::uint64_t d);

    bool operator==(const Rational&) const = default;
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct ChainGranularity {
    std::uint64_t block_count = 0;
    // Absent for chains with fewer than two blocks.
    std::optional<Rational> mean_interval;
    std::optional<std::int64_t> max_interval;
};

struct GranularityReport {
    std::map<ChainId, ChainGranularity> per_chain;
    // Fraction of distinct cross-chain event pairs that are ordered.
    // 1/1 when there are no cross-chain pairs.
    Rational comparability_ratio{1, 1};
    std::uint64_t ordered_cross_pairs = 0;
    std::uint64_t total_cross_pairs = 0;
};

// Inter-block intervals come from local_timestamps when every block of the
// chain has one, else from unit spacing (block index distance).
GranularityReport granularity(const NetworkSnapshot& snapshot, const HappensBeforeDag& dag);

// Inclusive height range.
struct HeightWindow {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
};

using WindowMap = std::map<ChainId, HeightWindow>;

// Per chain, how many cross edges originate from its blocks, i.e. how many
// times other chains packaged its hashes. With a window, an edge counts when
// its source chain appears in the map and the source height lies in range.
std::map<ChainId, std::uint64_t> mainstream_score(
    const HappensBeforeDag& dag, const std::optional<WindowMap>& window = std::nullopt);

} // namespace chainorder
