#include "chainorder/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace chainorder {

Rational::Rational(std::uint64_t n, std::uint64_t d) : num(n), den(d) {
    if (den == 0) throw Error("rational with zero denominator");
    std::uint64_t g = std::gcd(num, den);
    num /= g;
    den /= g;
}

GranularityReport granularity(const NetworkSnapshot& snapshot, const HappensBeforeDag& dag) {
    GranularityReport report;

    for (const auto& [id, chain] : snapshot.chains) {
        ChainGranularity g;
        g.block_count = chain.blocks.size();
        if (chain.blocks.size() >= 2) {
            bool timestamped = std::all_of(
                chain.blocks.begin(), chain.blocks.end(),
                [](const Block& b) { return b.local_timestamp.has_value(); });
            std::uint64_t sum = 0;
            std::int64_t max_gap = 0;
            for (std::size_t k = 1; k < chain.blocks.size(); ++k) {
                std::int64_t gap =
                    timestamped ? *chain.blocks[k].local_timestamp -
                                      *chain.blocks[k - 1].local_timestamp
                                : 1;
                if (gap < 0) gap = 0;  // untrusted clocks may run backwards
                sum += static_cast<std::uint64_t>(gap);
                max_gap = std::max(max_gap, gap);
            }
            g.mean_interval = Rational(sum, chain.blocks.size() - 1);
            g.max_interval = max_gap;
        }
        report.per_chain.emplace(id, std::move(g));
    }

    const auto& chains = dag.chains();
    for (std::size_t ci = 0; ci < chains.size(); ++ci) {
        std::uint64_t li = dag.chain_length(chains[ci]);
        if (li == 0) continue;
        std::uint32_t base_i = dag.index_of(EventId{chains[ci], 0});
        for (std::size_t cj = ci + 1; cj < chains.size(); ++cj) {
            std::uint64_t lj = dag.chain_length(chains[cj]);
            if (lj == 0) continue;
            std::uint32_t base_j = dag.index_of(EventId{chains[cj], 0});
            report.total_cross_pairs += li * lj;
            for (std::uint64_t hi = 0; hi < li; ++hi) {
                std::uint32_t a = base_i + static_cast<std::uint32_t>(hi);
                for (std::uint64_t hj = 0; hj < lj; ++hj) {
                    std::uint32_t b = base_j + static_cast<std::uint32_t>(hj);
                    if (dag.reaches(a, b) || dag.reaches(b, a)) {
                        ++report.ordered_cross_pairs;
                    }
                }
            }
        }
    }
    report.comparability_ratio =
        report.total_cross_pairs == 0
            ? Rational(1, 1)
            : Rational(report.ordered_cross_pairs, report.total_cross_pairs);
    return report;
}

std::map<ChainId, std::uint64_t> mainstream_score(
    const HappensBeforeDag& dag, const std::optional<WindowMap>& window) {
    if (window) {
        for (const auto& [id, w] : *window) {
            if (w.lo > w.hi) {
                throw InvalidWindowError("window for chain '" + id.value +
                                         "' has lo > hi");
            }
        }
    }

    std::map<ChainId, std::uint64_t> scores;
    for (const ChainId& id : dag.chains()) scores[id] = 0;
    for (const CrossEdge& e : dag.cross_edges()) {
        const EventId& src = e.first;
        if (window) {
            auto it = window->find(src.chain);
            if (it == window->end()) continue;
            if (src.height < it->second.lo || src.height > it->second.hi) continue;
        }
        ++scores[src.chain];
    }
    return scores;
}

} // namespace chainorder
