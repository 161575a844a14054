#include "chainorder/dot.hpp"

#include <sstream>

namespace chainorder {

namespace {

std::string node_id(const EventId& e) {
    return "\"" + e.chain.value + "_" + std::to_string(e.height) + "\"";
}

} // namespace

std::string export_dot(const HappensBeforeDag& dag) {
    std::ostringstream out;
    out << "digraph happens_before {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=box];\n";
    for (const ChainId& chain : dag.chains()) {
        for (std::uint64_t h = 0; h < dag.chain_length(chain); ++h) {
            EventId e{chain, h};
            out << "  " << node_id(e) << " [label=\"" << e.label() << "\"];\n";
        }
    }
    for (const ChainId& chain : dag.chains()) {
        for (std::uint64_t h = 1; h < dag.chain_length(chain); ++h) {
            out << "  " << node_id(EventId{chain, h - 1}) << " -> "
                << node_id(EventId{chain, h}) << ";\n";
        }
    }
    for (const auto& [from, to] : dag.cross_edges()) {
        out << "  " << node_id(from) << " -> " << node_id(to)
            << " [style=dashed];\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace chainorder
