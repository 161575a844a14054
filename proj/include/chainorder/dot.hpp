#pragma once

#include <string>

#include "chainorder/dag.hpp"

namespace chainorder {

// Graphviz digraph: solid intra-chain edges, dashed cross-chain edges,
// deterministic output order.
std::string export_dot(const HappensBeforeDag& dag);

} // namespace chainorder
