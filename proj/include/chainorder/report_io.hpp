#pragma once

#include <map>
#include <string>

#include "chainorder/metrics.hpp"
#include "chainorder/order.hpp"
#include "chainorder/sim.hpp"

namespace chainorder {

SimConfig load_sim_config(const std::string& text);
std::string save_sim_config(const SimConfig& config);

// Report documents emitted by the command-line tool.
std::string metrics_report_json(const GranularityReport& granularity,
                                const std::map<ChainId, std::uint64_t>& mainstream);
std::string extension_json(const LinearExtension& extension);
std::string enumeration_json(const ExtensionEnumeration& enumeration);
std::string count_json(const BigCount& count);

} // namespace chainorder
