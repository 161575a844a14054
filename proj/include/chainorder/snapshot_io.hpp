#pragma once

#include <filesystem>
#include <string>

#include "chainorder/chain.hpp"
#include "chainorder/sim.hpp"

namespace chainorder {

inline constexpr int kSnapshotFormatVersion = 1;
inline constexpr int kTraceFormatVersion = 1;

// Canonical JSON document: chains sorted by id, blocks by height, fixed key
// order, lowercase hex, two-space indent. Equal snapshots produce equal bytes.
std::string save_snapshot(const NetworkSnapshot& snapshot);

// Structural problems (syntax, types, unknown keys, malformed digests) throw
// ParseError. With verify set, semantic problems throw InvalidSnapshotError;
// pass false to inspect a damaged snapshot with verify_snapshot instead.
NetworkSnapshot load_snapshot(const std::string& text, bool verify = true);

std::string save_trace(const SimTrace& trace);
SimTrace load_trace(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

} // namespace chainorder
