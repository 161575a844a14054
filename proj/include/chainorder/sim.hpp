#pragma once

// Deterministic discrete-event simulation of a network of private chains.
//
// Two interaction regimes share one tick loop. Per tick, chains act in
// sorted-id order. A chain that creates a block packages every pending
// association sent to it at a strictly earlier tick, then (policy permitting)
// sends the fresh summary hash onward. Identical configs produce
// byte-identical snapshots and traces.
//
// Randomness (Autonomous policy only) comes from one xoshiro256** stream
// seeded with the config seed. Draw order per tick, per chain in sorted-id
// order: one unit draw for the create decision; when the chain creates and
// at least one other chain exists, one bounded draw for the partner.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chainorder/chain.hpp"
#include "chainorder/dag.hpp"

namespace chainorder {

enum class SimPolicy { FixedRule, Autonomous };

// At every tick t with t % period == phase, `actor` creates a block and,
// when send_to is set, sends the new summary hash there.
struct SendSlot {
    std::int64_t phase = 0;
    ChainId actor;
    std::optional<ChainId> send_to;
};

struct FixedRuleConfig {
    std::int64_t period = 1;
    std::vector<SendSlot> slots;
};

// Per tick each chain creates with its own probability and, upon creating,
// sends the new hash to one uniformly random other chain.
struct AutonomousConfig {
    std::map<ChainId, double> block_prob;
};

struct SimConfig {
    std::vector<ChainId> chains;
    std::int64_t ticks = 1;
    SimPolicy policy = SimPolicy::FixedRule;
    std::uint64_t seed = 0;
    std::optional<FixedRuleConfig> fixed_rule;
    std::optional<AutonomousConfig> autonomous;
};

// Throws InvalidConfigError; message names the offending field.
void validate(const SimConfig& config);

struct SimEvent {
    enum class Kind { BlockCreated, AssociationSent, AssociationAccepted, AssociationDropped };

    Kind kind = Kind::BlockCreated;
    std::int64_t tick = 0;
    ChainId chain;                        // creator, sender, or accepting chain
    std::optional<ChainId> peer;          // Sent: recipient; Accepted/Dropped: origin
    std::optional<std::uint64_t> height;  // BlockCreated: new height; Accepted: origin height
    std::optional<Digest> payload_hash;   // BlockCreated only

    bool operator==(const SimEvent&) const = default;

    static SimEvent block_created(std::int64_t tick, ChainId chain, std::uint64_t height,
                                  Digest payload_hash);
    static SimEvent sent(std::int64_t tick, ChainId from, ChainId to);
    static SimEvent accepted(std::int64_t tick, ChainId to, ChainId from,
                             std::uint64_t from_height);
    static SimEvent dropped(std::int64_t tick, ChainId to, ChainId from);
};

// Audit log of one run; also the ground-truth oracle for ordering tests.
// Carries the simulated chain roster so that chains which never created a
// block still appear in the replayed snapshot.
struct SimTrace {
    std::vector<ChainId> chains;  // sorted
    std::vector<SimEvent> events;

    bool operator==(const SimTrace&) const = default;
};

struct SimResult {
    NetworkSnapshot snapshot;
    SimTrace trace;
};

using TickHook = std::function<void(std::int64_t tick)>;

// Executes the configured number of ticks. Deterministic.
SimResult run(const SimConfig& config, const TickHook& on_tick = {});

// Payload commitment for simulated blocks: sha256("payload|chain|height|seed").
Digest sim_payload_hash(const ChainId& chain, std::uint64_t height, std::uint64_t seed);

// Rebuilds the snapshot from the event log alone. Throws InvalidTraceError
// when the log is internally inconsistent (an accept without a matching
// earlier send, heights out of order, ticks decreasing, ...).
NetworkSnapshot replay(const SimTrace& trace);

// True creation order of all block events, as recorded by the simulator.
std::vector<EventId> ground_truth_order(const SimTrace& trace);

} // namespace chainorder
