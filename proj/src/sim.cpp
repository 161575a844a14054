#include "chainorder/sim.hpp"

#include <algorithm>
#include <set>

#include "chainorder/rng.hpp"

namespace chainorder {

SimEvent SimEvent::block_created(std::int64_t tick, ChainId chain, std::uint64_t height,
                                 Digest payload_hash) {
    SimEvent e;
    e.kind = Kind::BlockCreated;
    e.tick = tick;
    e.chain = std::move(chain);
    e.height = height;
    e.payload_hash = payload_hash;
    return e;
}

SimEvent SimEvent::sent(std::int64_t tick, ChainId from, ChainId to) {
    SimEvent e;
    e.kind = Kind::AssociationSent;
    e.tick = tick;
    e.chain = std::move(from);
    e.peer = std::move(to);
    return e;
}

SimEvent SimEvent::accepted(std::int64_t tick, ChainId to, ChainId from,
                            std::uint64_t from_height) {
    SimEvent e;
    e.kind = Kind::AssociationAccepted;
    e.tick = tick;
    e.chain = std::move(to);
    e.peer = std::move(from);
    e.height = from_height;
    return e;
}

SimEvent SimEvent::dropped(std::int64_t tick, ChainId to, ChainId from) {
    SimEvent e;
    e.kind = Kind::AssociationDropped;
    e.tick = tick;
    e.chain = std::move(to);
    e.peer = std::move(from);
    return e;
}

void validate(const SimConfig& config) {
    if (config.ticks < 1) {
        throw InvalidConfigError("ticks must be >= 1");
    }
    std::set<ChainId> seen;
    for (const ChainId& id : config.chains) {
        if (!valid_chain_id(id.value)) {
            throw InvalidConfigError("invalid chain id '" + id.value + "'");
        }
        if (!seen.insert(id).second) {
            throw InvalidConfigError("duplicate chain id '" + id.value + "'");
        }
    }

    if (config.policy == SimPolicy::FixedRule) {
        if (!config.fixed_rule || config.autonomous) {
            throw InvalidConfigError("fixed_rule policy requires exactly the fixed_rule section");
        }
        const FixedRuleConfig& fr = *config.fixed_rule;
        if (fr.period < 1) {
            throw InvalidConfigError("fixed_rule.period must be >= 1");
        }
        for (const SendSlot& slot : fr.slots) {
            if (slot.phase < 0 || slot.phase >= fr.period) {
                throw InvalidConfigError("slot phase " + std::to_string(slot.phase) +
                                         " outside [0, period)");
            }
            if (!seen.contains(slot.actor)) {
                throw InvalidConfigError("slot actor '" + slot.actor.value +
                                         "' is not a configured chain");
            }
            if (slot.send_to) {
                if (!seen.contains(*slot.send_to)) {
                    throw InvalidConfigError("slot target '" + slot.send_to->value +
                                             "' is not a configured chain");
                }
                if (*slot.send_to == slot.actor) {
                    throw InvalidConfigError("slot for '" + slot.actor.value +
                                             "' sends to itself");
                }
            }
        }
    } else {
        if (!config.autonomous || config.fixed_rule) {
            throw InvalidConfigError("autonomous policy requires exactly the autonomous section");
        }
        for (const auto& [id, p] : config.autonomous->block_prob) {
            if (!seen.contains(id)) {
                throw InvalidConfigError("block_prob names unknown chain '" + id.value + "'");
            }
            if (!(p >= 0.0 && p <= 1.0)) {
                throw InvalidConfigError("block_prob for '" + id.value +
                                         "' outside [0, 1]");
            }
        }
    }
}

Digest sim_payload_hash(const ChainId& chain, std::uint64_t height, std::uint64_t seed) {
    return sha256("payload|" + chain.value + "|" + std::to_string(height) + "|" +
                  std::to_string(seed));
}

namespace {

struct Runner {
    const SimConfig& config;
    NetworkSnapshot snapshot;
    SimTrace trace;

    void create_block(const ChainId& chain, std::int64_t tick) {
        std::uint64_t height = snapshot.chains.at(chain).blocks.size();
        Digest payload = sim_payload_hash(chain, height, config.seed);
        const Block& b = accept_pending(snapshot, chain, payload, tick, tick);
        for (const AssociationRef& r : b.accepted) {
            const Block* src = find_block(snapshot, r.from_chain, r.from_block_hash);
            trace.events.push_back(
                SimEvent::accepted(tick, chain, r.from_chain, src->height));
        }
        trace.events.push_back(SimEvent::block_created(tick, chain, b.height, payload));
    }

    void send(const ChainId& from, const ChainId& to, std::int64_t tick) {
        send_association(snapshot, from, to, tick);
        trace.events.push_back(SimEvent::sent(tick, from, to));
    }
};

} // namespace

SimResult run(const SimConfig& config, const TickHook& on_tick) {
    validate(config);

    Runner r{config, {}, {}};
    std::vector<ChainId> sorted_chains = config.chains;
    std::sort(sorted_chains.begin(), sorted_chains.end());
    r.trace.chains = sorted_chains;
    for (const ChainId& id : sorted_chains) {
        r.snapshot.chains.emplace(id, Chain{id, {}, {}});
    }

    Xoshiro256StarStar rng(config.seed);

    for (std::int64_t tick = 0; tick < config.ticks; ++tick) {
        if (on_tick) on_tick(tick);

        if (config.policy == SimPolicy::FixedRule) {
            std::vector<const SendSlot*> firing;
            for (const SendSlot& slot : config.fixed_rule->slots) {
                if (tick % config.fixed_rule->period == slot.phase) {
                    firing.push_back(&slot);
                }
            }
            std::stable_sort(firing.begin(), firing.end(),
                             [](const SendSlot* a, const SendSlot* b) {
                                 return a->actor < b->actor;
                             });
            for (const SendSlot* slot : firing) {
                r.create_block(slot->actor, tick);
                if (slot->send_to) r.send(slot->actor, *slot->send_to, tick);
            }
        } else {
            const auto& probs = config.autonomous->block_prob;
            for (const ChainId& chain : sorted_chains) {
                auto it = probs.find(chain);
                double p = it == probs.end() ? 0.0 : it->second;
                double draw = rng.next_unit();
                if (draw >= p) continue;
                r.create_block(chain, tick);
                if (sorted_chains.size() >= 2) {
                    std::uint64_t k = rng.next_below(sorted_chains.size() - 1);
                    // k-th chain other than self
                    std::size_t idx = 0;
                    for (std::size_t i = 0; i < sorted_chains.size(); ++i) {
                        if (sorted_chains[i] == chain) continue;
                        if (idx == k) {
                            r.send(chain, sorted_chains[i], tick);
                            break;
                        }
                        ++idx;
                    }
                }
            }
        }
    }

    return SimResult{std::move(r.snapshot), std::move(r.trace)};
}

NetworkSnapshot replay(const SimTrace& trace) {
    NetworkSnapshot snapshot;
    {
        std::set<ChainId> seen;
        for (const ChainId& id : trace.chains) {
            if (!valid_chain_id(id.value)) {
                throw InvalidTraceError("invalid chain id '" + id.value + "'");
            }
            if (!seen.insert(id).second) {
                throw InvalidTraceError("duplicate chain id '" + id.value + "'");
            }
            snapshot.chains.emplace(id, Chain{id, {}, {}});
        }
    }

    auto chain_of = [&](const ChainId& id) -> Chain& {
        auto it = snapshot.chains.find(id);
        if (it == snapshot.chains.end()) {
            throw InvalidTraceError("event names chain '" + id.value +
                                    "' missing from the trace roster");
        }
        return it->second;
    };

    std::vector<PendingAssociation> pending;
    // Accepted events buffered until the BlockCreated that packages them.
    std::map<ChainId, std::vector<AssociationRef>> buffered;
    std::map<ChainId, std::int64_t> buffered_tick;
    std::int64_t last_tick = 0;
    bool first_event = true;

    for (const SimEvent& e : trace.events) {
        if (!first_event && e.tick < last_tick) {
            throw InvalidTraceError("event ticks decrease at tick " +
                                    std::to_string(e.tick));
        }
        first_event = false;
        last_tick = e.tick;

        switch (e.kind) {
            case SimEvent::Kind::AssociationSent: {
                if (!e.peer) throw InvalidTraceError("sent event lacks recipient");
                Chain& from = chain_of(e.chain);
                chain_of(*e.peer);
                if (e.chain == *e.peer) {
                    throw InvalidTraceError("chain '" + e.chain.value +
                                            "' sends to itself");
                }
                if (from.blocks.empty()) {
                    throw InvalidTraceError("chain '" + e.chain.value +
                                            "' sends before creating any block");
                }
                pending.push_back(PendingAssociation{
                    e.chain, from.blocks.back().summary_hash, *e.peer, e.tick});
                break;
            }
            case SimEvent::Kind::AssociationAccepted: {
                if (!e.peer || !e.height) {
                    throw InvalidTraceError("accepted event lacks origin fields");
                }
                Chain& from = chain_of(*e.peer);
                chain_of(e.chain);
                if (*e.height >= from.blocks.size()) {
                    throw InvalidTraceError("accepted event references block " +
                                            e.peer->value + ":" +
                                            std::to_string(*e.height) +
                                            " which does not exist yet");
                }
                const Digest& hash = from.blocks[*e.height].summary_hash;
                bool matched = std::any_of(
                    pending.begin(), pending.end(), [&](const PendingAssociation& p) {
                        return p.to_chain == e.chain && p.from_chain == *e.peer &&
                               p.from_block_hash == hash && p.sent_at < e.tick;
                    });
                if (!matched) {
                    throw InvalidTraceError("accept at tick " + std::to_string(e.tick) +
                                            " has no matching earlier send");
                }
                buffered[e.chain].push_back(AssociationRef{*e.peer, hash});
                buffered_tick[e.chain] = e.tick;
                break;
            }
            case SimEvent::Kind::BlockCreated: {
                if (!e.height || !e.payload_hash) {
                    throw InvalidTraceError("block event lacks height or payload hash");
                }
                Chain& chain = chain_of(e.chain);
                if (*e.height != chain.blocks.size()) {
                    throw InvalidTraceError("chain '" + e.chain.value +
                                            "' creates height " +
                                            std::to_string(*e.height) + " but " +
                                            std::to_string(chain.blocks.size()) +
                                            " blocks exist");
                }
                auto buf_it = buffered.find(e.chain);
                std::vector<AssociationRef> refs;
                if (buf_it != buffered.end()) {
                    if (buffered_tick[e.chain] != e.tick) {
                        throw InvalidTraceError("accepts for '" + e.chain.value +
                                                "' not packaged in the same tick");
                    }
                    refs = std::move(buf_it->second);
                    buffered.erase(buf_it);
                    buffered_tick.erase(e.chain);
                }
                std::sort(refs.begin(), refs.end());
                refs.erase(std::unique(refs.begin(), refs.end()), refs.end());

                // The library packages every eligible pending; the log must agree.
                std::vector<AssociationRef> eligible;
                for (const PendingAssociation& p : pending) {
                    if (p.to_chain == e.chain && p.sent_at < e.tick) {
                        eligible.push_back(AssociationRef{p.from_chain, p.from_block_hash});
                    }
                }
                std::sort(eligible.begin(), eligible.end());
                eligible.erase(std::unique(eligible.begin(), eligible.end()),
                               eligible.end());
                if (refs != eligible) {
                    throw InvalidTraceError("accepts logged for '" + e.chain.value +
                                            "' at tick " + std::to_string(e.tick) +
                                            " do not match the eligible pending set");
                }
                std::erase_if(pending, [&](const PendingAssociation& p) {
                    return p.to_chain == e.chain && p.sent_at < e.tick;
                });
                append_block(chain, *e.payload_hash, std::move(refs), e.tick);
                break;
            }
            case SimEvent::Kind::AssociationDropped: {
                if (!e.peer) throw InvalidTraceError("dropped event lacks origin");
                auto it = std::find_if(pending.begin(), pending.end(),
                                       [&](const PendingAssociation& p) {
                                           return p.to_chain == e.chain &&
                                                  p.from_chain == *e.peer;
                                       });
                if (it == pending.end()) {
                    throw InvalidTraceError("drop without matching pending at tick " +
                                            std::to_string(e.tick));
                }
                pending.erase(it);
                break;
            }
        }
    }

    if (!buffered.empty()) {
        throw InvalidTraceError("accepted events never packaged into a block");
    }
    snapshot.pending = std::move(pending);
    return snapshot;
}

std::vector<EventId> ground_truth_order(const SimTrace& trace) {
    std::vector<EventId> order;
    for (const SimEvent& e : trace.events) {
        if (e.kind == SimEvent::Kind::BlockCreated) {
            order.push_back(EventId{e.chain, *e.height});
        }
    }
    return order;
}

} // namespace chainorder
