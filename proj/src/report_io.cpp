#include "chainorder/report_io.hpp"

#include "json_util.hpp"

namespace chainorder {

using jsonio::json;

SimConfig load_sim_config(const std::string& text) {
    json doc = jsonio::parse(text);
    jsonio::object_at(doc, "$");
    jsonio::allow_keys(doc, "$",
                       {"chains", "ticks", "seed", "policy", "fixed_rule", "autonomous"});

    SimConfig config;
    const json& chains =
        jsonio::array_at(jsonio::member(doc, "chains", "$"), "$.chains");
    for (std::size_t i = 0; i < chains.size(); ++i) {
        config.chains.push_back(
            ChainId{jsonio::get_string(chains[i], jsonio::elem("$.chains", i))});
    }
    config.ticks = jsonio::get_int(jsonio::member(doc, "ticks", "$"), "$.ticks");
    if (const json* seed = jsonio::opt_member(doc, "seed")) {
        config.seed = jsonio::get_uint(*seed, "$.seed");
    }

    std::string policy =
        jsonio::get_string(jsonio::member(doc, "policy", "$"), "$.policy");
    if (policy == "fixed_rule") {
        config.policy = SimPolicy::FixedRule;
        const json& fr = jsonio::object_at(jsonio::member(doc, "fixed_rule", "$"),
                                           "$.fixed_rule");
        jsonio::allow_keys(fr, "$.fixed_rule", {"period", "slots"});
        FixedRuleConfig rule;
        rule.period = jsonio::get_int(jsonio::member(fr, "period", "$.fixed_rule"),
                                      "$.fixed_rule.period");
        const json& slots = jsonio::array_at(
            jsonio::member(fr, "slots", "$.fixed_rule"), "$.fixed_rule.slots");
        for (std::size_t i = 0; i < slots.size(); ++i) {
            const std::string path = jsonio::elem("$.fixed_rule.slots", i);
            jsonio::object_at(slots[i], path);
            jsonio::allow_keys(slots[i], path, {"phase", "actor", "send_to"});
            SendSlot slot;
            slot.phase = jsonio::get_int(jsonio::member(slots[i], "phase", path),
                                         path + ".phase");
            slot.actor.value = jsonio::get_string(
                jsonio::member(slots[i], "actor", path), path + ".actor");
            if (const json* to = jsonio::opt_member(slots[i], "send_to")) {
                slot.send_to = ChainId{jsonio::get_string(*to, path + ".send_to")};
            }
            rule.slots.push_back(std::move(slot));
        }
        config.fixed_rule = std::move(rule);
    } else if (policy == "autonomous") {
        config.policy = SimPolicy::Autonomous;
        const json& au = jsonio::object_at(jsonio::member(doc, "autonomous", "$"),
                                           "$.autonomous");
        jsonio::allow_keys(au, "$.autonomous", {"block_prob", "partner"});
        AutonomousConfig rule;
        const json& probs = jsonio::object_at(
            jsonio::member(au, "block_prob", "$.autonomous"), "$.autonomous.block_prob");
        for (const auto& [key, value] : probs.items()) {
            rule.block_prob[ChainId{key}] =
                jsonio::get_prob(value, "$.autonomous.block_prob." + key);
        }
        if (const json* partner = jsonio::opt_member(au, "partner")) {
            std::string p = jsonio::get_string(*partner, "$.autonomous.partner");
            if (p != "uniform_random") {
                jsonio::fail("$.autonomous.partner", "unknown partner strategy '" + p + "'");
            }
        }
        config.autonomous = std::move(rule);
    } else {
        jsonio::fail("$.policy", "unknown policy '" + policy + "'");
    }

    validate(config);
    return config;
}

std::string save_sim_config(const SimConfig& config) {
    json doc;
    json chains = json::array();
    for (const ChainId& id : config.chains) chains.push_back(id.value);
    doc["chains"] = std::move(chains);
    doc["ticks"] = config.ticks;
    doc["seed"] = config.seed;
    if (config.policy == SimPolicy::FixedRule) {
        doc["policy"] = "fixed_rule";
        json fr;
        fr["period"] = config.fixed_rule->period;
        json slots = json::array();
        for (const SendSlot& slot : config.fixed_rule->slots) {
            json js;
            js["phase"] = slot.phase;
            js["actor"] = slot.actor.value;
            if (slot.send_to) js["send_to"] = slot.send_to->value;
            slots.push_back(std::move(js));
        }
        fr["slots"] = std::move(slots);
        doc["fixed_rule"] = std::move(fr);
    } else {
        doc["policy"] = "autonomous";
        json au;
        json probs = json::object();
        for (const auto& [id, p] : config.autonomous->block_prob) probs[id.value] = p;
        au["block_prob"] = std::move(probs);
        au["partner"] = "uniform_random";
        doc["autonomous"] = std::move(au);
    }
    return doc.dump(2) + "\n";
}

namespace {

json rational_json(const Rational& r) {
    return json{{"num", r.num}, {"den", r.den}, {"decimal", r.to_double()}};
}

json event_json(const EventId& e) {
    return json{{"chain", e.chain.value}, {"height", e.height}};
}

} // namespace

std::string metrics_report_json(const GranularityReport& granularity,
                                const std::map<ChainId, std::uint64_t>& mainstream) {
    json doc;
    json per_chain = json::array();
    for (const auto& [id, g] : granularity.per_chain) {
        json jc;
        jc["chain"] = id.value;
        jc["block_count"] = g.block_count;
        if (g.mean_interval) jc["mean_interval"] = rational_json(*g.mean_interval);
        if (g.max_interval) jc["max_interval"] = *g.max_interval;
        per_chain.push_back(std::move(jc));
    }
    json gran;
    gran["per_chain"] = std::move(per_chain);
    gran["ordered_cross_pairs"] = granularity.ordered_cross_pairs;
    gran["total_cross_pairs"] = granularity.total_cross_pairs;
    gran["comparability_ratio"] = rational_json(granularity.comparability_ratio);
    doc["granularity"] = std::move(gran);

    json scores = json::array();
    for (const auto& [id, score] : mainstream) {
        scores.push_back(json{{"chain", id.value}, {"score", score}});
    }
    doc["mainstream"] = json{{"per_chain", std::move(scores)}};
    return doc.dump(2) + "\n";
}

std::string extension_json(const LinearExtension& extension) {
    json doc = json::array();
    for (const EventId& e : extension) doc.push_back(event_json(e));
    return doc.dump(2) + "\n";
}

std::string enumeration_json(const ExtensionEnumeration& enumeration) {
    json doc;
    doc["count"] = enumeration.extensions.size();
    doc["overflowed"] = enumeration.overflowed;
    json exts = json::array();
    for (const LinearExtension& ext : enumeration.extensions) {
        json je = json::array();
        for (const EventId& e : ext) je.push_back(event_json(e));
        exts.push_back(std::move(je));
    }
    doc["extensions"] = std::move(exts);
    return doc.dump(2) + "\n";
}

std::string count_json(const BigCount& count) {
    json doc;
    doc["count"] = count.str();
    return doc.dump(2) + "\n";
}

} // namespace chainorder
