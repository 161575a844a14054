#include "chainorder/snapshot_io.hpp"

#include <fstream>
#include <sstream>

#include "chainorder/verify.hpp"
#include "json_util.hpp"

namespace chainorder {

using jsonio::json;

namespace {

json ref_to_json(const AssociationRef& r) {
    return json{{"from_chain", r.from_chain.value},
                {"from_block_hash", r.from_block_hash.to_hex()}};
}

AssociationRef ref_from_json(const json& j, const std::string& path) {
    jsonio::object_at(j, path);
    jsonio::allow_keys(j, path, {"from_chain", "from_block_hash"});
    AssociationRef r;
    r.from_chain.value =
        jsonio::get_string(jsonio::member(j, "from_chain", path), path + ".from_chain");
    r.from_block_hash = jsonio::get_digest(jsonio::member(j, "from_block_hash", path),
                                           path + ".from_block_hash");
    return r;
}

Block block_from_json(const json& j, const ChainId& chain, const std::string& path) {
    jsonio::object_at(j, path);
    jsonio::allow_keys(j, path, {"height", "prev_hash", "payload_hash", "summary_hash",
                                 "accepted", "local_timestamp"});
    Block b;
    b.chain = chain;
    b.height = jsonio::get_uint(jsonio::member(j, "height", path), path + ".height");
    b.prev_hash =
        jsonio::get_digest(jsonio::member(j, "prev_hash", path), path + ".prev_hash");
    b.payload_hash = jsonio::get_digest(jsonio::member(j, "payload_hash", path),
                                        path + ".payload_hash");
    b.summary_hash = jsonio::get_digest(jsonio::member(j, "summary_hash", path),
                                        path + ".summary_hash");
    const json& accepted =
        jsonio::array_at(jsonio::member(j, "accepted", path), path + ".accepted");
    for (std::size_t i = 0; i < accepted.size(); ++i) {
        b.accepted.push_back(
            ref_from_json(accepted[i], jsonio::elem(path + ".accepted", i)));
        if (i > 0 && !(b.accepted[i - 1] < b.accepted[i])) {
            jsonio::fail(jsonio::elem(path + ".accepted", i),
                         "references not in strict canonical order");
        }
    }
    if (const json* ts = jsonio::opt_member(j, "local_timestamp")) {
        b.local_timestamp = jsonio::get_int(*ts, path + ".local_timestamp");
    }
    return b;
}

Chain chain_from_json(const json& j, const std::string& path) {
    jsonio::object_at(j, path);
    jsonio::allow_keys(j, path, {"id", "blocks", "forgotten"});
    Chain chain;
    chain.id.value = jsonio::get_string(jsonio::member(j, "id", path), path + ".id");
    if (!valid_chain_id(chain.id.value)) {
        jsonio::fail(path + ".id", "invalid chain id");
    }
    const json& blocks =
        jsonio::array_at(jsonio::member(j, "blocks", path), path + ".blocks");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        chain.blocks.push_back(
            block_from_json(blocks[i], chain.id, jsonio::elem(path + ".blocks", i)));
    }
    if (const json* forgotten = jsonio::opt_member(j, "forgotten")) {
        const std::string fpath = path + ".forgotten";
        jsonio::array_at(*forgotten, fpath);
        std::uint64_t prev = 0;
        for (std::size_t i = 0; i < forgotten->size(); ++i) {
            const std::string epath = jsonio::elem(fpath, i);
            std::uint64_t h = jsonio::get_uint((*forgotten)[i], epath);
            if (h >= chain.blocks.size()) jsonio::fail(epath, "height out of range");
            if (i > 0 && h <= prev) jsonio::fail(epath, "heights not strictly increasing");
            chain.forgotten.insert(h);
            prev = h;
        }
    }
    return chain;
}

PendingAssociation pending_from_json(const json& j, const std::string& path) {
    jsonio::object_at(j, path);
    jsonio::allow_keys(j, path, {"from_chain", "from_block_hash", "to_chain", "sent_at"});
    PendingAssociation p;
    p.from_chain.value =
        jsonio::get_string(jsonio::member(j, "from_chain", path), path + ".from_chain");
    p.from_block_hash = jsonio::get_digest(jsonio::member(j, "from_block_hash", path),
                                           path + ".from_block_hash");
    p.to_chain.value =
        jsonio::get_string(jsonio::member(j, "to_chain", path), path + ".to_chain");
    p.sent_at = jsonio::get_int(jsonio::member(j, "sent_at", path), path + ".sent_at");
    return p;
}

void check_version(const json& doc, int expected, const std::string& path) {
    std::int64_t v = jsonio::get_int(jsonio::member(doc, "format_version", "$"), path);
    if (v != expected) {
        jsonio::fail(path, "unsupported format_version " + std::to_string(v));
    }
}

} // namespace

std::string save_snapshot(const NetworkSnapshot& snapshot) {
    json doc;
    doc["format_version"] = kSnapshotFormatVersion;
    json chains = json::array();
    for (const auto& [id, chain] : snapshot.chains) {
        json jc;
        jc["id"] = id.value;
        json blocks = json::array();
        for (const Block& b : chain.blocks) {
            json jb;
            jb["height"] = b.height;
            jb["prev_hash"] = b.prev_hash.to_hex();
            jb["payload_hash"] = b.payload_hash.to_hex();
            jb["summary_hash"] = b.summary_hash.to_hex();
            json accepted = json::array();
            for (const AssociationRef& r : b.accepted) accepted.push_back(ref_to_json(r));
            jb["accepted"] = std::move(accepted);
            if (b.local_timestamp) jb["local_timestamp"] = *b.local_timestamp;
            blocks.push_back(std::move(jb));
        }
        jc["blocks"] = std::move(blocks);
        if (!chain.forgotten.empty()) {
            json forgotten = json::array();
            for (std::uint64_t h : chain.forgotten) forgotten.push_back(h);
            jc["forgotten"] = std::move(forgotten);
        }
        chains.push_back(std::move(jc));
    }
    doc["chains"] = std::move(chains);
    json pending = json::array();
    for (const PendingAssociation& p : snapshot.pending) {
        pending.push_back(json{{"from_chain", p.from_chain.value},
                               {"from_block_hash", p.from_block_hash.to_hex()},
                               {"to_chain", p.to_chain.value},
                               {"sent_at", p.sent_at}});
    }
    doc["pending"] = std::move(pending);
    return doc.dump(2) + "\n";
}

NetworkSnapshot load_snapshot(const std::string& text, bool verify) {
    json doc = jsonio::parse(text);
    jsonio::object_at(doc, "$");
    jsonio::allow_keys(doc, "$", {"format_version", "chains", "pending"});
    check_version(doc, kSnapshotFormatVersion, "$.format_version");

    NetworkSnapshot snapshot;
    const json& chains =
        jsonio::array_at(jsonio::member(doc, "chains", "$"), "$.chains");
    std::string prev_id;
    for (std::size_t i = 0; i < chains.size(); ++i) {
        const std::string path = jsonio::elem("$.chains", i);
        Chain chain = chain_from_json(chains[i], path);
        if (i > 0 && chain.id.value <= prev_id) {
            jsonio::fail(path + ".id", "chains not sorted by id");
        }
        prev_id = chain.id.value;
        snapshot.chains.emplace(chain.id, std::move(chain));
    }
    const json& pending =
        jsonio::array_at(jsonio::member(doc, "pending", "$"), "$.pending");
    for (std::size_t i = 0; i < pending.size(); ++i) {
        snapshot.pending.push_back(
            pending_from_json(pending[i], jsonio::elem("$.pending", i)));
    }

    if (verify) {
        std::vector<Violation> violations = verify_snapshot(snapshot);
        if (!violations.empty()) {
            std::string msg = "snapshot fails verification:";
            for (const Violation& v : violations) msg += "\n  " + describe(v);
            throw InvalidSnapshotError(msg);
        }
    }
    return snapshot;
}

namespace {

const char* event_type_name(SimEvent::Kind kind) {
    switch (kind) {
        case SimEvent::Kind::BlockCreated: return "block_created";
        case SimEvent::Kind::AssociationSent: return "association_sent";
        case SimEvent::Kind::AssociationAccepted: return "association_accepted";
        case SimEvent::Kind::AssociationDropped: return "association_dropped";
    }
    return "?";
}

} // namespace

std::string save_trace(const SimTrace& trace) {
    json doc;
    doc["format_version"] = kTraceFormatVersion;
    json chains = json::array();
    for (const ChainId& id : trace.chains) chains.push_back(id.value);
    doc["chains"] = std::move(chains);
    json events = json::array();
    for (const SimEvent& e : trace.events) {
        json je;
        je["type"] = event_type_name(e.kind);
        je["tick"] = e.tick;
        switch (e.kind) {
            case SimEvent::Kind::BlockCreated:
                je["chain"] = e.chain.value;
                je["height"] = *e.height;
                je["payload_hash"] = e.payload_hash->to_hex();
                break;
            case SimEvent::Kind::AssociationSent:
                je["from"] = e.chain.value;
                je["to"] = e.peer->value;
                break;
            case SimEvent::Kind::AssociationAccepted:
                je["to"] = e.chain.value;
                je["from"] = e.peer->value;
                je["from_height"] = *e.height;
                break;
            case SimEvent::Kind::AssociationDropped:
                je["to"] = e.chain.value;
                je["from"] = e.peer->value;
                break;
        }
        events.push_back(std::move(je));
    }
    doc["events"] = std::move(events);
    return doc.dump(2) + "\n";
}

SimTrace load_trace(const std::string& text) {
    json doc = jsonio::parse(text);
    jsonio::object_at(doc, "$");
    jsonio::allow_keys(doc, "$", {"format_version", "chains", "events"});
    check_version(doc, kTraceFormatVersion, "$.format_version");

    SimTrace trace;
    const json& chains =
        jsonio::array_at(jsonio::member(doc, "chains", "$"), "$.chains");
    for (std::size_t i = 0; i < chains.size(); ++i) {
        trace.chains.push_back(
            ChainId{jsonio::get_string(chains[i], jsonio::elem("$.chains", i))});
    }
    const json& events =
        jsonio::array_at(jsonio::member(doc, "events", "$"), "$.events");
    for (std::size_t i = 0; i < events.size(); ++i) {
        const json& je = events[i];
        const std::string path = jsonio::elem("$.events", i);
        jsonio::object_at(je, path);
        std::string type =
            jsonio::get_string(jsonio::member(je, "type", path), path + ".type");
        std::int64_t tick =
            jsonio::get_int(jsonio::member(je, "tick", path), path + ".tick");
        if (type == "block_created") {
            jsonio::allow_keys(je, path, {"type", "tick", "chain", "height", "payload_hash"});
            trace.events.push_back(SimEvent::block_created(
                tick,
                ChainId{jsonio::get_string(jsonio::member(je, "chain", path),
                                           path + ".chain")},
                jsonio::get_uint(jsonio::member(je, "height", path), path + ".height"),
                jsonio::get_digest(jsonio::member(je, "payload_hash", path),
                                   path + ".payload_hash")));
        } else if (type == "association_sent") {
            jsonio::allow_keys(je, path, {"type", "tick", "from", "to"});
            trace.events.push_back(SimEvent::sent(
                tick,
                ChainId{jsonio::get_string(jsonio::member(je, "from", path),
                                           path + ".from")},
                ChainId{jsonio::get_string(jsonio::member(je, "to", path),
                                           path + ".to")}));
        } else if (type == "association_accepted") {
            jsonio::allow_keys(je, path, {"type", "tick", "to", "from", "from_height"});
            trace.events.push_back(SimEvent::accepted(
                tick,
                ChainId{jsonio::get_string(jsonio::member(je, "to", path), path + ".to")},
                ChainId{jsonio::get_string(jsonio::member(je, "from", path),
                                           path + ".from")},
                jsonio::get_uint(jsonio::member(je, "from_height", path),
                                 path + ".from_height")));
        } else if (type == "association_dropped") {
            jsonio::allow_keys(je, path, {"type", "tick", "to", "from"});
            trace.events.push_back(SimEvent::dropped(
                tick,
                ChainId{jsonio::get_string(jsonio::member(je, "to", path), path + ".to")},
                ChainId{jsonio::get_string(jsonio::member(je, "from", path),
                                           path + ".from")}));
        } else {
            jsonio::fail(path + ".type", "unknown event type '" + type + "'");
        }
    }
    return trace;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw Error("cannot read " + path.string());
    return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw Error("cannot write " + path.string());
}

} // namespace chainorder
