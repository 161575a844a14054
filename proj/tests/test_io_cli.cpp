#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "chainorder/cli.hpp"
#include "chainorder/dag.hpp"
#include "chainorder/dot.hpp"
#include "chainorder/report_io.hpp"
#include "chainorder/snapshot_io.hpp"
#include "chainorder/verify.hpp"
#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"

using namespace chainorder;
using testutil::id;
using nlohmann::ordered_json;

namespace {

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("chainorder-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }

    std::string file(const std::string& name) const { return (path / name).string(); }
};

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

const char* kRoundRobinConfig = R"({
  "chains": ["A", "B", "C"],
  "ticks": 14,
  "seed": 1,
  "policy": "fixed_rule",
  "fixed_rule": {
    "period": 3,
    "slots": [
      {"phase": 0, "actor": "C", "send_to": "A"},
      {"phase": 1, "actor": "A", "send_to": "B"},
      {"phase": 2, "actor": "B", "send_to": "C"}
    ]
  }
})";

NetworkSnapshot sample_snapshot() {
    NetworkSnapshot snap = run(testutil::weave_config()).snapshot;
    forget_payload(snap.chains.at(id("A")), 1);
    send_association(snap, id("B"), id("C"), 42);
    return snap;
}

} // namespace

TEST_CASE("snapshot text round trips losslessly") {
    NetworkSnapshot snap = sample_snapshot();
    std::string text = save_snapshot(snap);
    NetworkSnapshot loaded = load_snapshot(text);
    CHECK(loaded == snap);
    CHECK(save_snapshot(loaded) == text);
}

TEST_CASE("snapshot loading is strict about structure") {
    std::string text = save_snapshot(sample_snapshot());

    auto mutate = [&](auto&& fn) {
        ordered_json doc = ordered_json::parse(text);
        fn(doc);
        return doc.dump(2) + "\n";
    };

    CHECK_THROWS_AS((void)load_snapshot("nonsense"), ParseError);
    CHECK_THROWS_AS((void)load_snapshot("[]"), ParseError);

    SUBCASE("unknown top-level key") {
        CHECK_THROWS_AS(
            (void)load_snapshot(mutate([](ordered_json& d) { d["extra"] = 1; })),
            ParseError);
    }
    SUBCASE("unsupported version") {
        CHECK_THROWS_AS((void)load_snapshot(mutate(
                            [](ordered_json& d) { d["format_version"] = 99; })),
                        ParseError);
    }
    SUBCASE("unknown block key") {
        CHECK_THROWS_AS((void)load_snapshot(mutate([](ordered_json& d) {
                            d["chains"][0]["blocks"][0]["color"] = "red";
                        })),
                        ParseError);
    }
    SUBCASE("bad digest text") {
        try {
            (void)load_snapshot(mutate([](ordered_json& d) {
                d["chains"][0]["blocks"][0]["payload_hash"] = "zz";
            }));
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.path == "$.chains[0].blocks[0].payload_hash");
        }
    }
    SUBCASE("uppercase hex is rejected") {
        CHECK_THROWS_AS((void)load_snapshot(mutate([](ordered_json& d) {
                            std::string h = d["chains"][0]["blocks"][0]["summary_hash"];
                            REQUIRE(h != [&] {
                                std::string u = h;
                                for (char& c : u) c = char(toupper(c));
                                return u;
                            }());
                            for (char& c : h) c = char(toupper(c));
                            d["chains"][0]["blocks"][0]["summary_hash"] = h;
                        })),
                        ParseError);
    }
    SUBCASE("chains must be sorted") {
        CHECK_THROWS_AS((void)load_snapshot(mutate([](ordered_json& d) {
                            std::swap(d["chains"][0], d["chains"][1]);
                        })),
                        ParseError);
    }
    SUBCASE("references must stay in canonical order") {
        // B:2 packages refs from both A and C in the weave
        CHECK_THROWS_AS((void)load_snapshot(mutate([](ordered_json& d) {
                            auto& refs = d["chains"][1]["blocks"][2]["accepted"];
                            REQUIRE(refs.size() == 2);
                            std::swap(refs[0], refs[1]);
                        })),
                        ParseError);
    }
    SUBCASE("forgotten heights must exist") {
        CHECK_THROWS_AS((void)load_snapshot(mutate([](ordered_json& d) {
                            d["chains"][0]["forgotten"] = {99};
                        })),
                        ParseError);
    }
    SUBCASE("negative heights are rejected") {
        CHECK_THROWS_AS((void)load_snapshot(mutate([](ordered_json& d) {
                            d["chains"][0]["blocks"][0]["height"] = -1;
                        })),
                        ParseError);
    }
}

TEST_CASE("loading separates structure from semantics") {
    NetworkSnapshot snap = sample_snapshot();
    // damage one payload so the stored summary no longer matches
    ordered_json doc = ordered_json::parse(save_snapshot(snap));
    std::string hex = doc["chains"][0]["blocks"][0]["payload_hash"];
    hex[0] = hex[0] == '0' ? '1' : '0';
    doc["chains"][0]["blocks"][0]["payload_hash"] = hex;
    std::string damaged = doc.dump(2) + "\n";

    CHECK_THROWS_AS((void)load_snapshot(damaged), InvalidSnapshotError);

    NetworkSnapshot loaded = load_snapshot(damaged, false);
    auto violations = verify_snapshot(loaded);
    CHECK(!violations.empty());
}

TEST_CASE("dangling references fail verified loads") {
    NetworkSnapshot snap = sample_snapshot();
    Chain& b = snap.chains.at(id("B"));
    append_block(b, testutil::pay("x"), {AssociationRef{id("A"), sha256("absent")}});
    std::string text = save_snapshot(snap);
    CHECK_THROWS_AS((void)load_snapshot(text), InvalidSnapshotError);
    CHECK(load_snapshot(text, false) == snap);
}

TEST_CASE("trace text round trips and still replays") {
    SimResult result = run(testutil::weave_config());
    std::string text = save_trace(result.trace);
    SimTrace loaded = load_trace(text);
    CHECK(save_trace(loaded) == text);
    CHECK(replay(loaded) == result.snapshot);

    CHECK_THROWS_AS((void)load_trace("{}"), ParseError);
    CHECK_THROWS_AS((void)load_trace(R"({"format_version":1,"chains":[],"events":[{"type":"nap","tick":0}]})"),
                    ParseError);
}

// Checked-in files pin the on-disk formats; a mismatch here means the
// encoding changed and old files would no longer load identically.
TEST_CASE("golden files match freshly simulated output") {
    const std::string dir = TEST_DATA_DIR;

    SimResult rotation = run(testutil::round_robin_config(14));
    CHECK(read_file(dir + "/rotation_snapshot.json") ==
          save_snapshot(rotation.snapshot));
    CHECK(read_file(dir + "/rotation_trace.json") == save_trace(rotation.trace));

    NetworkSnapshot weave = run(testutil::weave_config()).snapshot;
    CHECK(read_file(dir + "/weave_snapshot.json") == save_snapshot(weave));

    NetworkSnapshot reloaded = load_snapshot(read_file(dir + "/weave_snapshot.json"));
    CHECK(reloaded == weave);
}

TEST_CASE("sim config documents parse to the builder configs") {
    SimConfig parsed = load_sim_config(kRoundRobinConfig);
    CHECK(run(parsed).snapshot == run(testutil::round_robin_config(14)).snapshot);

    std::string resaved = save_sim_config(parsed);
    CHECK(run(load_sim_config(resaved)).snapshot == run(parsed).snapshot);

    SimConfig autonomous = load_sim_config(R"({
      "chains": ["A", "B"],
      "ticks": 12,
      "seed": 4,
      "policy": "autonomous",
      "autonomous": {"block_prob": {"A": 0.8, "B": 0.3}, "partner": "uniform_random"}
    })");
    SimConfig expected = testutil::autonomous_config(2, 12, 0.8, 4);
    expected.autonomous->block_prob[id("B")] = 0.3;
    CHECK(run(autonomous).snapshot == run(expected).snapshot);
}

TEST_CASE("sim config rejection cases") {
    CHECK_THROWS_AS((void)load_sim_config("{"), ParseError);
    CHECK_THROWS_AS((void)load_sim_config(R"({"chains":["A"],"ticks":1,"policy":"nope"})"),
                    ParseError);
    CHECK_THROWS_AS(
        (void)load_sim_config(R"({"chains":["A"],"ticks":1,"policy":"fixed_rule"})"),
        ParseError);
    CHECK_THROWS_AS((void)load_sim_config(R"({
        "chains":["A"],"ticks":1,"policy":"autonomous",
        "autonomous":{"block_prob":{"A":1.5}}})"),
                    ParseError);
    // structurally fine, semantically wrong: slot actor missing from chains
    CHECK_THROWS_AS((void)load_sim_config(R"({
        "chains":["A","B"],"ticks":3,"policy":"fixed_rule",
        "fixed_rule":{"period":1,"slots":[{"phase":0,"actor":"Z"}]}})"),
                    InvalidConfigError);
}

TEST_CASE("dot export lists nodes and both edge styles") {
    NetworkSnapshot snap = run(testutil::weave_config()).snapshot;
    std::string dot = export_dot(build_dag(snap));
    CHECK(dot.find("digraph happens_before {") == 0);
    CHECK(dot.find("\"A_0\" [label=\"A:0\"];") != std::string::npos);
    CHECK(dot.find("\"A_0\" -> \"A_1\";") != std::string::npos);
    CHECK(dot.find("\"A_0\" -> \"C_0\" [style=dashed];") != std::string::npos);
    CHECK(dot.back() == '\n');

    HappensBeforeDag empty;
    std::string trivial = export_dot(empty);
    CHECK(trivial.find("digraph") == 0);
    CHECK(trivial.find('}') != std::string::npos);
}

TEST_CASE("metrics report serializes exact fractions") {
    NetworkSnapshot snap = run(testutil::weave_config()).snapshot;
    HappensBeforeDag dag = build_dag(snap);
    std::string text = metrics_report_json(granularity(snap, dag), mainstream_score(dag));
    ordered_json doc = ordered_json::parse(text);
    CHECK(doc["granularity"]["total_cross_pairs"] == 39);
    CHECK(doc["granularity"]["ordered_cross_pairs"] == 38);
    CHECK(doc["granularity"]["comparability_ratio"]["num"] == 38);
    CHECK(doc["granularity"]["comparability_ratio"]["den"] == 39);
    CHECK(doc["mainstream"]["per_chain"].size() == 3);
}

TEST_CASE("cli runs the full pipeline") {
    TempDir dir;
    write_file(dir.file("config.json"), kRoundRobinConfig);

    CliResult sim = cli({"simulate", "--config", dir.file("config.json"),
                         "--out-snapshot", dir.file("snap.json"), "--out-trace",
                         dir.file("trace.json")});
    CAPTURE(sim.err);
    CHECK(sim.code == 0);
    CHECK(std::filesystem::exists(dir.file("snap.json")));
    CHECK(std::filesystem::exists(dir.file("trace.json")));

    CliResult verify_ok = cli({"verify", dir.file("snap.json")});
    CHECK(verify_ok.code == 0);
    CHECK(verify_ok.out == "ok\n");

    CliResult canonical = cli({"order", dir.file("snap.json"), "--canonical"});
    CHECK(canonical.code == 0);
    CHECK(canonical.out.find("C:0\nA:0\nB:0\nC:1\n") == 0);

    CliResult count = cli({"order", dir.file("snap.json"), "--count"});
    CHECK(count.code == 0);
    CHECK(count.out == "1\n");

    CliResult enumerate =
        cli({"order", dir.file("snap.json"), "--enumerate", "--limit", "5"});
    CHECK(enumerate.code == 0);
    CHECK(enumerate.out.find("1 extension(s)") != std::string::npos);

    CliResult metrics = cli({"--format", "json", "metrics", dir.file("snap.json")});
    CHECK(metrics.code == 0);
    CHECK(ordered_json::parse(metrics.out)["granularity"]["per_chain"].size() == 3);

    CliResult certify =
        cli({"certify", dir.file("snap.json"), "--from", "C:0", "--to", "A:4"});
    CHECK(certify.code == 0);
    CHECK(certify.out.find("C:0 ->") == 0);

    CliResult dot = cli({"export-dot", dir.file("snap.json"), "--out",
                         dir.file("graph.dot")});
    CHECK(dot.code == 0);
    CHECK(read_file(dir.file("graph.dot")).find("digraph") == 0);
}

TEST_CASE("cli reports concurrency with its own exit code") {
    TempDir dir;
    write_file(dir.file("weave.json"), save_sim_config(testutil::weave_config()));
    CliResult sim = cli({"--quiet", "simulate", "--config", dir.file("weave.json"),
                         "--out-snapshot", dir.file("snap.json")});
    REQUIRE(sim.code == 0);

    CliResult concurrent =
        cli({"certify", dir.file("snap.json"), "--from", "A:3", "--to", "C:2"});
    CHECK(concurrent.code == 3);
    CHECK(concurrent.out == "concurrent\n");

    CliResult backwards =
        cli({"certify", dir.file("snap.json"), "--from", "C:2", "--to", "C:1"});
    CHECK(backwards.code == 3);
    CHECK(backwards.out == "after\n");

    CliResult json_form = cli({"--format", "json", "certify", dir.file("snap.json"),
                               "--from", "A:0", "--to", "B:2"});
    CHECK(json_form.code == 0);
    ordered_json doc = ordered_json::parse(json_form.out);
    CHECK(doc["relation"] == "before");
    CHECK(doc["path"].size() >= 2);
}

TEST_CASE("cli verify flags corrupted files") {
    TempDir dir;
    write_file(dir.file("config.json"), kRoundRobinConfig);
    REQUIRE(cli({"--quiet", "simulate", "--config", dir.file("config.json"),
                 "--out-snapshot", dir.file("snap.json")})
                .code == 0);

    std::string text = read_file(dir.file("snap.json"));
    std::size_t pos = text.find("\"payload_hash\": \"");
    REQUIRE(pos != std::string::npos);
    pos += std::string("\"payload_hash\": \"").size();
    text[pos] = text[pos] == 'f' ? '0' : 'f';
    write_file(dir.file("bad.json"), text);

    CliResult bad = cli({"verify", dir.file("bad.json")});
    CHECK(bad.code == 2);
    CHECK(bad.out.find("summary-mismatch") != std::string::npos);

    // hex made structurally invalid is still corruption
    text[pos] = 'Z';
    write_file(dir.file("worse.json"), text);
    CliResult worse = cli({"verify", dir.file("worse.json")});
    CHECK(worse.code == 2);
}

TEST_CASE("cli distinguishes usage and data errors") {
    TempDir dir;
    CHECK(cli({"frobnicate"}).code == 1);
    CHECK(cli({"verify"}).code == 1);
    CHECK(cli({"verify", dir.file("absent.json")}).code == 1);
    CHECK(cli({}).code == 1);
    CHECK(cli({"--help"}).code == 0);

    write_file(dir.file("config.json"), R"({"chains":["A"],"ticks":0,"policy":"x"})");
    CliResult bad_config = cli({"simulate", "--config", dir.file("config.json"),
                                "--out-snapshot", dir.file("s.json")});
    CHECK(bad_config.code == 2);

    write_file(dir.file("snap.json"), "{not json");
    CHECK(cli({"order", dir.file("snap.json"), "--canonical"}).code == 2);

    // events outside the dag are a usage problem, not a data problem
    write_file(dir.file("config2.json"), kRoundRobinConfig);
    REQUIRE(cli({"--quiet", "simulate", "--config", dir.file("config2.json"),
                 "--out-snapshot", dir.file("good.json")})
                .code == 0);
    CHECK(cli({"certify", dir.file("good.json"), "--from", "Q:0", "--to", "A:1"}).code ==
          1);
    CHECK(cli({"certify", dir.file("good.json"), "--from", "whoops", "--to", "A:1"})
              .code == 1);
}
