#include "chainorder/cli.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "chainorder/dag.hpp"
#include "chainorder/dot.hpp"
#include "chainorder/errors.hpp"
#include "chainorder/metrics.hpp"
#include "chainorder/order.hpp"
#include "chainorder/report_io.hpp"
#include "chainorder/sim.hpp"
#include "chainorder/snapshot_io.hpp"
#include "chainorder/verify.hpp"
#include "json.hpp"

namespace chainorder {

namespace {

using ordered_json = nlohmann::ordered_json;

EventId parse_event(const std::string& text, const std::string& flag) {
    std::size_t colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
        throw Error(flag + " expects chain:height, got '" + text + "'");
    }
    EventId e;
    e.chain.value = text.substr(0, colon);
    std::string digits = text.substr(colon + 1);
    if (digits.find_first_not_of("0123456789") != std::string::npos) {
        throw Error(flag + " height must be a number, got '" + text + "'");
    }
    try {
        e.height = std::stoull(digits);
    } catch (const std::exception&) {
        throw Error(flag + " height out of range in '" + text + "'");
    }
    return e;
}

std::string join_path(const std::vector<EventId>& path) {
    std::string s;
    for (const EventId& e : path) {
        if (!s.empty()) s += " -> ";
        s += e.label();
    }
    return s;
}

struct CommonOpts {
    bool quiet = false;
    std::string format = "text";

    bool json() const { return format == "json"; }
};

int cmd_simulate(const std::string& config_path, const std::string& snapshot_path,
                 const std::string& trace_path, std::optional<std::uint64_t> seed,
                 const CommonOpts& opts, std::ostream& out, std::ostream& err) {
    SimConfig config = load_sim_config(read_file(config_path));
    if (seed) config.seed = *seed;

    TickHook hook;
    if (!opts.quiet) {
        hook = [&](std::int64_t tick) {
            if ((tick + 1) % 1000 == 0) {
                err << "tick " << (tick + 1) << "/" << config.ticks << "\n";
            }
        };
    }
    SimResult result = run(config, hook);

    write_file(snapshot_path, save_snapshot(result.snapshot));
    if (!trace_path.empty()) write_file(trace_path, save_trace(result.trace));

    std::size_t blocks = 0;
    for (const auto& [id, chain] : result.snapshot.chains) blocks += chain.blocks.size();
    if (opts.json()) {
        ordered_json doc;
        doc["ticks"] = config.ticks;
        doc["chains"] = result.snapshot.chains.size();
        doc["blocks"] = blocks;
        doc["pending"] = result.snapshot.pending.size();
        out << doc.dump(2) << "\n";
    } else if (!opts.quiet) {
        out << "simulated " << config.ticks << " ticks: " << blocks << " blocks on "
            << result.snapshot.chains.size() << " chains, "
            << result.snapshot.pending.size() << " pending\n";
    }
    return 0;
}

int cmd_verify(const std::string& snapshot_path, const CommonOpts& opts,
               std::ostream& out) {
    NetworkSnapshot snapshot = load_snapshot(read_file(snapshot_path), false);
    std::vector<Violation> violations = verify_snapshot(snapshot);
    if (opts.json()) {
        ordered_json doc;
        doc["ok"] = violations.empty();
        ordered_json list = ordered_json::array();
        for (const Violation& v : violations) list.push_back(describe(v));
        doc["violations"] = std::move(list);
        out << doc.dump(2) << "\n";
    } else {
        for (const Violation& v : violations) out << describe(v) << "\n";
        out << (violations.empty() ? "ok" : "invalid") << "\n";
    }
    return violations.empty() ? 0 : 2;
}

int cmd_order(const std::string& snapshot_path, const std::string& mode,
              std::size_t limit, const CommonOpts& opts, std::ostream& out) {
    HappensBeforeDag dag = build_dag(load_snapshot(read_file(snapshot_path)));
    if (mode == "count") {
        BigCount count = count_linear_extensions(dag);
        if (opts.json()) {
            out << count_json(count);
        } else {
            out << count.str() << "\n";
        }
        return 0;
    }
    if (mode == "enumerate") {
        ExtensionEnumeration result = linear_extensions(dag, limit);
        if (opts.json()) {
            out << enumeration_json(result);
        } else {
            for (const LinearExtension& ext : result.extensions) {
                std::string line;
                for (const EventId& e : ext) {
                    if (!line.empty()) line += " ";
                    line += e.label();
                }
                out << line << "\n";
            }
            out << result.extensions.size() << " extension(s)"
                << (result.overflowed ? " (limit reached)" : "") << "\n";
        }
        return 0;
    }
    LinearExtension canonical = canonical_order(dag);
    if (opts.json()) {
        out << extension_json(canonical);
    } else {
        for (const EventId& e : canonical) out << e.label() << "\n";
    }
    return 0;
}

int cmd_metrics(const std::string& snapshot_path, const CommonOpts& opts,
                std::ostream& out) {
    NetworkSnapshot snapshot = load_snapshot(read_file(snapshot_path));
    HappensBeforeDag dag = build_dag(snapshot);
    GranularityReport report = granularity(snapshot, dag);
    std::map<ChainId, std::uint64_t> mainstream = mainstream_score(dag);
    if (opts.json()) {
        out << metrics_report_json(report, mainstream);
        return 0;
    }
    for (const auto& [id, g] : report.per_chain) {
        out << "chain " << id.value << ": " << g.block_count << " block(s)";
        if (g.mean_interval) {
            out << ", mean interval " << g.mean_interval->num << "/"
                << g.mean_interval->den << ", max interval " << *g.max_interval;
        }
        out << "\n";
    }
    out << "comparability: " << report.ordered_cross_pairs << "/"
        << report.total_cross_pairs << " cross pair(s) ordered ("
        << report.comparability_ratio.num << "/" << report.comparability_ratio.den
        << ")\n";
    for (const auto& [id, score] : mainstream) {
        out << "mainstream " << id.value << ": " << score << "\n";
    }
    return 0;
}

int cmd_certify(const std::string& snapshot_path, const std::string& from,
                const std::string& to, const CommonOpts& opts, std::ostream& out) {
    HappensBeforeDag dag = build_dag(load_snapshot(read_file(snapshot_path)));
    Certificate cert =
        order_certificate(dag, parse_event(from, "--from"), parse_event(to, "--to"));
    if (opts.json()) {
        ordered_json doc;
        doc["relation"] = to_string(cert.relation);
        ordered_json path = ordered_json::array();
        for (const EventId& e : cert.path) {
            path.push_back(ordered_json{{"chain", e.chain.value}, {"height", e.height}});
        }
        doc["path"] = std::move(path);
        out << doc.dump(2) << "\n";
    } else if (cert.ordered()) {
        out << join_path(cert.path) << "\n";
    } else {
        out << to_string(cert.relation) << "\n";
    }
    return cert.ordered() ? 0 : 3;
}

int cmd_export_dot(const std::string& snapshot_path, const std::string& out_path,
                   std::ostream& out) {
    HappensBeforeDag dag = build_dag(load_snapshot(read_file(snapshot_path)));
    std::string dot = export_dot(dag);
    if (out_path.empty()) {
        out << dot;
    } else {
        write_file(out_path, dot);
    }
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"user-owned hash chains and the collective time order they imply",
                 "chainorder"};
    app.require_subcommand(1);

    CommonOpts opts;
    app.add_flag("--quiet", opts.quiet, "suppress progress and summary output");
    app.add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"text", "json"}));

    auto* simulate = app.add_subcommand("simulate", "run a configured simulation");
    std::string config_path, out_snapshot, out_trace;
    std::optional<std::uint64_t> seed_override;
    simulate->add_option("--config", config_path, "simulation config file")->required();
    simulate->add_option("--out-snapshot", out_snapshot, "snapshot output file")
        ->required();
    simulate->add_option("--out-trace", out_trace, "trace output file");
    simulate->add_option("--seed", seed_override, "override the config seed");

    std::string snapshot_path;
    auto add_snapshot_arg = [&](CLI::App* cmd) {
        cmd->add_option("snapshot", snapshot_path, "snapshot file")->required();
    };

    auto* verify = app.add_subcommand("verify", "check snapshot integrity");
    add_snapshot_arg(verify);

    auto* order = app.add_subcommand("order", "compute the collective time order");
    add_snapshot_arg(order);
    bool canonical = false, enumerate = false, count = false;
    std::size_t limit = 10;
    auto* flag_canonical =
        order->add_flag("--canonical", canonical, "one canonical linearization");
    auto* flag_enumerate =
        order->add_flag("--enumerate", enumerate, "list linear extensions");
    auto* flag_count = order->add_flag("--count", count, "count linear extensions");
    order->add_option("--limit", limit, "max extensions to list")->needs(flag_enumerate);
    flag_canonical->excludes(flag_enumerate)->excludes(flag_count);
    flag_enumerate->excludes(flag_count);

    auto* metrics = app.add_subcommand("metrics", "granularity and mainstream report");
    add_snapshot_arg(metrics);

    auto* certify = app.add_subcommand("certify", "prove one event precedes another");
    add_snapshot_arg(certify);
    std::string from_text, to_text;
    certify->add_option("--from", from_text, "earlier event as chain:height")->required();
    certify->add_option("--to", to_text, "later event as chain:height")->required();

    auto* export_dot_cmd = app.add_subcommand("export-dot", "write the DAG as Graphviz");
    add_snapshot_arg(export_dot_cmd);
    std::string dot_out;
    export_dot_cmd->add_option("--out", dot_out, "output file (stdout when absent)");

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        std::ostringstream usage;
        int code = app.exit(e, usage, usage);
        (code == 0 ? out : err) << usage.str();
        return code == 0 ? 0 : 1;
    }

    try {
        if (simulate->parsed()) {
            return cmd_simulate(config_path, out_snapshot, out_trace, seed_override,
                                opts, out, err);
        }
        if (verify->parsed()) return cmd_verify(snapshot_path, opts, out);
        if (order->parsed()) {
            std::string mode = count ? "count" : enumerate ? "enumerate" : "canonical";
            return cmd_order(snapshot_path, mode, limit, opts, out);
        }
        if (metrics->parsed()) return cmd_metrics(snapshot_path, opts, out);
        if (certify->parsed()) {
            return cmd_certify(snapshot_path, from_text, to_text, opts, out);
        }
        if (export_dot_cmd->parsed()) {
            return cmd_export_dot(snapshot_path, dot_out, out);
        }
        err << "no command given\n";
        return 1;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidSnapshotError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidTraceError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace chainorder
