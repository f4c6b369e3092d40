// ovdbg: island-style FPGA debug-overlay toolkit.
//
// Compile-time flow: gen-arch / synth-random -> pnr (and minw) ->
// build-trace-overlay -> build-trigger-fabric. Debug-time flow:
// select-signals / map-trigger, which only ever read the locked user
// artifacts. Every artifact is JSON with a meta block recording the producer
// command and input hashes, so stale derivations are detected on load.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ovdbg/arch.hpp"
#include "ovdbg/artifacts.hpp"
#include "ovdbg/bench.hpp"
#include "ovdbg/debug_config.hpp"
#include "ovdbg/matching.hpp"
#include "ovdbg/netlist.hpp"
#include "ovdbg/place.hpp"
#include "ovdbg/propagate.hpp"
#include "ovdbg/route.hpp"
#include "ovdbg/rr_graph.hpp"
#include "ovdbg/synth.hpp"
#include "ovdbg/trace_overlay.hpp"
#include "ovdbg/trigger_overlay.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ovdbg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitValidation = 2;
constexpr int kExitAlgorithm = 3;

struct Ctx
{
    fs::path dir = ".";

    fs::path path(const std::string &name) const { return dir / name; }

    std::string read_text(const std::string &name) const
    {
        std::ifstream in(path(name), std::ios::binary);
        if (!in)
            throw std::runtime_error("missing artifact " + name + " in " + dir.string());
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    }

    void write_text(const std::string &name, const std::string &text) const
    {
        std::ofstream out(path(name), std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + name);
        out << text;
    }

    json load(const std::string &name, bool check_stale = true) const
    {
        ArtifactMeta meta;
        json j = load_artifact(path(name), &meta);
        if (check_stale) {
            auto stale = stale_inputs(dir, meta);
            if (!stale.empty()) {
                std::string list;
                for (const auto &s : stale)
                    list += (list.empty() ? "" : ", ") + s;
                throw std::runtime_error(name + " is stale: inputs changed (" + list + ")");
            }
        }
        return j;
    }

    void save(const std::string &name, json payload, const std::string &producer,
              const std::vector<std::string> &inputs) const
    {
        ArtifactMeta meta;
        meta.producer = producer;
        for (const std::string &in : inputs)
            meta.inputs[in] = file_hash(path(in));
        save_artifact(path(name), std::move(payload), meta);
    }
};

void summary(const json &j)
{
    std::cout << j.dump() << "\n";
}

ArchSpec load_arch(const Ctx &ctx)
{
    return arch_from_json(ctx.load("arch.json", false));
}

Netlist load_netlist(const Ctx &ctx)
{
    return parse_netlist(ctx.read_text("netlist.blif"));
}

// The routed channel width wins over arch.json (pnr --w may override).
RoutingResourceGraph load_rrg_for_routing(const Ctx &ctx, ArchSpec &arch, const json &routing_j)
{
    arch.channel_width_w = routing_j.at("channel_width").get<int>();
    return build_rrg(arch);
}

int cmd_gen_arch(const Ctx &ctx, const ArchSpec &arch)
{
    require_valid(arch);
    ctx.save("arch.json", arch_to_json(arch), "gen-arch", {});
    summary({{"cmd", "gen-arch"}, {"ok", true}, {"grid", {arch.grid_width, arch.grid_height}}});
    return kExitOk;
}

int cmd_synth_random(const Ctx &ctx, uint64_t seed, int n_luts, double rent_p, int max_k)
{
    Netlist n = gen_synthetic(seed, n_luts, rent_p, max_k);
    ctx.write_text("netlist.blif", emit_netlist(n));
    summary({{"cmd", "synth-random"},
             {"ok", true},
             {"name", n.name},
             {"luts", n.count(BlockKind::Lut)},
             {"ffs", n.count(BlockKind::Ff)},
             {"inputs", n.count(BlockKind::Input)},
             {"outputs", n.count(BlockKind::Output)}});
    return kExitOk;
}

int cmd_pnr(const Ctx &ctx, uint64_t seed, int max_iters, int w_override)
{
    ArchSpec arch = load_arch(ctx);
    if (w_override > 0)
        arch.channel_width_w = w_override;
    Netlist netlist = load_netlist(ctx);

    Placement pl = place(netlist, arch, seed);
    auto issues = verify_placement(netlist, arch, pl);
    if (!issues.empty())
        throw std::runtime_error("placement illegal: " + issues.front());
    std::string producer = "pnr --seed " + std::to_string(seed);
    ctx.save("placement.json", placement_to_json(netlist, pl), producer,
             {"arch.json", "netlist.blif"});

    RoutingResourceGraph rrg = build_rrg(arch);
    RouterOptions opts;
    opts.max_iters = max_iters;
    RouteResult rr = route(netlist, pl, rrg, seed, opts);
    if (!rr.ok()) {
        json congested = json::array();
        for (NodeId v : rr.congested)
            congested.push_back(v);
        summary({{"cmd", "pnr"},
                 {"ok", false},
                 {"status", rr.status == RouteStatus::Congested ? "congested" : "disconnected"},
                 {"detail", rr.detail},
                 {"congested", congested}});
        return kExitAlgorithm;
    }
    ctx.save("routing.json", routing_to_json(netlist, rr.routing), producer,
             {"arch.json", "netlist.blif", "placement.json"});
    summary({{"cmd", "pnr"},
             {"ok", true},
             {"w", arch.channel_width_w},
             {"iterations", rr.iterations},
             {"wirelength", routing_wirelength(rrg, rr.routing)},
             {"placement_cost", placement_cost(netlist, pl)}});
    return kExitOk;
}

int cmd_minw(const Ctx &ctx, uint64_t seed, int max_iters, int w_hi)
{
    ArchSpec arch = load_arch(ctx);
    Netlist netlist = load_netlist(ctx);
    Placement pl = placement_from_json(netlist, ctx.load("placement.json"));

    RouterOptions opts;
    opts.max_iters = max_iters;
    MinWidthResult r = find_min_channel_width(netlist, pl, arch, seed, w_hi, opts);
    json attempts = json::array();
    for (auto &[w, ok] : r.attempts)
        attempts.push_back({{"w", w}, {"routed", ok}});
    ctx.save("minw.json", {{"w_min", r.w_min}, {"attempts", attempts}},
             "minw --seed " + std::to_string(seed),
             {"arch.json", "netlist.blif", "placement.json"});
    summary({{"cmd", "minw"}, {"ok", true}, {"w_min", r.w_min}});
    return kExitOk;
}

int cmd_build_trace_overlay(const Ctx &ctx, int fanout, double margin, uint64_t seed,
                            int max_iters)
{
    ArchSpec arch = load_arch(ctx);
    Netlist netlist = load_netlist(ctx);
    Placement pl = placement_from_json(netlist, ctx.load("placement.json"));
    json routing_j = ctx.load("routing.json");
    RoutingResourceGraph rrg = load_rrg_for_routing(ctx, arch, routing_j);
    Routing routing = routing_from_json(netlist, routing_j);

    ResourceMask mask = spare_mask(rrg, routing);
    std::vector<OverlaySignal> signals = collect_signals(netlist, pl, rrg);

    OverlayParams params;
    params.fanout_target = fanout;
    params.width_margin = margin;
    params.max_iters = max_iters;
    auto [forest, report] =
        build_trace_overlay(rrg, mask, signals, rrg.trace_data_pins(), params, seed);

    std::string producer = "build-trace-overlay --fanout " + std::to_string(fanout) +
                           " --margin " + std::to_string(margin) + " --seed " +
                           std::to_string(seed);
    std::vector<std::string> inputs = {"arch.json", "netlist.blif", "placement.json",
                                       "routing.json"};
    ctx.save("overlay.json", forest_to_json(forest), producer, inputs);
    inputs.push_back("overlay.json");
    ctx.save("overlay_report.json", report_to_json(report), producer, inputs);
    summary({{"cmd", "build-trace-overlay"},
             {"ok", true},
             {"fraction_connected", report.fraction_connected},
             {"trees", forest.trees.size()},
             {"unconnected", report.unconnected.size()},
             {"build_time_s", report.build_time_s}});
    return kExitOk;
}

int cmd_build_trigger_fabric(const Ctx &ctx, int link_budget, uint64_t seed,
                             const std::string &after)
{
    ArchSpec arch = load_arch(ctx);
    Netlist netlist = load_netlist(ctx);
    Placement pl = placement_from_json(netlist, ctx.load("placement.json"));
    json routing_j = ctx.load("routing.json");
    RoutingResourceGraph rrg = load_rrg_for_routing(ctx, arch, routing_j);
    Routing routing = routing_from_json(netlist, routing_j);

    ResourceMask mask = spare_mask(rrg, routing);
    std::vector<std::string> inputs = {"arch.json", "netlist.blif", "placement.json",
                                       "routing.json"};
    if (after == "trace") {
        OverlayForest forest = forest_from_json(ctx.load("overlay.json"));
        apply_forest_to_mask(forest, mask);
        inputs.push_back("overlay.json");
    }
    OverlayFabric fabric = build_trigger_fabric(rrg, mask, netlist, pl, link_budget, seed);
    ctx.save("trigger_fabric.json", fabric_to_json(fabric),
             "build-trigger-fabric --link-budget " + std::to_string(link_budget) + " --after " +
                 after,
             inputs);
    summary({{"cmd", "build-trigger-fabric"},
             {"ok", true},
             {"cells", fabric.cells.size()},
             {"links", fabric.links.size()}});
    return kExitOk;
}

int cmd_select_signals(const Ctx &ctx, const std::string &want_csv)
{
    OverlayForest forest = forest_from_json(ctx.load("overlay.json"));

    std::vector<std::string> requested;
    std::stringstream ss(want_csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            requested.push_back(item);
    if (requested.empty())
        throw std::runtime_error("--want needs at least one signal");

    BipartiteConnectivity bip = fold_to_bipartite(forest);
    DebugConfig cfg;
    cfg.matching = select_signals(bip, requested, &cfg.unmatched);
    DebugConfig full = emit_mux_config(forest, cfg.matching);
    full.unmatched = cfg.unmatched;

    ctx.save("debug_config.json", debug_config_to_json(full),
             "select-signals --want " + want_csv, {"overlay.json"});
    summary({{"cmd", "select-signals"},
             {"ok", true},
             {"matched", full.matching.size()},
             {"unmatched", full.unmatched},
             {"selects", full.mux_selects.size()}});
    return full.unmatched.empty() ? kExitOk : kExitPartial;
}

int cmd_map_trigger(const Ctx &ctx, const std::string &trigger_file, uint64_t seed,
                    double gamma_ind, double gamma_blk, int link_budget_unused,
                    const std::string &after)
{
    (void)link_budget_unused;
    ArchSpec arch = load_arch(ctx);
    Netlist netlist = load_netlist(ctx);
    Placement pl = placement_from_json(netlist, ctx.load("placement.json"));
    json routing_j = ctx.load("routing.json");
    RoutingResourceGraph rrg = load_rrg_for_routing(ctx, arch, routing_j);
    Routing routing = routing_from_json(netlist, routing_j);
    OverlayFabric fabric = fabric_from_json(ctx.load("trigger_fabric.json"));
    fabric.rebuild_indexes();

    std::ifstream tf(trigger_file, std::ios::binary);
    if (!tf)
        throw std::runtime_error("cannot read trigger netlist " + trigger_file);
    std::ostringstream ts;
    ts << tf.rdbuf();
    TriggerNetlist trig = make_trigger(parse_netlist(ts.str()));
    ctx.write_text("trigger.blif", emit_netlist(trig.netlist));

    ResourceMask mask = spare_mask(rrg, routing);
    if (after == "trace") {
        OverlayForest forest = forest_from_json(ctx.load("overlay.json"));
        apply_forest_to_mask(forest, mask);
    }
    apply_fabric_to_mask(fabric, mask);

    std::vector<OverlaySignal> signals = collect_signals(netlist, pl, rrg);
    SAParams params;
    params.seed = seed;
    params.gamma_indirect = gamma_ind;
    params.gamma_blocked = gamma_blk;
    TriggerMapping m = map_trigger(rrg, mask, fabric, trig, signal_opin_map(signals), params);

    ctx.save("trigger_config.json", mapping_to_json(trig, m),
             "map-trigger --seed " + std::to_string(seed),
             {"arch.json", "netlist.blif", "placement.json", "routing.json",
              "trigger_fabric.json", "trigger.blif"});
    int failed_feeds = 0;
    for (const FeedRoute &f : m.input_feeds)
        if (!f.ok)
            ++failed_feeds;
    bool output_ok = m.output_feed.cell < 0 || m.output_feed.ok;
    summary({{"cmd", "map-trigger"},
             {"ok", m.feasible},
             {"cost", m.cost},
             {"feasible", m.feasible},
             {"blocked_les", m.blocked_les},
             {"failed_feeds", failed_feeds},
             {"output_feed_ok", output_ok},
             {"map_time_s", m.map_time_s}});
    if (!m.feasible)
        return kExitAlgorithm;
    if (failed_feeds > 0 || !output_ok)
        return kExitPartial;
    return kExitOk;
}

int cmd_verify(const Ctx &ctx)
{
    json checks = json::object();
    int violations = 0;

    ArchSpec arch = load_arch(ctx);
    Netlist netlist = load_netlist(ctx);

    Placement pl;
    RoutingResourceGraph rrg;
    Routing routing;
    bool have_routing = fs::exists(ctx.path("routing.json"));
    if (have_routing) {
        pl = placement_from_json(netlist, ctx.load("placement.json"));
        json routing_j = ctx.load("routing.json");
        rrg = load_rrg_for_routing(ctx, arch, routing_j);
        routing = routing_from_json(netlist, routing_j);
        auto issues = verify_routing(rrg, netlist, pl, routing);
        checks["routing"] = issues;
        violations += static_cast<int>(issues.size());
    }

    ResourceMask mask(rrg.nodes.size());
    OverlayForest forest;
    bool have_overlay = have_routing && fs::exists(ctx.path("overlay.json"));
    if (have_overlay) {
        mask = spare_mask(rrg, routing);
        forest = forest_from_json(ctx.load("overlay.json"));
        auto issues = verify_forest(rrg, mask, forest);
        checks["overlay"] = issues;
        violations += static_cast<int>(issues.size());
    }

    if (have_overlay && fs::exists(ctx.path("debug_config.json"))) {
        DebugConfig cfg = debug_config_from_json(ctx.load("debug_config.json"));
        std::map<std::string, NodeId> opins;
        for (const auto &[name, opin] : forest.signals)
            opins[name] = opin;
        PropagationResult prop = simulate_propagation(rrg, opins, cfg.mux_selects);
        std::vector<std::string> issues = prop.violations;
        for (const auto &[signal, node] : cfg.matching) {
            auto it = prop.delivered.find(node);
            if (it == prop.delivered.end() || it->second != signal)
                issues.push_back("signal '" + signal + "' does not arrive at its trace input");
        }
        for (const auto &[node, signal] : prop.delivered) {
            auto it = cfg.matching.find(signal);
            if (it == cfg.matching.end() || it->second != node)
                issues.push_back("unmatched signal '" + signal + "' arrives at node " +
                                 std::to_string(node));
        }
        checks["debug_config"] = issues;
        violations += static_cast<int>(issues.size());
    }

    bool have_fabric = have_routing && fs::exists(ctx.path("trigger_fabric.json"));
    OverlayFabric fabric;
    if (have_fabric) {
        ResourceMask fabric_mask = spare_mask(rrg, routing);
        if (have_overlay)
            apply_forest_to_mask(forest, fabric_mask);
        fabric = fabric_from_json(ctx.load("trigger_fabric.json"));
        auto issues = verify_fabric(rrg, fabric_mask, netlist, pl, fabric);
        checks["trigger_fabric"] = issues;
        violations += static_cast<int>(issues.size());
    }

    if (have_fabric && fs::exists(ctx.path("trigger_config.json")) &&
        fs::exists(ctx.path("trigger.blif"))) {
        TriggerNetlist trig = make_trigger(parse_netlist(ctx.read_text("trigger.blif")));
        json tj = ctx.load("trigger_config.json");
        TriggerMapping m;
        for (const auto &[name, cs] : tj.at("le_slots").items()) {
            int blk = trig.netlist.find_block(name);
            if (blk >= 0)
                m.le_slot[blk] = {cs.at(0).get<int>(), cs.at(1).get<int>()};
        }
        m.cost = tj.at("cost").get<double>();
        m.feasible = tj.at("feasible").get<bool>();
        m.blocked_les = tj.at("blocked_les").get<std::vector<std::string>>();
        for (const auto &jc : tj.at("conns")) {
            ConnRealization c;
            c.net = trig.netlist.find_net(jc.at("net").get<std::string>());
            c.driver_le = trig.netlist.find_block(jc.at("driver").get<std::string>());
            c.sink_le = trig.netlist.find_block(jc.at("sink").get<std::string>());
            std::string kind = jc.at("kind").get<std::string>();
            c.kind = kind == "INTRA"      ? ConnKind::Intra
                     : kind == "LINK"     ? ConnKind::Link
                     : kind == "INDIRECT" ? ConnKind::Indirect
                                          : ConnKind::Blocked;
            c.link_ids = jc.at("links").get<std::vector<int>>();
            for (const auto &rt : jc.at("route_throughs"))
                c.route_throughs.push_back({rt.at(0).get<int>(), rt.at(1).get<int>()});
            c.cost = jc.at("cost").get<double>();
            m.conns.push_back(std::move(c));
        }
        auto load_feed = [](const json &f) {
            FeedRoute feed;
            feed.tap = f.at("tap").get<std::string>();
            feed.cell = f.at("cell").get<int>();
            feed.ipin = f.at("ipin").get<int>();
            feed.path = f.at("path").get<std::vector<NodeId>>();
            feed.ok = f.at("ok").get<bool>();
            return feed;
        };
        for (const auto &jf : tj.at("input_feeds"))
            m.input_feeds.push_back(load_feed(jf));
        m.output_feed = load_feed(tj.at("output_feed"));

        ResourceMask user_trace_mask = spare_mask(rrg, routing);
        if (have_overlay)
            apply_forest_to_mask(forest, user_trace_mask);
        auto issues = verify_mapping(rrg, user_trace_mask, fabric, trig, m);
        checks["trigger_config"] = issues;
        violations += static_cast<int>(issues.size());
    }

    summary({{"cmd", "verify"}, {"ok", violations == 0}, {"violations", violations},
             {"checks", checks}});
    return violations == 0 ? kExitOk : kExitValidation;
}

int cmd_stats(const Ctx &ctx)
{
    json stats = json::object();
    std::ostringstream table;
    table << "artifact            key                      value\n";
    auto row = [&](const std::string &a, const std::string &k, const json &v) {
        stats[a][k] = v;
        table << a;
        for (size_t i = a.size(); i < 20; ++i)
            table << ' ';
        table << k;
        for (size_t i = k.size(); i < 25; ++i)
            table << ' ';
        table << v.dump() << "\n";
    };

    ArchSpec arch = load_arch(ctx);
    Netlist netlist = load_netlist(ctx);
    row("arch", "grid", json{arch.grid_width, arch.grid_height});
    row("arch", "channel_width_w", arch.channel_width_w);
    row("netlist", "name", netlist.name);
    row("netlist", "luts", netlist.count(BlockKind::Lut));
    row("netlist", "ffs", netlist.count(BlockKind::Ff));
    row("netlist", "ios",
        netlist.count(BlockKind::Input) + netlist.count(BlockKind::Output));

    if (fs::exists(ctx.path("routing.json"))) {
        Placement pl = placement_from_json(netlist, ctx.load("placement.json"));
        json routing_j = ctx.load("routing.json");
        RoutingResourceGraph rrg = load_rrg_for_routing(ctx, arch, routing_j);
        Routing routing = routing_from_json(netlist, routing_j);
        row("placement", "bbox_cost", placement_cost(netlist, pl));
        row("routing", "w", routing.channel_width);
        row("routing", "wirelength", routing_wirelength(rrg, routing));
    }
    if (fs::exists(ctx.path("minw.json")))
        row("minw", "w_min", ctx.load("minw.json").at("w_min"));
    if (fs::exists(ctx.path("overlay_report.json"))) {
        json r = ctx.load("overlay_report.json");
        row("overlay", "fraction_connected", r.at("fraction_connected"));
        row("overlay", "unconnected", r.at("unconnected").size());
        row("overlay", "build_time_s", r.at("build_time_s"));
    }
    if (fs::exists(ctx.path("overlay.json")))
        row("overlay", "trees", ctx.load("overlay.json").at("trees").size());
    if (fs::exists(ctx.path("trigger_fabric.json"))) {
        json f = ctx.load("trigger_fabric.json");
        row("trigger_fabric", "cells", f.at("cells").size());
        row("trigger_fabric", "links", f.at("links").size());
    }
    if (fs::exists(ctx.path("debug_config.json"))) {
        json d = ctx.load("debug_config.json");
        row("debug_config", "matched", d.at("matching").size());
        row("debug_config", "unmatched", d.at("unmatched").size());
    }
    if (fs::exists(ctx.path("trigger_config.json"))) {
        json t = ctx.load("trigger_config.json");
        row("trigger_config", "cost", t.at("cost"));
        row("trigger_config", "feasible", t.at("feasible"));
    }

    ctx.save("stats.json", stats, "stats", {});
    std::cerr << table.str();
    summary({{"cmd", "stats"}, {"ok", true}, {"stats", stats}});
    return kExitOk;
}

int cmd_bench(const Ctx &ctx, const std::string &config_file, int jobs)
{
    BenchConfig cfg = default_bench_config();
    if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in)
            throw std::runtime_error("cannot read bench config " + config_file);
        cfg = bench_config_from_json(json::parse(in));
    }
    if (jobs > 0)
        cfg.jobs = jobs;

    SuiteStats stats = run_bench_suite(cfg, [](const std::string &line) {
        std::cerr << "[bench] " << line << "\n";
    });
    json out = suite_stats_to_json(stats);
    bool all_pass = false;
    std::vector<std::string> lines = evaluate_thresholds(stats, cfg.thresholds, all_pass);
    out["criteria"] = lines;
    out["all_pass"] = all_pass;
    ctx.save("stats.json", out, "bench", {});
    for (const std::string &line : lines)
        std::cerr << line << "\n";
    summary({{"cmd", "bench"}, {"ok", all_pass}, {"stats", "stats.json"}});
    return all_pass ? kExitOk : kExitPartial;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"ovdbg: FPGA debug-overlay construction and configuration toolkit"};
    app.require_subcommand(1);

    Ctx ctx;
    app.add_option("--dir", ctx.dir, "artifact directory")->capture_default_str();

    // gen-arch
    ArchSpec arch;
    auto *gen_arch = app.add_subcommand("gen-arch", "write arch.json");
    gen_arch->add_option("--width", arch.grid_width, "CLB columns")->capture_default_str();
    gen_arch->add_option("--height", arch.grid_height, "CLB rows")->capture_default_str();
    gen_arch->add_option("--k", arch.lut_size_k, "LUT inputs")->capture_default_str();
    gen_arch->add_option("--bles", arch.bles_per_clb, "BLEs per CLB")->capture_default_str();
    gen_arch->add_option("--clb-inputs", arch.clb_inputs, "CLB input pins")
        ->capture_default_str();
    gen_arch->add_option("--w", arch.channel_width_w, "channel width")->capture_default_str();
    gen_arch->add_option("--fc-in", arch.fc_in, "input pin track fraction")
        ->capture_default_str();
    gen_arch->add_option("--fc-out", arch.fc_out, "output pin track fraction")
        ->capture_default_str();
    gen_arch->add_option("--tb-period", arch.tb_column_period, "TB column period (0 = none)")
        ->capture_default_str();
    gen_arch->add_option("--tb-inputs", arch.tb_inputs_per_block, "trace inputs per TB block")
        ->capture_default_str();
    gen_arch->add_option("--tb-fc", arch.tb_fc, "trace input track fraction")
        ->capture_default_str();

    // synth-random
    uint64_t seed = 1;
    int n_luts = 100;
    double rent_p = 0.65;
    int max_k = 4;
    auto *synth = app.add_subcommand("synth-random", "write a synthetic netlist.blif");
    synth->add_option("--seed", seed, "rng seed")->capture_default_str();
    synth->add_option("--luts", n_luts, "LUT count")->capture_default_str();
    synth->add_option("--rent", rent_p, "Rent exponent")->capture_default_str();
    synth->add_option("--max-k", max_k, "max LUT fan-in")->capture_default_str();

    // pnr
    int max_iters = 50;
    int w_override = 0;
    auto *pnr = app.add_subcommand("pnr", "place and route the user circuit");
    pnr->add_option("--seed", seed, "rng seed")->capture_default_str();
    pnr->add_option("--max-iters", max_iters, "router iteration cap")->capture_default_str();
    pnr->add_option("--w", w_override, "override channel width (0 = arch.json)")
        ->capture_default_str();

    // minw
    int w_hi = 64;
    auto *minw = app.add_subcommand("minw", "find the minimum channel width");
    minw->add_option("--seed", seed, "rng seed")->capture_default_str();
    minw->add_option("--max-iters", max_iters, "router iteration cap")->capture_default_str();
    minw->add_option("--w-hi", w_hi, "search upper bound")->capture_default_str();

    // build-trace-overlay
    int fanout = 2;
    double margin = 0.3;
    int overlay_iters = 30;
    auto *bto = app.add_subcommand("build-trace-overlay", "build the trace overlay forest");
    bto->add_option("--fanout", fanout, "trace inputs per signal")->capture_default_str();
    bto->add_option("--margin", margin, "width margin over w_min (recorded)")
        ->capture_default_str();
    bto->add_option("--seed", seed, "rng seed")->capture_default_str();
    bto->add_option("--max-iters", overlay_iters, "negotiation iteration cap")
        ->capture_default_str();

    // build-trigger-fabric
    int link_budget = 4;
    std::string after = "trace";
    auto *btf = app.add_subcommand("build-trigger-fabric", "build the trigger overlay fabric");
    btf->add_option("--link-budget", link_budget, "outgoing links per cell")
        ->capture_default_str();
    btf->add_option("--seed", seed, "rng seed")->capture_default_str();
    btf->add_option("--after", after, "claim order: trace|user")
        ->check(CLI::IsMember({"trace", "user"}))
        ->capture_default_str();

    // select-signals
    std::string want;
    auto *sel = app.add_subcommand("select-signals", "match requested signals to trace inputs");
    sel->add_option("--want", want, "comma-separated signal names")->required();

    // map-trigger
    std::string trigger_file;
    double gamma_ind = 5.0, gamma_blk = 10000.0;
    auto *mt = app.add_subcommand("map-trigger", "map a trigger netlist onto the fabric");
    mt->add_option("--trigger", trigger_file, "trigger BLIF file")->required();
    mt->add_option("--seed", seed, "rng seed")->capture_default_str();
    mt->add_option("--gamma-ind", gamma_ind, "indirect-sink penalty")->capture_default_str();
    mt->add_option("--gamma-blk", gamma_blk, "blocked-pin penalty")->capture_default_str();
    mt->add_option("--after", after, "claim order: trace|user")
        ->check(CLI::IsMember({"trace", "user"}))
        ->capture_default_str();

    auto *verify = app.add_subcommand("verify", "run the independent checkers");
    auto *stats = app.add_subcommand("stats", "summarize artifacts");

    std::string bench_config;
    int jobs = 0;
    auto *bench = app.add_subcommand("bench", "run the bundled benchmark suite");
    bench->add_option("--config", bench_config, "bench config JSON");
    bench->add_option("--jobs", jobs, "parallel circuits (0 = auto)")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_arch->parsed())
            return cmd_gen_arch(ctx, arch);
        if (synth->parsed())
            return cmd_synth_random(ctx, seed, n_luts, rent_p, max_k);
        if (pnr->parsed())
            return cmd_pnr(ctx, seed, max_iters, w_override);
        if (minw->parsed())
            return cmd_minw(ctx, seed, max_iters, w_hi);
        if (bto->parsed())
            return cmd_build_trace_overlay(ctx, fanout, margin, seed, overlay_iters);
        if (btf->parsed())
            return cmd_build_trigger_fabric(ctx, link_budget, seed, after);
        if (sel->parsed())
            return cmd_select_signals(ctx, want);
        if (mt->parsed())
            return cmd_map_trigger(ctx, trigger_file, seed, gamma_ind, gamma_blk, link_budget,
                                   after);
        if (verify->parsed())
            return cmd_verify(ctx);
        if (stats->parsed())
            return cmd_stats(ctx);
        if (bench->parsed())
            return cmd_bench(ctx, bench_config, jobs);
    } catch (const ValidationError &e) {
        summary({{"ok", false}, {"error", e.what()}});
        return kExitValidation;
    } catch (const BlifError &e) {
        summary({{"ok", false}, {"error", e.what()}});
        return kExitValidation;
    } catch (const UnknownSignalError &e) {
        summary({{"ok", false}, {"error", e.what()}, {"signal", e.signal()}});
        return kExitValidation;
    } catch (const CapacityError &e) {
        summary({{"ok", false}, {"error", e.what()}});
        return kExitValidation;
    } catch (const RoutingInfeasible &e) {
        summary({{"ok", false}, {"error", e.what()}});
        return kExitAlgorithm;
    } catch (const std::exception &e) {
        summary({{"ok", false}, {"error", e.what()}});
        return kExitValidation;
    }
    return kExitOk;
}
