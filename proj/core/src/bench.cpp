#include "ovdbg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <mutex>
#include <thread>

#include "ovdbg/matching.hpp"
#include "ovdbg/propagate.hpp"
#include "ovdbg/rng.hpp"
#include "ovdbg/synth.hpp"

namespace ovdbg {

namespace {

double elapsed_s(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int ceil_even(double v)
{
    int w = static_cast<int>(std::ceil(v));
    return w % 2 == 0 ? w : w + 1;
}

} // namespace

BenchConfig default_bench_config()
{
    BenchConfig cfg;
    const int sizes[] = {50, 70, 100, 130, 160, 200, 250, 300, 350, 400};
    uint64_t seed = 1000;
    for (int n : sizes)
        cfg.circuits.push_back({seed++, n, 0.65});
    cfg.trigger_les = {4, 6, 8, 10, 12, 16, 20, 24, 28, 32};
    return cfg;
}

nlohmann::json bench_config_to_json(const BenchConfig &c)
{
    nlohmann::json circuits = nlohmann::json::array();
    for (const auto &s : c.circuits)
        circuits.push_back({{"seed", s.seed}, {"n_luts", s.n_luts}, {"rent_p", s.rent_p}});
    return nlohmann::json{
        {"circuits", circuits},
        {"trigger_les", c.trigger_les},
        {"util_target", c.util_target},
        {"width_margin", c.width_margin},
        {"fanout_target", c.fanout_target},
        {"link_budget", c.link_budget},
        {"w_hi", c.w_hi},
        {"pnr_seed", c.pnr_seed},
        {"jobs", c.jobs},
        {"thresholds",
         {{"mean_connectivity", c.thresholds.mean_connectivity},
          {"min_connectivity", c.thresholds.min_connectivity},
          {"max_overhead_ratio", c.thresholds.max_overhead_ratio},
          {"min_trigger_speedup", c.thresholds.min_trigger_speedup},
          {"matching_instances", c.thresholds.matching_instances},
          {"matching_max_side", c.thresholds.matching_max_side},
          {"matching_max_seconds", c.thresholds.matching_max_seconds},
          {"config_request_sets", c.thresholds.config_request_sets},
          {"sa_runs", c.thresholds.sa_runs},
          {"sa_min_optimal", c.thresholds.sa_min_optimal},
          {"max_overlay_seconds", c.thresholds.max_overlay_seconds}}},
    };
}

BenchConfig bench_config_from_json(const nlohmann::json &j)
{
    BenchConfig c = default_bench_config();
    if (j.contains("circuits")) {
        c.circuits.clear();
        for (const auto &s : j["circuits"])
            c.circuits.push_back({s.at("seed").get<uint64_t>(), s.at("n_luts").get<int>(),
                                  s.at("rent_p").get<double>()});
    }
    if (j.contains("trigger_les"))
        c.trigger_les = j["trigger_les"].get<std::vector<int>>();
    c.util_target = j.value("util_target", c.util_target);
    c.width_margin = j.value("width_margin", c.width_margin);
    c.fanout_target = j.value("fanout_target", c.fanout_target);
    c.link_budget = j.value("link_budget", c.link_budget);
    c.w_hi = j.value("w_hi", c.w_hi);
    c.pnr_seed = j.value("pnr_seed", c.pnr_seed);
    c.jobs = j.value("jobs", c.jobs);
    if (j.contains("thresholds")) {
        const auto &t = j["thresholds"];
        c.thresholds.mean_connectivity = t.value("mean_connectivity", 0.95);
        c.thresholds.min_connectivity = t.value("min_connectivity", 0.90);
        c.thresholds.max_overhead_ratio = t.value("max_overhead_ratio", 1.0);
        c.thresholds.min_trigger_speedup = t.value("min_trigger_speedup", 10.0);
        c.thresholds.matching_instances = t.value("matching_instances", 200);
        c.thresholds.matching_max_side = t.value("matching_max_side", 12);
        c.thresholds.matching_max_seconds = t.value("matching_max_seconds", 10.0);
        c.thresholds.config_request_sets = t.value("config_request_sets", 50);
        c.thresholds.sa_runs = t.value("sa_runs", 100);
        c.thresholds.sa_min_optimal = t.value("sa_min_optimal", 95);
        c.thresholds.max_overlay_seconds = t.value("max_overlay_seconds", 60.0);
    }
    return c;
}

ArchSpec size_arch_for(const Netlist &netlist, double util_target)
{
    ArchSpec arch; // defaults: K=4, 4 BLEs, 16 inputs, TB period 4
    int logic = netlist.count(BlockKind::Lut) + netlist.count(BlockKind::Ff);
    int io = netlist.count(BlockKind::Input) + netlist.count(BlockKind::Output);

    int side = std::max(2, static_cast<int>(std::ceil(
                               std::sqrt(static_cast<double>(logic) /
                                         (util_target * arch.bles_per_clb)))));
    auto util = [&](int s) {
        return static_cast<double>(logic) / (static_cast<double>(s) * s * arch.bles_per_clb);
    };
    while (util(side) > 0.90)
        ++side;
    while (side > 2 && util(side - 1) <= 0.90 && util(side - 1) >= 0.70 &&
           std::abs(util(side - 1) - util_target) < std::abs(util(side) - util_target))
        --side;
    arch.grid_width = side;
    arch.grid_height = side;
    // pads: the ring must fit all I/O blocks (pads_per_tile = bles_per_clb)
    DeviceGrid grid = DeviceGrid::from_arch(arch);
    while (2 * (grid.width + grid.height) * arch.bles_per_clb < io) {
        ++arch.grid_height;
        grid = DeviceGrid::from_arch(arch);
    }
    return arch;
}

std::vector<OverlaySignal> collect_signals(const Netlist &netlist, const Placement &placement,
                                           const RoutingResourceGraph &rrg)
{
    std::vector<OverlaySignal> out;
    for (int b : netlist.observable_blocks()) {
        const SlotRef &s = placement.block_slot[b];
        out.push_back({netlist.blocks[b].name, rrg.opin_node(s.x, s.y, s.slot)});
    }
    std::sort(out.begin(), out.end(),
              [](const OverlaySignal &a, const OverlaySignal &b) { return a.name < b.name; });
    return out;
}

std::map<std::string, NodeId> signal_opin_map(const std::vector<OverlaySignal> &signals)
{
    std::map<std::string, NodeId> out;
    for (const OverlaySignal &s : signals)
        out[s.name] = s.opin;
    return out;
}

CircuitRunResult run_circuit_pipeline(const BenchCircuitSpec &spec, const BenchConfig &cfg,
                                      PipelineArtifacts &out)
{
    CircuitRunResult r;
    r.n_luts = spec.n_luts;

    out.netlist = gen_synthetic(spec.seed, spec.n_luts, spec.rent_p);
    r.name = out.netlist.name;
    ArchSpec arch = size_arch_for(out.netlist, cfg.util_target);

    auto t0 = std::chrono::steady_clock::now();
    out.placement = place(out.netlist, arch, cfg.pnr_seed);
    r.place_s = elapsed_s(t0);

    t0 = std::chrono::steady_clock::now();
    MinWidthResult minw =
        find_min_channel_width(out.netlist, out.placement, arch, cfg.pnr_seed, cfg.w_hi);
    r.minw_s = elapsed_s(t0);
    r.w_min = minw.w_min;

    r.w_overlay = std::max(2, ceil_even((1.0 + cfg.width_margin) * minw.w_min));
    arch.channel_width_w = r.w_overlay;
    out.arch = arch;
    out.rrg = build_rrg(arch);

    t0 = std::chrono::steady_clock::now();
    RouteResult rr = route(out.netlist, out.placement, out.rrg, cfg.pnr_seed);
    r.route_s = elapsed_s(t0);
    if (!rr.ok())
        throw RoutingInfeasible("circuit " + r.name + " unroutable at W=" +
                                std::to_string(r.w_overlay) + ": " + rr.detail);
    out.routing = std::move(rr.routing);
    r.routing_violations = static_cast<int>(
        verify_routing(out.rrg, out.netlist, out.placement, out.routing).size());

    out.mask = spare_mask(out.rrg, out.routing);
    std::vector<OverlaySignal> signals = collect_signals(out.netlist, out.placement, out.rrg);
    r.signals = static_cast<int>(signals.size());

    OverlayParams params;
    params.fanout_target = cfg.fanout_target;
    params.width_margin = cfg.width_margin;
    t0 = std::chrono::steady_clock::now();
    auto [forest, report] = build_trace_overlay(out.rrg, out.mask, signals,
                                                out.rrg.trace_data_pins(), params, spec.seed);
    r.overlay_s = elapsed_s(t0);
    out.forest = std::move(forest);
    out.report = report;
    r.fraction_connected = report.fraction_connected;
    r.trees = static_cast<int>(out.forest.trees.size());
    r.forest_violations =
        static_cast<int>(verify_forest(out.rrg, out.mask, out.forest).size());
    r.overhead_ratio = r.overlay_s / std::max(1e-9, r.place_s + r.route_s);

    apply_forest_to_mask(out.forest, out.mask);
    out.fabric = build_trigger_fabric(out.rrg, out.mask, out.netlist, out.placement,
                                      cfg.link_budget, spec.seed);
    r.fabric_violations = static_cast<int>(
        verify_fabric(out.rrg, out.mask, out.netlist, out.placement, out.fabric).size());
    return r;
}

TriggerRunResult run_trigger_pair(const PipelineArtifacts &art, const BenchCircuitSpec &spec,
                                  int n_les, const BenchConfig &cfg)
{
    TriggerRunResult r;
    r.circuit = art.netlist.name;
    r.n_les = n_les;

    std::vector<OverlaySignal> signals = collect_signals(art.netlist, art.placement, art.rrg);
    std::vector<std::string> names;
    for (const OverlaySignal &s : signals)
        names.push_back(s.name);
    TriggerNetlist trig = gen_trigger(spec.seed ^ 0x771663ULL, n_les, names);

    SAParams params;
    params.seed = spec.seed;
    ResourceMask fabric_mask = art.mask;
    apply_fabric_to_mask(art.fabric, fabric_mask);
    auto t0 = std::chrono::steady_clock::now();
    TriggerMapping m = map_trigger(art.rrg, fabric_mask, art.fabric, trig,
                                   signal_opin_map(signals), params);
    r.map_s = elapsed_s(t0);
    r.feasible = m.feasible;
    r.cost = m.cost;
    if (m.feasible)
        r.mapping_violations = static_cast<int>(
            verify_mapping(art.rrg, art.mask, art.fabric, trig, m).size());

    BaselineRecompileResult base =
        baseline_recompile_trigger(art.netlist, trig, art.arch, cfg.pnr_seed);
    r.baseline_s = base.seconds;
    r.speedup = base.ok && r.map_s > 0 ? base.seconds / r.map_s : 0.0;
    return r;
}

ConfigSoundnessResult check_config_soundness(const PipelineArtifacts &art, uint64_t seed,
                                             int request_sets)
{
    ConfigSoundnessResult result;
    Rng rng(seed);
    BipartiteConnectivity bip = fold_to_bipartite(art.forest);
    std::map<std::string, NodeId> opins;
    for (const auto &[name, opin] : art.forest.signals)
        opins[name] = opin;

    std::string routing_before = routing_to_json(art.netlist, art.routing).dump();

    for (int set_no = 0; set_no < request_sets; ++set_no) {
        size_t max_req =
            std::min(bip.signals.size(), bip.trace_inputs.size() + 5);
        size_t count = 1 + rng.next_below(std::max<size_t>(1, max_req));
        std::vector<std::string> requested;
        for (size_t i = 0; i < count; ++i)
            requested.push_back(bip.signals[rng.next_below(bip.signals.size())]);

        std::vector<std::string> unmatched;
        auto matching = select_signals(bip, requested, &unmatched);

        // certificate: no augmenting path may remain
        {
            std::vector<std::string> want(requested);
            std::sort(want.begin(), want.end());
            want.erase(std::unique(want.begin(), want.end()), want.end());
            BipartiteGraph g;
            g.n_left = static_cast<int>(want.size());
            g.n_right = static_cast<int>(bip.trace_inputs.size());
            g.adj.resize(want.size());
            std::vector<int> match(want.size(), -1);
            for (size_t i = 0; i < want.size(); ++i) {
                g.adj[i] = bip.edges[bip.signal_index(want[i])];
                auto it = matching.find(want[i]);
                if (it != matching.end()) {
                    auto pos = std::lower_bound(bip.trace_inputs.begin(),
                                                bip.trace_inputs.end(), it->second);
                    match[i] = static_cast<int>(pos - bip.trace_inputs.begin());
                }
            }
            if (!matching_is_maximum(g, match))
                ++result.certificate_failures;
        }

        DebugConfig cfg = emit_mux_config(art.forest, matching);
        PropagationResult prop = simulate_propagation(art.rrg, opins, cfg.mux_selects);
        bool ok = prop.violations.empty();
        // every matched signal arrives at its trace input, and nothing else
        for (const auto &[signal, node] : matching) {
            auto it = prop.delivered.find(node);
            if (it == prop.delivered.end() || it->second != signal)
                ok = false;
        }
        for (const auto &[node, signal] : prop.delivered) {
            auto it = matching.find(signal);
            if (it == matching.end() || it->second != node)
                ok = false;
        }
        if (!ok)
            ++result.propagation_failures;
        ++result.request_sets;
    }

    if (routing_to_json(art.netlist, art.routing).dump() != routing_before)
        ++result.routing_hash_changes;
    return result;
}

namespace {

// exhaustive maximum matching by DP over right-set bitmask
int brute_force_matching(const BipartiteGraph &g)
{
    std::vector<int> adj_mask(g.n_left, 0);
    for (int u = 0; u < g.n_left; ++u)
        for (int v : g.adj[u])
            adj_mask[u] |= 1 << v;
    std::vector<int8_t> memo(static_cast<size_t>(g.n_left + 1) << g.n_right, -1);
    auto rec = [&](auto &&self, int u, int used) -> int {
        if (u == g.n_left)
            return 0;
        size_t key = (static_cast<size_t>(u) << g.n_right) | used;
        if (memo[key] >= 0)
            return memo[key];
        int best = self(self, u + 1, used); // leave u unmatched
        int avail = adj_mask[u] & ~used;
        while (avail) {
            int v = avail & -avail;
            avail ^= v;
            best = std::max(best, 1 + self(self, u + 1, used | v));
        }
        return memo[key] = static_cast<int8_t>(best);
    };
    return rec(rec, 0, 0);
}

} // namespace

MatchingOracleResult check_matching_oracle(uint64_t seed, int instances, int max_side)
{
    MatchingOracleResult result;
    Rng rng(seed);
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < instances; ++i) {
        BipartiteGraph g;
        g.n_left = 1 + static_cast<int>(rng.next_below(max_side));
        g.n_right = 1 + static_cast<int>(rng.next_below(max_side));
        g.adj.resize(g.n_left);
        double density = 0.05 + rng.next_double() * 0.6;
        for (int u = 0; u < g.n_left; ++u) {
            for (int v = 0; v < g.n_right; ++v)
                if (rng.next_bool(density))
                    g.adj[u].push_back(v);
        }
        std::vector<int> match = hopcroft_karp(g);
        int hk = 0;
        for (int v : match)
            if (v >= 0)
                ++hk;
        if (hk != brute_force_matching(g))
            ++result.mismatches;
        ++result.instances;
    }
    result.seconds = elapsed_s(t0);
    return result;
}

SaOptimalityResult check_sa_optimality(uint64_t seed, int runs)
{
    SaOptimalityResult result;

    // fixture: 4 cells x 2 spare slots, mixed link shapes, 4-LE trigger
    OverlayFabric fabric;
    for (int i = 0; i < 4; ++i) {
        OverlayCell cell;
        cell.x = 1 + i % 2;
        cell.y = 1 + i / 2;
        cell.spare_slots = {0, 1};
        cell.free_ipins = {0, 1, 2};
        cell.out_ok_slots = {0, 1};
        fabric.cells.push_back(cell);
    }
    auto add_link = [&](int a, int sa, int b) {
        fabric.links.push_back(OverlayLink{a, sa, b, 0, {}});
    };
    add_link(0, 0, 1);
    add_link(1, 0, 0);
    add_link(1, 1, 2);
    add_link(2, 0, 3);
    add_link(3, 0, 0);
    add_link(0, 1, 3);
    fabric.rebuild_indexes();

    std::vector<std::string> taps = {"sig_a", "sig_b"};
    TriggerNetlist trig = gen_trigger(seed, 4, taps);

    // exhaustive minimum over all injective placements
    std::vector<int> les;
    for (size_t b = 0; b < trig.netlist.blocks.size(); ++b) {
        BlockKind k = trig.netlist.blocks[b].kind;
        if (k == BlockKind::Lut || k == BlockKind::Ff)
            les.push_back(static_cast<int>(b));
    }
    std::vector<std::pair<int, int>> slots;
    for (size_t c = 0; c < fabric.cells.size(); ++c)
        for (int s : fabric.cells[c].spare_slots)
            slots.push_back({static_cast<int>(c), s});

    SAParams params;
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> pick(les.size(), -1);
    std::vector<char> used(slots.size(), 0);
    auto rec = [&](auto &&self, size_t i) -> void {
        if (i == les.size()) {
            std::map<int, std::pair<int, int>> le_slot;
            for (size_t k = 0; k < les.size(); ++k)
                le_slot[les[k]] = slots[pick[k]];
            best = std::min(best, evaluate_trigger_placement(fabric, trig, le_slot, params));
            return;
        }
        for (size_t s = 0; s < slots.size(); ++s) {
            if (used[s])
                continue;
            used[s] = 1;
            pick[i] = static_cast<int>(s);
            self(self, i + 1);
            used[s] = 0;
        }
    };
    rec(rec, 0);

    for (int run = 0; run < runs; ++run) {
        SAParams p;
        p.seed = seed + 7919 * (run + 1);
        TriggerMapping m = anneal_trigger(fabric, trig, p);
        if (std::abs(m.cost - best) < 1e-9)
            ++result.optimal;
        ++result.runs;
    }
    return result;
}

SuiteStats run_bench_suite(const BenchConfig &cfg, const BenchProgress &progress)
{
    SuiteStats stats;
    auto say = [&](const std::string &line) {
        if (progress)
            progress(line);
    };

    const size_t n = cfg.circuits.size();
    std::vector<CircuitRunResult> circuit_results(n);
    std::vector<std::shared_ptr<PipelineArtifacts>> artifacts(n);

    unsigned jobs = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs)
                                 : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<size_t>(1, n)));

    std::mutex mtx;
    size_t next = 0;
    auto worker = [&]() {
        while (true) {
            size_t i;
            {
                std::lock_guard<std::mutex> lock(mtx);
                if (next >= n)
                    return;
                i = next++;
            }
            auto art = std::make_shared<PipelineArtifacts>();
            try {
                circuit_results[i] = run_circuit_pipeline(cfg.circuits[i], cfg, *art);
                artifacts[i] = std::move(art);
            } catch (const std::exception &e) {
                circuit_results[i].n_luts = cfg.circuits[i].n_luts;
                circuit_results[i].error = e.what();
            }
            {
                std::lock_guard<std::mutex> lock(mtx);
                const CircuitRunResult &r = circuit_results[i];
                if (r.error.empty())
                    say("circuit " + r.name + ": wmin=" + std::to_string(r.w_min) + " W=" +
                        std::to_string(r.w_overlay) + " connectivity=" +
                        std::to_string(r.fraction_connected));
                else
                    say("circuit " + std::to_string(r.n_luts) + " LUTs FAILED: " + r.error);
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t)
        pool.emplace_back(worker);
    for (auto &t : pool)
        t.join();
    stats.circuits = circuit_results;

    // aggregates
    double sum_conn = 0, sum_ratio = 0;
    stats.min_connectivity = 1.0;
    for (const CircuitRunResult &r : stats.circuits) {
        sum_conn += r.fraction_connected;
        sum_ratio += r.overhead_ratio;
        stats.min_connectivity = std::min(stats.min_connectivity, r.fraction_connected);
    }
    if (!stats.circuits.empty()) {
        stats.mean_connectivity = sum_conn / stats.circuits.size();
        stats.mean_overhead_ratio = sum_ratio / stats.circuits.size();
    }

    // debug-time soundness on every circuit
    for (size_t i = 0; i < n; ++i) {
        if (!artifacts[i])
            continue;
        ConfigSoundnessResult c = check_config_soundness(
            *artifacts[i], cfg.circuits[i].seed ^ 0xc0ffee, cfg.thresholds.config_request_sets);
        stats.config.request_sets += c.request_sets;
        stats.config.propagation_failures += c.propagation_failures;
        stats.config.certificate_failures += c.certificate_failures;
        stats.config.routing_hash_changes += c.routing_hash_changes;
    }
    say("config soundness: " + std::to_string(stats.config.request_sets) + " request sets, " +
        std::to_string(stats.config.propagation_failures) + " propagation failures");

    // trigger suite
    for (size_t i = 0; i < cfg.trigger_les.size(); ++i) {
        size_t circuit = i % n;
        if (!artifacts[circuit])
            continue;
        stats.triggers.push_back(run_trigger_pair(*artifacts[circuit], cfg.circuits[circuit],
                                                  cfg.trigger_les[i], cfg));
        const TriggerRunResult &t = stats.triggers.back();
        say("trigger " + std::to_string(t.n_les) + " LEs on " + t.circuit + ": speedup=" +
            std::to_string(t.speedup) + (t.feasible ? "" : " (infeasible)"));
    }
    {
        std::vector<double> speedups;
        for (const TriggerRunResult &t : stats.triggers)
            speedups.push_back(t.speedup);
        std::sort(speedups.begin(), speedups.end());
        if (!speedups.empty())
            stats.median_trigger_speedup = speedups.size() % 2 == 1
                                               ? speedups[speedups.size() / 2]
                                               : 0.5 * (speedups[speedups.size() / 2 - 1] +
                                                        speedups[speedups.size() / 2]);
    }

    stats.matching = check_matching_oracle(0x5eed, cfg.thresholds.matching_instances,
                                           cfg.thresholds.matching_max_side);
    say("matching oracle: " + std::to_string(stats.matching.mismatches) + " mismatches over " +
        std::to_string(stats.matching.instances) + " instances");

    stats.sa = check_sa_optimality(0x5a, cfg.thresholds.sa_runs);
    say("SA optimality: " + std::to_string(stats.sa.optimal) + "/" +
        std::to_string(stats.sa.runs));

    // determinism: re-run every pipeline and compare canonical serializations
    {
        auto dump_all = [](const PipelineArtifacts &art) {
            return arch_to_json(art.arch).dump() + emit_netlist(art.netlist) +
                   placement_to_json(art.netlist, art.placement).dump() +
                   routing_to_json(art.netlist, art.routing).dump() +
                   forest_to_json(art.forest).dump() + fabric_to_json(art.fabric).dump();
        };
        std::vector<uint8_t> same(n, 1);
        next = 0;
        auto det_worker = [&]() {
            while (true) {
                size_t i;
                {
                    std::lock_guard<std::mutex> lock(mtx);
                    if (next >= n)
                        return;
                    i = next++;
                }
                if (!artifacts[i])
                    continue;
                PipelineArtifacts again;
                try {
                    run_circuit_pipeline(cfg.circuits[i], cfg, again);
                    same[i] = dump_all(*artifacts[i]) == dump_all(again) ? 1 : 0;
                } catch (const std::exception &) {
                    same[i] = 0;
                }
            }
        };
        std::vector<std::thread> det_pool;
        for (unsigned t = 0; t < jobs; ++t)
            det_pool.emplace_back(det_worker);
        for (auto &t : det_pool)
            t.join();
        for (size_t i = 0; i < n; ++i)
            if (artifacts[i] && !same[i]) {
                stats.determinism_ok = false;
                stats.determinism_diffs.push_back(artifacts[i]->netlist.name);
            }
    }
    say(std::string("determinism: ") + (stats.determinism_ok ? "ok" : "DIFFS FOUND"));
    return stats;
}

nlohmann::json suite_stats_to_json(const SuiteStats &stats)
{
    nlohmann::json circuits = nlohmann::json::array();
    for (const CircuitRunResult &r : stats.circuits)
        circuits.push_back({{"name", r.name},
                            {"n_luts", r.n_luts},
                            {"w_min", r.w_min},
                            {"w_overlay", r.w_overlay},
                            {"place_time_s", r.place_s},
                            {"route_time_s", r.route_s},
                            {"minw_time_s", r.minw_s},
                            {"overlay_time_s", r.overlay_s},
                            {"overhead_ratio", r.overhead_ratio},
                            {"fraction_connected", r.fraction_connected},
                            {"signals", r.signals},
                            {"trees", r.trees},
                            {"routing_violations", r.routing_violations},
                            {"forest_violations", r.forest_violations},
                            {"fabric_violations", r.fabric_violations},
                            {"error", r.error}});
    nlohmann::json triggers = nlohmann::json::array();
    for (const TriggerRunResult &t : stats.triggers)
        triggers.push_back({{"circuit", t.circuit},
                            {"n_les", t.n_les},
                            {"feasible", t.feasible},
                            {"map_time_s", t.map_s},
                            {"baseline_time_s", t.baseline_s},
                            {"speedup", t.speedup},
                            {"mapping_violations", t.mapping_violations},
                            {"cost", t.cost}});
    return nlohmann::json{
        {"circuits", circuits},
        {"triggers", triggers},
        {"mean_connectivity", stats.mean_connectivity},
        {"min_connectivity", stats.min_connectivity},
        {"mean_overhead_ratio", stats.mean_overhead_ratio},
        {"median_trigger_speedup", stats.median_trigger_speedup},
        {"config_soundness",
         {{"request_sets", stats.config.request_sets},
          {"propagation_failures", stats.config.propagation_failures},
          {"certificate_failures", stats.config.certificate_failures},
          {"routing_hash_changes", stats.config.routing_hash_changes}}},
        {"matching_oracle",
         {{"instances", stats.matching.instances},
          {"mismatches", stats.matching.mismatches},
          {"seconds", stats.matching.seconds}}},
        {"sa_optimality", {{"runs", stats.sa.runs}, {"optimal", stats.sa.optimal}}},
        {"determinism_ok", stats.determinism_ok},
    };
}

std::vector<std::string> evaluate_thresholds(const SuiteStats &stats, const BenchThresholds &t,
                                             bool &all_pass)
{
    std::vector<std::string> lines;
    all_pass = true;
    auto line = [&](bool pass, const std::string &text) {
        lines.push_back(std::string(pass ? "PASS" : "FAIL") + " " + text);
        all_pass = all_pass && pass;
    };

    double worst_overlay_s = 0;
    for (const CircuitRunResult &r : stats.circuits)
        worst_overlay_s = std::max(worst_overlay_s, r.overlay_s);
    line(stats.mean_connectivity >= t.mean_connectivity &&
             stats.min_connectivity >= t.min_connectivity &&
             worst_overlay_s <= t.max_overlay_seconds,
         "connectivity: mean=" + std::to_string(stats.mean_connectivity) +
             " (>=" + std::to_string(t.mean_connectivity) + "), min=" +
             std::to_string(stats.min_connectivity) + " (>=" +
             std::to_string(t.min_connectivity) + ")");
    line(stats.mean_overhead_ratio <= t.max_overhead_ratio,
         "overlay overhead: mean ratio=" + std::to_string(stats.mean_overhead_ratio) +
             " (<=" + std::to_string(t.max_overhead_ratio) + ")");
    line(stats.matching.mismatches == 0 && stats.matching.instances >= t.matching_instances &&
             stats.matching.seconds < t.matching_max_seconds,
         "matching oracle: " + std::to_string(stats.matching.instances) + " instances, " +
             std::to_string(stats.matching.mismatches) + " mismatches, " +
             std::to_string(stats.matching.seconds) + "s");
    line(stats.config.propagation_failures == 0 && stats.config.certificate_failures == 0 &&
             stats.config.routing_hash_changes == 0,
         "config soundness: " + std::to_string(stats.config.propagation_failures) +
             " propagation failures, " + std::to_string(stats.config.certificate_failures) +
             " certificate failures, " + std::to_string(stats.config.routing_hash_changes) +
             " routing changes");
    bool mappings_clean = true;
    for (const TriggerRunResult &tr : stats.triggers)
        if (tr.feasible && tr.mapping_violations > 0)
            mappings_clean = false;
    line(stats.median_trigger_speedup >= t.min_trigger_speedup && mappings_clean,
         "trigger speedup: median=" + std::to_string(stats.median_trigger_speedup) + " (>=" +
             std::to_string(t.min_trigger_speedup) + "), mappings " +
             (mappings_clean ? "verified" : "VIOLATED"));
    line(stats.sa.optimal >= t.sa_min_optimal && stats.sa.runs >= t.sa_runs,
         "SA optimality: " + std::to_string(stats.sa.optimal) + "/" +
             std::to_string(stats.sa.runs) + " (>=" + std::to_string(t.sa_min_optimal) + ")");
    bool checkers_clean = true;
    for (const CircuitRunResult &r : stats.circuits)
        if (!r.error.empty() || r.routing_violations || r.forest_violations ||
            r.fabric_violations)
            checkers_clean = false;
    line(checkers_clean, "independent checkers: zero violations on all artifacts");
    line(stats.determinism_ok, "determinism: repeated pipelines byte-identical");
    return lines;
}

} // namespace ovdbg
