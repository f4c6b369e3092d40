#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "ovdbg/arch.hpp"
#include "ovdbg/debug_config.hpp"
#include "ovdbg/netlist.hpp"
#include "ovdbg/place.hpp"
#include "ovdbg/route.hpp"
#include "ovdbg/rr_graph.hpp"
#include "ovdbg/trace_overlay.hpp"
#include "ovdbg/trigger_overlay.hpp"

namespace ovdbg {

struct BenchThresholds
{
    double mean_connectivity = 0.95;
    double min_connectivity = 0.90;
    double max_overhead_ratio = 1.0;
    double min_trigger_speedup = 10.0; // median over the trigger suite
    int matching_instances = 200;
    int matching_max_side = 12;
    double matching_max_seconds = 10.0;
    int config_request_sets = 50;
    int sa_runs = 100;
    int sa_min_optimal = 95;
    double max_overlay_seconds = 60.0; // per circuit
};

struct BenchCircuitSpec
{
    uint64_t seed = 1;
    int n_luts = 100;
    double rent_p = 0.65;
};

struct BenchConfig
{
    std::vector<BenchCircuitSpec> circuits;
    std::vector<int> trigger_les; // paired with circuits round-robin
    double util_target = 0.8;
    double width_margin = 0.3;
    int fanout_target = 1;
    int link_budget = 4;
    int w_hi = 64;
    uint64_t pnr_seed = 42;
    BenchThresholds thresholds;
    int jobs = 0; // 0 = hardware concurrency
};

BenchConfig default_bench_config();
nlohmann::json bench_config_to_json(const BenchConfig &c);
BenchConfig bench_config_from_json(const nlohmann::json &j);

// Grid sized so logic utilization lands in [0.70, 0.90] (aiming at
// util_target) and the I/O ring fits every pad.
ArchSpec size_arch_for(const Netlist &netlist, double util_target);

// User signals with their placed OPIN nodes.
std::vector<OverlaySignal> collect_signals(const Netlist &netlist, const Placement &placement,
                                           const RoutingResourceGraph &rrg);
std::map<std::string, NodeId> signal_opin_map(const std::vector<OverlaySignal> &signals);

// Everything one compile of one circuit produces, kept for later stages.
struct PipelineArtifacts
{
    ArchSpec arch;
    Netlist netlist;
    Placement placement;
    RoutingResourceGraph rrg;
    Routing routing;
    ResourceMask mask; // user + trace overlay claims
    OverlayForest forest;
    ConnectivityReport report;
    OverlayFabric fabric;
};

struct CircuitRunResult
{
    std::string name;
    int n_luts = 0;
    int w_min = 0;
    int w_overlay = 0;
    double place_s = 0, route_s = 0, minw_s = 0, overlay_s = 0;
    double overhead_ratio = 0; // overlay_s / (place_s + route_s)
    double fraction_connected = 0;
    int signals = 0;
    int trees = 0;
    int routing_violations = 0;
    int forest_violations = 0;
    int fabric_violations = 0;
    std::string error; // non-empty when the pipeline failed
};

// One full compile-time pipeline: synth -> size arch -> place -> min-W ->
// route at the widened W -> trace overlay -> trigger fabric.
CircuitRunResult run_circuit_pipeline(const BenchCircuitSpec &spec, const BenchConfig &cfg,
                                      PipelineArtifacts &out);

struct TriggerRunResult
{
    std::string circuit;
    int n_les = 0;
    bool feasible = false;
    double map_s = 0;
    double baseline_s = 0;
    double speedup = 0;
    int mapping_violations = 0;
    double cost = 0;
};

TriggerRunResult run_trigger_pair(const PipelineArtifacts &art, const BenchCircuitSpec &spec,
                                  int n_les, const BenchConfig &cfg);

struct ConfigSoundnessResult
{
    int request_sets = 0;
    int propagation_failures = 0;
    int certificate_failures = 0;
    int routing_hash_changes = 0;
};

// Criterion harness: random requested sets, matching + mux config +
// independent propagation, plus the user-routing untouched hash check.
ConfigSoundnessResult check_config_soundness(const PipelineArtifacts &art, uint64_t seed,
                                             int request_sets);

struct MatchingOracleResult
{
    int instances = 0;
    int mismatches = 0;
    double seconds = 0;
};

// Hopcroft-Karp vs exhaustive brute force on random bipartite instances.
MatchingOracleResult check_matching_oracle(uint64_t seed, int instances, int max_side);

struct SaOptimalityResult
{
    int runs = 0;
    int optimal = 0;
};

// SA vs exhaustive placement enumeration on small fixtures.
SaOptimalityResult check_sa_optimality(uint64_t seed, int runs);

struct SuiteStats
{
    std::vector<CircuitRunResult> circuits;
    std::vector<TriggerRunResult> triggers;
    ConfigSoundnessResult config;
    MatchingOracleResult matching;
    SaOptimalityResult sa;
    double mean_connectivity = 0;
    double min_connectivity = 0;
    double mean_overhead_ratio = 0;
    double median_trigger_speedup = 0;
    bool determinism_ok = true;
    std::vector<std::string> determinism_diffs;
};

using BenchProgress = std::function<void(const std::string &line)>;

// The whole acceptance-facing suite. Circuits run concurrently (cfg.jobs);
// every stochastic stage is seeded, so results are reproducible.
SuiteStats run_bench_suite(const BenchConfig &cfg, const BenchProgress &progress = {});

nlohmann::json suite_stats_to_json(const SuiteStats &stats);

// Threshold evaluation: returns human-readable pass/fail lines (one per
// criterion) and sets all_pass.
std::vector<std::string> evaluate_thresholds(const SuiteStats &stats, const BenchThresholds &t,
                                             bool &all_pass);

} // namespace ovdbg
