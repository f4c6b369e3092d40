#include <benchmark/benchmark.h>

#include "ovdbg/bench.hpp"
#include "ovdbg/route.hpp"
#include "ovdbg/synth.hpp"

using namespace ovdbg;

static void BM_route(benchmark::State &state)
{
    int n_luts = static_cast<int>(state.range(0));
    Netlist n = gen_synthetic(1, n_luts, 0.65);
    ArchSpec arch = size_arch_for(n, 0.8);
    arch.channel_width_w = 12;
    Placement p = place(n, arch, 1);
    RoutingResourceGraph g = build_rrg(arch);
    for (auto _ : state) {
        RouteResult r = route(n, p, g, 1);
        benchmark::DoNotOptimize(r.ok());
    }
}
BENCHMARK(BM_route)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_trace_overlay(benchmark::State &state)
{
    int n_luts = static_cast<int>(state.range(0));
    Netlist n = gen_synthetic(1, n_luts, 0.65);
    ArchSpec arch = size_arch_for(n, 0.8);
    arch.channel_width_w = 12;
    Placement p = place(n, arch, 1);
    RoutingResourceGraph g = build_rrg(arch);
    RouteResult r = route(n, p, g, 1);
    ResourceMask mask = spare_mask(g, r.routing);
    auto signals = collect_signals(n, p, g);
    OverlayParams params;
    params.fanout_target = 1;
    for (auto _ : state) {
        auto [forest, report] =
            build_trace_overlay(g, mask, signals, g.trace_data_pins(), params, 1);
        benchmark::DoNotOptimize(report.fraction_connected);
    }
}
BENCHMARK(BM_trace_overlay)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
