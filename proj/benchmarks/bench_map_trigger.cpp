#include <benchmark/benchmark.h>

#include "ovdbg/bench.hpp"
#include "ovdbg/route.hpp"
#include "ovdbg/synth.hpp"
#include "ovdbg/trigger_overlay.hpp"

using namespace ovdbg;

static void BM_map_trigger(benchmark::State &state)
{
    Netlist n = gen_synthetic(1, 100, 0.65);
    ArchSpec arch = size_arch_for(n, 0.8);
    arch.channel_width_w = 12;
    Placement p = place(n, arch, 1);
    RoutingResourceGraph g = build_rrg(arch);
    RouteResult r = route(n, p, g, 1);
    ResourceMask mask = spare_mask(g, r.routing);
    OverlayFabric fabric = build_trigger_fabric(g, mask, n, p, 4, 1);

    auto signals = collect_signals(n, p, g);
    std::vector<std::string> names;
    for (const auto &s : signals)
        names.push_back(s.name);
    TriggerNetlist trig = gen_trigger(2, static_cast<int>(state.range(0)), names);

    ResourceMask full = mask;
    apply_fabric_to_mask(fabric, full);
    SAParams params;
    for (auto _ : state) {
        TriggerMapping m = map_trigger(g, full, fabric, trig, signal_opin_map(signals), params);
        benchmark::DoNotOptimize(m.cost);
    }
}
BENCHMARK(BM_map_trigger)->Arg(4)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
