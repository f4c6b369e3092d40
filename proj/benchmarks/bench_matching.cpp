#include <benchmark/benchmark.h>

#include "ovdbg/matching.hpp"
#include "ovdbg/rng.hpp"

using namespace ovdbg;

static BipartiteGraph random_bipartite(int n, double density, uint64_t seed)
{
    Rng rng(seed);
    BipartiteGraph g;
    g.n_left = n;
    g.n_right = n;
    g.adj.resize(n);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (rng.next_bool(density))
                g.adj[u].push_back(v);
    return g;
}

static void BM_hopcroft_karp(benchmark::State &state)
{
    BipartiteGraph g = random_bipartite(static_cast<int>(state.range(0)), 0.1, 42);
    for (auto _ : state)
        benchmark::DoNotOptimize(hopcroft_karp(g));
}
BENCHMARK(BM_hopcroft_karp)->Arg(64)->Arg(256)->Arg(1024);

static void BM_matching_certificate(benchmark::State &state)
{
    BipartiteGraph g = random_bipartite(static_cast<int>(state.range(0)), 0.1, 42);
    std::vector<int> m = hopcroft_karp(g);
    for (auto _ : state)
        benchmark::DoNotOptimize(matching_is_maximum(g, m));
}
BENCHMARK(BM_matching_certificate)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
