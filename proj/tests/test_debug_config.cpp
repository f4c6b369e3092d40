#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "ovdbg/bench.hpp"
#include "ovdbg/debug_config.hpp"
#include "ovdbg/matching.hpp"
#include "ovdbg/propagate.hpp"
#include "ovdbg/rng.hpp"
#include "ovdbg/route.hpp"
#include "ovdbg/synth.hpp"

using namespace ovdbg;
using namespace ovdbg::test;

namespace {

OverlayForest toy_forest()
{
    // two trees over synthetic node ids; fine for fold/matching tests that
    // never consult the RRG
    OverlayForest f;
    f.signals = {{"a", 100}, {"b", 101}, {"c", 102}};
    OverlayTree t1;
    t1.root = 500;
    t1.parent = {{500, kNoNode}, {510, 500}};
    t1.leaves = {{"a", {100, 510}}, {"b", {101, 510}}};
    OverlayTree t2;
    t2.root = 600;
    t2.parent = {{600, kNoNode}, {610, 600}};
    t2.leaves = {{"b", {101, 610}}};
    f.trees = {t1, t2};
    f.signal_trees = {{"a", {0}}, {"b", {0, 1}}};
    return f;
}

} // namespace

TEST_CASE("fold: empty forest gives an empty bipartite graph")
{
    OverlayForest f;
    BipartiteConnectivity bip = fold_to_bipartite(f);
    CHECK(bip.signals.empty());
    CHECK(bip.trace_inputs.empty());
}

TEST_CASE("fold: one tree with leaves {a,b} folds to edges {(a,t),(b,t)}")
{
    OverlayForest f = toy_forest();
    f.trees.pop_back(); // keep only t1
    f.signal_trees = {{"a", {0}}, {"b", {0}}};
    BipartiteConnectivity bip = fold_to_bipartite(f);
    REQUIRE(bip.trace_inputs == std::vector<NodeId>{500});
    CHECK(bip.edges[bip.signal_index("a")] == std::vector<int>{0});
    CHECK(bip.edges[bip.signal_index("b")] == std::vector<int>{0});
    CHECK(bip.edges[bip.signal_index("c")].empty());
}

TEST_CASE("select: disjoint trees match everything, shared tree serves one")
{
    OverlayForest f = toy_forest();
    BipartiteConnectivity bip = fold_to_bipartite(f);

    SUBCASE("a and b land on different trace inputs")
    {
        std::vector<std::string> unmatched;
        auto m = select_signals(bip, {"a", "b"}, &unmatched);
        CHECK(m.size() == 2);
        CHECK(unmatched.empty());
        CHECK(m.at("a") != m.at("b"));
    }

    SUBCASE("two signals on one single-tree forest: one matched, one reported")
    {
        OverlayForest only = toy_forest();
        only.trees.pop_back();
        only.signal_trees = {{"a", {0}}, {"b", {0}}};
        BipartiteConnectivity bip1 = fold_to_bipartite(only);
        std::vector<std::string> unmatched;
        auto m = select_signals(bip1, {"a", "b"}, &unmatched);
        CHECK(m.size() == 1);
        REQUIRE(unmatched.size() == 1);
    }

    SUBCASE("unknown signals are rejected by name")
    {
        try {
            select_signals(bip, {"a", "ghost"});
            FAIL("expected UnknownSignalError");
        } catch (const UnknownSignalError &e) {
            CHECK(e.signal() == "ghost");
        }
    }

    SUBCASE("excess requests are served maximally, not rejected")
    {
        std::vector<std::string> unmatched;
        auto m = select_signals(bip, {"a", "b", "c"}, &unmatched);
        CHECK(m.size() == 2); // c has no edges
        CHECK(unmatched == std::vector<std::string>{"c"});
    }
}

TEST_CASE("hopcroft-karp equals brute force on random instances")
{
    MatchingOracleResult r = check_matching_oracle(0xabc, 60, 10);
    CHECK(r.instances == 60);
    CHECK(r.mismatches == 0);
}

TEST_CASE("matching certificate accepts maximum and rejects non-maximum matchings")
{
    BipartiteGraph g;
    g.n_left = 2;
    g.n_right = 2;
    g.adj = {{0, 1}, {0}};
    std::vector<int> maximum = hopcroft_karp(g);
    CHECK(matching_is_maximum(g, maximum));
    // matching left0->0 blocks left1 although an augmenting path exists
    std::vector<int> stuck = {0, -1};
    CHECK(!matching_is_maximum(g, stuck));
}

TEST_CASE("requested-set monotonicity")
{
    Rng rng(99);
    OverlayForest f = toy_forest();
    BipartiteConnectivity bip = fold_to_bipartite(f);
    std::vector<std::string> all = {"a", "b", "c"};
    size_t prev = 0;
    std::vector<std::string> requested;
    for (const std::string &s : all) {
        requested.push_back(s);
        auto m = select_signals(bip, requested);
        CHECK(m.size() >= prev);
        prev = m.size();
    }
}

TEST_CASE("emit walks a 3-node path and the simulator confirms delivery")
{
    // corridor with the signal one CLB away from the TB column
    ArchSpec a;
    a.grid_width = 2;
    a.grid_height = 1;
    a.lut_size_k = 2;
    a.bles_per_clb = 2;
    a.clb_inputs = 4;
    a.channel_width_w = 2;
    a.fc_in = 1.0;
    a.fc_out = 1.0;
    a.tb_column_period = 2;
    a.tb_inputs_per_block = 2;
    a.tb_fc = 1.0;
    RoutingResourceGraph g = build_rrg(a);

    ResourceMask mask(g.nodes.size());
    for (NodeId v = 0; v < g.node_count(); ++v)
        mask.set(v, Occupancy::User);
    NodeId c2 = g.chanx_node(2, 1, 0);
    NodeId c3 = g.chanx_node(3, 1, 0);
    NodeId root = g.tb_ipin_node(3, 1, 0);
    for (NodeId v : {c2, c3, root})
        mask.set(v, Occupancy::Free);

    std::vector<OverlaySignal> signals{{"s", g.opin_node(2, 1, 0)}};
    OverlayParams params;
    params.fanout_target = 1;
    auto [forest, report] = build_trace_overlay(g, mask, signals, {root}, params, 1);
    REQUIRE(report.fraction_connected == 1.0);
    REQUIRE(forest.trees.size() == 1);
    REQUIRE(forest.trees[0].parent.size() == 3); // c2, c3, root

    auto matching = select_signals(fold_to_bipartite(forest), {"s"});
    DebugConfig cfg = emit_mux_config(forest, matching);
    CHECK(cfg.mux_selects.size() == 3);

    PropagationResult prop = simulate_propagation(g, {{"s", signals[0].opin}}, cfg.mux_selects);
    CHECK(prop.violations.empty());
    REQUIRE(prop.delivered.count(root) == 1);
    CHECK(prop.delivered.at(root) == "s");

    SUBCASE("empty matching emits an empty config")
    {
        DebugConfig empty = emit_mux_config(forest, {});
        CHECK(empty.mux_selects.empty());
    }

    SUBCASE("config JSON round-trips")
    {
        DebugConfig loaded = debug_config_from_json(debug_config_to_json(cfg));
        CHECK(debug_config_to_json(loaded).dump() == debug_config_to_json(cfg).dump());
    }
}

TEST_CASE("fold mirrors explicit tree traversal on a generated forest")
{
    Netlist n = gen_synthetic(41, 30, 0.65);
    ArchSpec arch = size_arch_for(n, 0.75);
    arch.channel_width_w = 10;
    Placement p = place(n, arch, 2);
    RoutingResourceGraph g = build_rrg(arch);
    RouteResult rr = route(n, p, g, 2);
    REQUIRE(rr.ok());
    ResourceMask mask = spare_mask(g, rr.routing);
    OverlayParams params;
    auto [forest, report] = build_trace_overlay(g, mask, collect_signals(n, p, g),
                                                g.trace_data_pins(), params, 1);
    BipartiteConnectivity bip = fold_to_bipartite(forest);

    Rng rng(4242);
    for (int trial = 0; trial < 20; ++trial) {
        const std::string &s = bip.signals[rng.next_below(bip.signals.size())];
        size_t ti = rng.next_below(bip.trace_inputs.size());
        NodeId t = bip.trace_inputs[ti];
        // oracle: walk the forest directly
        bool expected = false;
        for (const OverlayTree &tree : forest.trees) {
            if (tree.root != t)
                continue;
            auto leaf = tree.leaves.find(s);
            if (leaf == tree.leaves.end())
                continue;
            NodeId v = leaf->second.entry;
            size_t steps = 0;
            while (v != tree.root && steps <= tree.parent.size()) {
                v = tree.parent.at(v);
                ++steps;
            }
            expected = v == tree.root;
        }
        const auto &edges = bip.edges[bip.signal_index(s)];
        bool folded =
            std::find(edges.begin(), edges.end(), static_cast<int>(ti)) != edges.end();
        CHECK(folded == expected);
    }
}
