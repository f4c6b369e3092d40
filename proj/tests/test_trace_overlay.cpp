#include <doctest.h>

#include <queue>
#include <set>

#include "fixtures.hpp"
#include "ovdbg/bench.hpp"
#include "ovdbg/route.hpp"
#include "ovdbg/synth.hpp"
#include "ovdbg/trace_overlay.hpp"

using namespace ovdbg;
using namespace ovdbg::test;

namespace {

ArchSpec corridor_arch()
{
    ArchSpec a;
    a.grid_width = 2;
    a.grid_height = 1;
    a.lut_size_k = 2;
    a.bles_per_clb = 2;
    a.clb_inputs = 4;
    a.channel_width_w = 2;
    a.fc_in = 1.0;
    a.fc_out = 1.0;
    a.tb_column_period = 2; // device columns: CLB, CLB, TB
    a.tb_inputs_per_block = 2;
    a.tb_fc = 1.0;
    return a;
}

// BFS over free channel nodes, the independent shortest-path oracle
int bfs_claimed_nodes(const RoutingResourceGraph &g, const ResourceMask &mask, NodeId opin,
                      const std::set<NodeId> &targets)
{
    std::vector<int> dist(g.node_count(), -1);
    std::queue<NodeId> q;
    dist[opin] = 0;
    q.push(opin);
    while (!q.empty()) {
        NodeId u = q.front();
        q.pop();
        for (NodeId v : g.fan_out(u)) {
            if (dist[v] >= 0)
                continue;
            if (targets.count(v))
                return dist[u] + 1; // claimed nodes on the path
            RrKind k = g.nodes[v].kind;
            if (k != RrKind::ChanX && k != RrKind::ChanY)
                continue;
            if (!mask.is_free(v))
                continue;
            dist[v] = dist[u] + 1;
            q.push(v);
        }
    }
    return -1;
}

} // namespace

TEST_CASE("single signal on an empty grid routes along a BFS-shortest path")
{
    ArchSpec a;
    a.grid_width = 2;
    a.grid_height = 2;
    a.tb_column_period = 2;
    RoutingResourceGraph g = build_rrg(a);
    ResourceMask mask(g.nodes.size()); // everything free

    std::vector<OverlaySignal> signals{{"s", g.opin_node(1, 1, 0)}};
    std::vector<NodeId> inputs = g.trace_data_pins();
    REQUIRE(!inputs.empty());

    OverlayParams params;
    params.fanout_target = 1;
    auto [forest, report] = build_trace_overlay(g, mask, signals, inputs, params, 1);

    REQUIRE(forest.trees.size() == 1);
    CHECK(report.fraction_connected == 1.0);
    CHECK(forest.trees[0].leaves.count("s") == 1);

    int oracle = bfs_claimed_nodes(g, mask, signals[0].opin,
                                   std::set<NodeId>(inputs.begin(), inputs.end()));
    REQUIRE(oracle > 0);
    CHECK(static_cast<int>(forest.trees[0].parent.size()) == oracle);
    CHECK(verify_forest(g, mask, forest).empty());
}

TEST_CASE("no spare resources: empty forest, zero connectivity, no error")
{
    ArchSpec a = corridor_arch();
    RoutingResourceGraph g = build_rrg(a);
    ResourceMask mask(g.nodes.size());
    for (NodeId v = 0; v < g.node_count(); ++v)
        mask.set(v, Occupancy::User);

    std::vector<OverlaySignal> signals{{"s0", g.opin_node(1, 1, 0)},
                                       {"s1", g.opin_node(1, 1, 1)}};
    OverlayParams params;
    params.fanout_target = 1;
    auto [forest, report] =
        build_trace_overlay(g, mask, signals, g.trace_data_pins(), params, 1);
    CHECK(forest.trees.empty());
    CHECK(report.fraction_connected == 0.0);
    CHECK(report.unconnected.size() == 2);
}

TEST_CASE("two signals sharing one corridor join the same tree (mux overuse)")
{
    ArchSpec a = corridor_arch();
    RoutingResourceGraph g = build_rrg(a);

    // everything USER except one track-0 corridor to one trace input
    ResourceMask mask(g.nodes.size());
    for (NodeId v = 0; v < g.node_count(); ++v)
        mask.set(v, Occupancy::User);
    NodeId c1 = g.chanx_node(1, 1, 0);
    NodeId c2 = g.chanx_node(2, 1, 0);
    NodeId c3 = g.chanx_node(3, 1, 0);
    NodeId root = g.tb_ipin_node(3, 1, 0);
    for (NodeId v : {c1, c2, c3, root})
        mask.set(v, Occupancy::Free);

    std::vector<OverlaySignal> signals{{"sa", g.opin_node(1, 1, 0)},
                                       {"sb", g.opin_node(1, 1, 1)}};
    OverlayParams params;
    params.fanout_target = 1;
    auto [forest, report] = build_trace_overlay(g, mask, signals, {root}, params, 1);

    REQUIRE(forest.trees.size() == 1);
    const OverlayTree &tree = forest.trees[0];
    CHECK(tree.root == root);
    CHECK(tree.leaves.count("sa") == 1);
    CHECK(tree.leaves.count("sb") == 1);
    CHECK(report.reach.at("sa") == 1);
    CHECK(report.reach.at("sb") == 1);
    CHECK(report.fraction_connected == 1.0);
    CHECK(verify_forest(g, mask, forest).empty());

    SUBCASE("fault injection: a node stolen by a second tree is flagged")
    {
        OverlayForest bad = forest;
        OverlayTree thief;
        thief.root = g.tb_ipin_node(3, 1, 1);
        thief.parent[thief.root] = kNoNode;
        thief.parent[c3] = thief.root; // c3 already belongs to the first tree
        bad.trees.push_back(thief);
        auto issues = verify_forest(g, mask, bad);
        bool disjointness = false;
        for (const auto &i : issues)
            if (i.find("also belongs to tree") != std::string::npos)
                disjointness = true;
        CHECK(disjointness);
    }

    SUBCASE("fault injection: a USER node inside a tree is flagged")
    {
        ResourceMask bad_mask = mask;
        bad_mask.set(c2, Occupancy::User);
        auto issues = verify_forest(g, bad_mask, forest);
        bool flagged = false;
        for (const auto &i : issues)
            if (i.find("not a spare resource") != std::string::npos)
                flagged = true;
        CHECK(flagged);
    }
}

TEST_CASE("overlay on a routed circuit never touches user nodes")
{
    Netlist n = gen_synthetic(13, 40, 0.65);
    ArchSpec arch = size_arch_for(n, 0.75);
    arch.channel_width_w = 10;
    Placement p = place(n, arch, 2);
    RoutingResourceGraph g = build_rrg(arch);
    RouteResult rr = route(n, p, g, 2);
    REQUIRE(rr.ok());

    ResourceMask mask = spare_mask(g, rr.routing);
    std::vector<OverlaySignal> signals = collect_signals(n, p, g);
    OverlayParams params; // fanout_target 2 by default
    auto [forest, report] =
        build_trace_overlay(g, mask, signals, g.trace_data_pins(), params, 3);

    CHECK(verify_forest(g, mask, forest).empty());

    std::set<NodeId> user_nodes;
    for (const RouteTree &t : rr.routing.nets)
        for (const RouteTreeNode &node : t.nodes)
            user_nodes.insert(node.node);
    for (const OverlayTree &t : forest.trees)
        for (const auto &[node, parent] : t.parent)
            CHECK(user_nodes.count(node) == 0);

    SUBCASE("leaf soundness: every leaf chain reaches its root")
    {
        for (const OverlayTree &t : forest.trees)
            for (const auto &[name, leaf] : t.leaves) {
                CHECK(g.has_edge(leaf.opin, leaf.entry));
                NodeId v = leaf.entry;
                size_t steps = 0;
                while (v != t.root && steps <= t.parent.size()) {
                    v = t.parent.at(v);
                    ++steps;
                }
                CHECK(v == t.root);
            }
    }

    SUBCASE("deterministic in the seed")
    {
        auto [forest2, report2] =
            build_trace_overlay(g, mask, signals, g.trace_data_pins(), params, 3);
        CHECK(forest_to_json(forest).dump() == forest_to_json(forest2).dump());
    }

    SUBCASE("forest JSON round-trips")
    {
        OverlayForest loaded = forest_from_json(forest_to_json(forest));
        CHECK(forest_to_json(loaded).dump() == forest_to_json(forest).dump());
    }
}

TEST_CASE("more tracks never reduce connectivity on the regression fixture")
{
    Netlist n = gen_synthetic(31, 60, 0.65);
    ArchSpec arch = size_arch_for(n, 0.85);
    Placement p = place(n, arch, 6);
    MinWidthResult minw = find_min_channel_width(n, p, arch, 6, 64);

    auto fraction_at = [&](int w) {
        ArchSpec a = arch;
        a.channel_width_w = w;
        RoutingResourceGraph g = build_rrg(a);
        RouteResult rr = route(n, p, g, 6);
        REQUIRE(rr.ok());
        ResourceMask mask = spare_mask(g, rr.routing);
        OverlayParams params;
        params.fanout_target = 1;
        auto [forest, report] = build_trace_overlay(g, mask, collect_signals(n, p, g),
                                                    g.trace_data_pins(), params, 1);
        return report.fraction_connected;
    };
    double lo = fraction_at(minw.w_min);
    double hi = fraction_at(minw.w_min + 2);
    CHECK(hi >= lo);
}
