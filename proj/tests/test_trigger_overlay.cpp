#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "ovdbg/bench.hpp"
#include "ovdbg/route.hpp"
#include "ovdbg/synth.hpp"
#include "ovdbg/trigger_overlay.hpp"

using namespace ovdbg;
using namespace ovdbg::test;

namespace {

ArchSpec two_clb_arch()
{
    ArchSpec a;
    a.grid_width = 2;
    a.grid_height = 1;
    a.lut_size_k = 4;
    a.bles_per_clb = 2;
    a.clb_inputs = 8;
    a.channel_width_w = 4;
    a.fc_in = 1.0;
    a.fc_out = 1.0;
    a.tb_column_period = 2;
    a.tb_inputs_per_block = 2;
    a.tb_fc = 1.0;
    return a;
}

TriggerNetlist two_le_trigger()
{
    NetBuilder b("trig");
    b.input("u0");
    b.lut("t0", {"u0"});
    b.lut("fire", {"t0", "u0"});
    b.output("fire");
    return make_trigger(b.take());
}

} // namespace

TEST_CASE("fully occupied fabric: zero cells, zero links")
{
    ArchSpec a = two_clb_arch();
    RoutingResourceGraph g = build_rrg(a);

    NetBuilder nb("full");
    for (int i = 0; i < 4; ++i)
        nb.lut("l" + std::to_string(i), {});
    Netlist n = nb.take();
    Placement p = manual_placement(n);
    put(p, 0, 1, 1, 0, SlotKind::Ble);
    put(p, 1, 1, 1, 1, SlotKind::Ble);
    put(p, 2, 2, 1, 0, SlotKind::Ble);
    put(p, 3, 2, 1, 1, SlotKind::Ble);

    ResourceMask mask(g.nodes.size());
    OverlayFabric fabric = build_trigger_fabric(g, mask, n, p, 2, 1);
    CHECK(fabric.cells.empty());
    CHECK(fabric.links.empty());
}

TEST_CASE("a lone spare CLB has a cell but no links")
{
    ArchSpec a = two_clb_arch();
    RoutingResourceGraph g = build_rrg(a);

    NetBuilder nb("half");
    nb.lut("l0", {});
    nb.lut("l1", {});
    Netlist n = nb.take();
    Placement p = manual_placement(n);
    put(p, 0, 1, 1, 0, SlotKind::Ble);
    put(p, 1, 1, 1, 1, SlotKind::Ble);

    ResourceMask mask(g.nodes.size());
    OverlayFabric fabric = build_trigger_fabric(g, mask, n, p, 2, 1);
    REQUIRE(fabric.cells.size() == 1);
    CHECK(fabric.cells[0].x == 2);
    CHECK(fabric.links.empty());
}

TEST_CASE("two adjacent empty CLBs get node-disjoint links both ways")
{
    ArchSpec a = two_clb_arch();
    RoutingResourceGraph g = build_rrg(a);
    Netlist n = NetBuilder("empty").take();
    Placement p = manual_placement(n);
    ResourceMask mask(g.nodes.size());

    OverlayFabric fabric = build_trigger_fabric(g, mask, n, p, 2, 1);
    REQUIRE(fabric.cells.size() == 2);
    bool fwd = false, back = false;
    for (const OverlayLink &l : fabric.links) {
        if (l.src_cell == 0 && l.dst_cell == 1)
            fwd = true;
        if (l.src_cell == 1 && l.dst_cell == 0)
            back = true;
    }
    CHECK(fwd);
    CHECK(back);
    CHECK(verify_fabric(g, mask, n, p, fabric).empty());

    SUBCASE("fabric JSON round-trips")
    {
        OverlayFabric loaded = fabric_from_json(fabric_to_json(fabric));
        CHECK(fabric_to_json(loaded).dump() == fabric_to_json(fabric).dump());
    }
}

TEST_CASE("2-LE trigger in one cell costs zero (INTRA)")
{
    ArchSpec a = two_clb_arch();
    RoutingResourceGraph g = build_rrg(a);
    Netlist n = NetBuilder("empty").take();
    Placement p = manual_placement(n);
    ResourceMask mask(g.nodes.size());
    OverlayFabric fabric = build_trigger_fabric(g, mask, n, p, 2, 1);

    TriggerNetlist trig = two_le_trigger();
    SAParams params;
    params.seed = 5;
    TriggerMapping m = anneal_trigger(fabric, trig, params);
    CHECK(m.feasible);
    CHECK(m.cost == 0.0);
    for (const ConnRealization &c : m.conns)
        CHECK(c.kind == ConnKind::Intra);

    SUBCASE("best-so-far cost never increases across checkpoints")
    {
        for (size_t i = 1; i < m.checkpoints.size(); ++i)
            CHECK(m.checkpoints[i].second <= m.checkpoints[i - 1].second);
    }
}

TEST_CASE("split trigger across linked one-slot cells costs one link hop")
{
    ArchSpec a = two_clb_arch();
    RoutingResourceGraph g = build_rrg(a);

    // occupy one slot of each CLB so each cell has exactly one spare slot
    NetBuilder nb("half");
    nb.lut("l0", {});
    nb.lut("l1", {});
    Netlist n = nb.take();
    Placement p = manual_placement(n);
    put(p, 0, 1, 1, 1, SlotKind::Ble);
    put(p, 1, 2, 1, 1, SlotKind::Ble);

    ResourceMask mask(g.nodes.size());
    OverlayFabric fabric = build_trigger_fabric(g, mask, n, p, 2, 1);
    REQUIRE(fabric.cells.size() == 2);
    REQUIRE(!fabric.links.empty());

    TriggerNetlist trig = two_le_trigger();
    SAParams params;
    params.seed = 5;
    TriggerMapping m = anneal_trigger(fabric, trig, params);
    CHECK(m.feasible);
    CHECK(m.cost == 1.0); // exactly one inter-cell net over a direct link
    bool saw_link = false;
    for (const ConnRealization &c : m.conns)
        if (c.kind == ConnKind::Link)
            saw_link = true;
    CHECK(saw_link);
}

TEST_CASE("SA recovers the zero-cost solution when one cell has capacity")
{
    ArchSpec a = two_clb_arch();
    RoutingResourceGraph g = build_rrg(a);
    Netlist n = NetBuilder("empty").take();
    Placement p = manual_placement(n);
    ResourceMask mask(g.nodes.size());
    OverlayFabric fabric = build_trigger_fabric(g, mask, n, p, 2, 1);

    TriggerNetlist trig = two_le_trigger();
    // exhaustive oracle over every injective placement
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
    double best = 1e18;
    for (size_t i = 0; i < slots.size(); ++i)
        for (size_t j = 0; j < slots.size(); ++j) {
            if (i == j)
                continue;
            std::map<int, std::pair<int, int>> le_slot{{les[0], slots[i]}, {les[1], slots[j]}};
            best = std::min(best, evaluate_trigger_placement(fabric, trig, le_slot, params));
        }
    CHECK(best == 0.0);

    for (uint64_t seed = 1; seed <= 10; ++seed) {
        SAParams sp;
        sp.seed = seed;
        TriggerMapping m = anneal_trigger(fabric, trig, sp);
        CHECK(m.cost == best);
    }
}

TEST_CASE("blocked output pins are heavily penalized and avoided when possible")
{
    // hand-built fabric: cell 0 has no usable outputs, cells 1 and 2 are linked
    OverlayFabric fabric;
    OverlayCell c0{1, 1, {0}, {0, 1}, {}};      // no out_ok_slots: blocked
    OverlayCell c1{2, 1, {0}, {0, 1}, {0}};
    OverlayCell c2{3, 1, {0}, {0, 1}, {0}};
    fabric.cells = {c0, c1, c2};
    fabric.links.push_back(OverlayLink{1, 0, 2, 0, {}});
    fabric.rebuild_indexes();

    TriggerNetlist trig = two_le_trigger();
    SAParams params;
    params.seed = 3;

    SUBCASE("placing the driver in the blocked cell costs gamma_blocked")
    {
        // driver of the inter-LE net is t0 (drives fire)
        int t0 = trig.netlist.find_block("t0");
        int fire = trig.netlist.find_block("fire");
        std::map<int, std::pair<int, int>> le_slot{{t0, {0, 0}}, {fire, {1, 0}}};
        double cost = evaluate_trigger_placement(fabric, trig, le_slot, params);
        CHECK(cost >= params.gamma_blocked);
    }

    SUBCASE("SA lands on the feasible pair")
    {
        TriggerMapping m = anneal_trigger(fabric, trig, params);
        CHECK(m.feasible);
        CHECK(m.cost < params.gamma_blocked);
        for (const auto &[le, cs] : m.le_slot)
            CHECK(cs.first != 0);
    }
}

TEST_CASE("feasible is equivalent to the absence of blocked terms")
{
    ArchSpec a = two_clb_arch();
    RoutingResourceGraph g = build_rrg(a);
    Netlist n = NetBuilder("empty").take();
    Placement p = manual_placement(n);
    ResourceMask mask(g.nodes.size());
    OverlayFabric fabric = build_trigger_fabric(g, mask, n, p, 2, 1);
    TriggerNetlist trig = two_le_trigger();
    SAParams params;
    TriggerMapping m = anneal_trigger(fabric, trig, params);
    bool any_blocked = false;
    for (const ConnRealization &c : m.conns)
        if (c.kind == ConnKind::Blocked)
            any_blocked = true;
    CHECK(m.feasible == !any_blocked);
    CHECK(m.feasible == m.blocked_les.empty());
}

TEST_CASE("full map_trigger routes feeds and passes the independent checker")
{
    Netlist n = gen_synthetic(19, 40, 0.65);
    ArchSpec arch = size_arch_for(n, 0.75);
    arch.channel_width_w = 12;
    Placement p = place(n, arch, 4);
    RoutingResourceGraph g = build_rrg(arch);
    RouteResult rr = route(n, p, g, 4);
    REQUIRE(rr.ok());
    ResourceMask mask = spare_mask(g, rr.routing);

    OverlayFabric fabric = build_trigger_fabric(g, mask, n, p, 4, 1);
    REQUIRE(!fabric.cells.empty());

    std::vector<OverlaySignal> signals = collect_signals(n, p, g);
    std::vector<std::string> names;
    for (const OverlaySignal &s : signals)
        names.push_back(s.name);
    TriggerNetlist trig = gen_trigger(7, 6, names);

    ResourceMask full_mask = mask;
    apply_fabric_to_mask(fabric, full_mask);
    SAParams params;
    params.seed = 11;
    TriggerMapping m =
        map_trigger(g, full_mask, fabric, trig, signal_opin_map(signals), params);
    REQUIRE(m.feasible);
    for (const FeedRoute &f : m.input_feeds)
        CHECK(f.ok);
    CHECK(m.output_feed.ok);
    CHECK(verify_mapping(g, mask, fabric, trig, m).empty());

    SUBCASE("verifier flags two LEs in one slot")
    {
        TriggerMapping bad = m;
        auto it = bad.le_slot.begin();
        auto first = it->first;
        ++it;
        bad.le_slot[first] = bad.le_slot[it->first];
        auto issues = verify_mapping(g, mask, fabric, trig, bad);
        bool flagged = false;
        for (const auto &i : issues)
            if (i.find("hosts two LEs") != std::string::npos)
                flagged = true;
        CHECK(flagged);
    }

    SUBCASE("verifier flags a feed crossing a user node")
    {
        TriggerMapping bad = m;
        REQUIRE(!bad.input_feeds.empty());
        // find some USER channel node and splice it into the feed path
        NodeId user_chan = kNoNode;
        for (NodeId v = 0; v < g.node_count() && user_chan == kNoNode; ++v)
            if (!mask.is_free(v) &&
                (g.nodes[v].kind == RrKind::ChanX || g.nodes[v].kind == RrKind::ChanY))
                user_chan = v;
        REQUIRE(user_chan != kNoNode);
        bad.input_feeds[0].path.insert(bad.input_feeds[0].path.begin() + 1, user_chan);
        auto issues = verify_mapping(g, mask, fabric, trig, bad);
        bool flagged = false;
        for (const auto &i : issues)
            if (i.find("collides with user") != std::string::npos)
                flagged = true;
        CHECK(flagged);
    }
}

TEST_CASE("merge_trigger grafts taps onto user nets and adds the fire output")
{
    Netlist n = gen_synthetic(23, 20, 0.65);
    std::vector<std::string> names;
    for (int b : n.observable_blocks())
        names.push_back(n.blocks[b].name);
    TriggerNetlist trig = gen_trigger(9, 4, names);
    Netlist merged = merge_trigger(n, trig);

    CHECK(merged.count(BlockKind::Lut) + merged.count(BlockKind::Ff) ==
          n.count(BlockKind::Lut) + n.count(BlockKind::Ff) + trig.le_count());
    CHECK(merged.find_net("trig$fire") >= 0);
    for (const std::string &tap : trig.taps) {
        int net = merged.find_net(tap);
        REQUIRE(net >= 0);
        // the tap net gained at least one trigger sink
        CHECK(merged.nets[net].sinks.size() > n.nets[n.find_net(tap)].sinks.size());
    }
}

TEST_CASE("baseline recompile is deterministic and measures wall time")
{
    Netlist n = gen_synthetic(27, 30, 0.65);
    ArchSpec arch = size_arch_for(n, 0.75);
    arch.channel_width_w = 12;
    std::vector<std::string> names;
    for (int b : n.observable_blocks())
        names.push_back(n.blocks[b].name);
    TriggerNetlist trig = gen_trigger(15, 4, names);

    BaselineRecompileResult a = baseline_recompile_trigger(n, trig, arch, 8);
    BaselineRecompileResult b = baseline_recompile_trigger(n, trig, arch, 8);
    CHECK(a.ok);
    CHECK(b.ok);
    CHECK(a.seconds > 0.0);
    CHECK(a.place_cost == b.place_cost);
}
