#include <doctest.h>

#include "fixtures.hpp"
#include "ovdbg/place.hpp"
#include "ovdbg/rng.hpp"
#include "ovdbg/synth.hpp"

using namespace ovdbg;
using namespace ovdbg::test;

TEST_CASE("single free LUT: any slot legal, zero cost")
{
    NetBuilder b("one");
    b.lut("l0", {}); // no nets at all
    Netlist n = b.take();

    ArchSpec arch;
    arch.grid_width = 2;
    arch.grid_height = 2;
    arch.tb_column_period = 0;

    Placement p = place(n, arch, 1);
    CHECK(verify_placement(n, arch, p).empty());
    CHECK(placement_cost(n, p) == 0.0);
}

TEST_CASE("placement is deterministic under a fixed seed")
{
    Netlist n = gen_synthetic(11, 40, 0.65);
    ArchSpec arch;
    arch.grid_width = 5;
    arch.grid_height = 5;
    Placement a = place(n, arch, 99);
    Placement b = place(n, arch, 99);
    CHECK(placement_to_json(n, a).dump() == placement_to_json(n, b).dump());
}

TEST_CASE("annealed cost beats the best of 100 random placements")
{
    Netlist n = gen_synthetic(21, 50, 0.65);
    ArchSpec arch;
    arch.grid_width = 6;
    arch.grid_height = 6;

    Placement annealed = place(n, arch, 7);
    REQUIRE(verify_placement(n, arch, annealed).empty());
    double annealed_cost = placement_cost(n, annealed);

    // random-sampling oracle, independent of the annealer internals
    DeviceGrid grid = DeviceGrid::from_arch(arch);
    std::vector<SlotRef> ble, pad;
    for (int y = 0; y <= grid.height + 1; ++y)
        for (int x = 0; x <= grid.width + 1; ++x) {
            TileKind t = grid.tile_at(x, y);
            for (int s = 0; s < arch.bles_per_clb; ++s) {
                if (t == TileKind::Clb)
                    ble.push_back({static_cast<int16_t>(x), static_cast<int16_t>(y),
                                   static_cast<int16_t>(s), SlotKind::Ble});
                else if (t == TileKind::Io)
                    pad.push_back({static_cast<int16_t>(x), static_cast<int16_t>(y),
                                   static_cast<int16_t>(s), SlotKind::Pad});
            }
        }
    Rng rng(1234);
    double best_random = 1e18;
    for (int trial = 0; trial < 100; ++trial) {
        rng.shuffle(ble);
        rng.shuffle(pad);
        Placement p = manual_placement(n);
        size_t bi = 0, pi = 0;
        for (size_t blk = 0; blk < n.blocks.size(); ++blk) {
            BlockKind k = n.blocks[blk].kind;
            if (k == BlockKind::Lut || k == BlockKind::Ff)
                p.block_slot[blk] = ble[bi++];
            else
                p.block_slot[blk] = pad[pi++];
        }
        best_random = std::min(best_random, placement_cost(n, p));
    }
    CHECK(annealed_cost <= best_random);
}

TEST_CASE("capacity errors")
{
    NetBuilder b("big");
    for (int i = 0; i < 9; ++i)
        b.lut("l" + std::to_string(i), {});
    Netlist n = b.take();

    ArchSpec arch = tiny_arch(); // 1 CLB x 1 BLE
    arch.bles_per_clb = 2;
    arch.clb_inputs = 4;
    arch.lut_size_k = 4;
    CHECK_THROWS_AS(place(n, arch, 1), CapacityError);
}
