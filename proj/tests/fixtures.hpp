#pragma once

// Shared hand-built fixtures for the unit tests. Everything here is
// constructed directly (no generators) so expected values can be reasoned
// out by hand.

#include "ovdbg/arch.hpp"
#include "ovdbg/netlist.hpp"
#include "ovdbg/place.hpp"
#include "ovdbg/rr_graph.hpp"

namespace ovdbg::test {

inline ArchSpec tiny_arch()
{
    ArchSpec a;
    a.grid_width = 1;
    a.grid_height = 1;
    a.lut_size_k = 2;
    a.bles_per_clb = 1;
    a.clb_inputs = 2;
    a.channel_width_w = 2;
    a.fc_in = 1.0;
    a.fc_out = 1.0;
    a.tb_column_period = 0;
    a.tb_inputs_per_block = 2;
    a.tb_fc = 1.0;
    return a;
}

// Programmatic netlist builder to avoid round-tripping through BLIF in
// fixtures that test other layers.
class NetBuilder
{
  public:
    explicit NetBuilder(std::string name) { n_.name = std::move(name); }

    int net(const std::string &name)
    {
        int id = n_.find_net(name);
        if (id >= 0)
            return id;
        n_.nets.push_back(Net{name, -1, {}});
        return static_cast<int>(n_.nets.size() - 1);
    }

    int input(const std::string &name)
    {
        int out = net(name);
        n_.blocks.push_back(Block{name, BlockKind::Input, {}, out, {}});
        n_.nets[out].driver = static_cast<int>(n_.blocks.size() - 1);
        return static_cast<int>(n_.blocks.size() - 1);
    }

    int lut(const std::string &name, const std::vector<std::string> &ins)
    {
        int out = net(name);
        std::vector<int> in_ids;
        for (const auto &i : ins)
            in_ids.push_back(net(i));
        Block b{name, BlockKind::Lut, in_ids, out, {}};
        b.cubes.push_back(std::string(ins.size(), '1') + " 1");
        n_.blocks.push_back(std::move(b));
        int blk = static_cast<int>(n_.blocks.size() - 1);
        n_.nets[out].driver = blk;
        for (size_t pin = 0; pin < in_ids.size(); ++pin)
            n_.nets[in_ids[pin]].sinks.push_back({blk, static_cast<int>(pin)});
        return blk;
    }

    int ff(const std::string &name, const std::string &in)
    {
        int out = net(name);
        int in_id = net(in);
        n_.blocks.push_back(Block{name, BlockKind::Ff, {in_id}, out, {}});
        int blk = static_cast<int>(n_.blocks.size() - 1);
        n_.nets[out].driver = blk;
        n_.nets[in_id].sinks.push_back({blk, 0});
        return blk;
    }

    int output(const std::string &signal)
    {
        int in_id = net(signal);
        n_.blocks.push_back(Block{"out:" + signal, BlockKind::Output, {in_id}, kNoNet, {}});
        int blk = static_cast<int>(n_.blocks.size() - 1);
        n_.nets[in_id].sinks.push_back({blk, 0});
        return blk;
    }

    Netlist take() { return std::move(n_); }

  private:
    Netlist n_;
};

inline Placement manual_placement(const Netlist &n)
{
    Placement p;
    p.block_slot.assign(n.blocks.size(), SlotRef{});
    return p;
}

inline void put(Placement &p, int block, int x, int y, int slot, SlotKind kind)
{
    p.block_slot[block] = SlotRef{static_cast<int16_t>(x), static_cast<int16_t>(y),
                                  static_cast<int16_t>(slot), kind};
}

} // namespace ovdbg::test
