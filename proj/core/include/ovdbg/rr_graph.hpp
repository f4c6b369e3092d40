#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ovdbg/arch.hpp"

namespace ovdbg {

enum class RrKind : uint8_t { Source, Opin, ChanX, ChanY, Ipin, Sink, TbIpin };

const char *rr_kind_name(RrKind k);

struct RrNode
{
    RrKind kind;
    int16_t x = 0;
    int16_t y = 0;
    int16_t index = 0;    // track index for channels, slot/pin index otherwise
    uint8_t capacity = 1; // physical exclusivity; sharing is router policy
};

using NodeId = int32_t;
constexpr NodeId kNoNode = -1;

// Per-tile node id bases. Slots are BLEs on CLB tiles and pads on I/O tiles;
// every slot owns one SOURCE and one OPIN. Each input pin owns one IPIN and
// the SINK behind it. TB tiles expose tb_inputs_per_block trace-data pins
// plus one trigger-control pin, all of kind TbIpin.
struct TileNodes
{
    NodeId source_base = kNoNode;
    NodeId opin_base = kNoNode;
    NodeId ipin_base = kNoNode;
    NodeId sink_base = kNoNode;
    NodeId tb_base = kNoNode;
    int16_t n_slots = 0;
    int16_t n_ipins = 0;
    int16_t n_tb_pins = 0;
};

struct RoutingResourceGraph
{
    ArchSpec arch;
    DeviceGrid grid;
    std::vector<RrNode> nodes;

    std::vector<NodeId> out_edges;
    std::vector<int32_t> out_begin; // size nodes+1
    std::vector<NodeId> in_edges;
    std::vector<int32_t> in_begin;

    std::vector<TileNodes> tiles; // index tile_index(x, y)
    NodeId chanx_base = 0;
    NodeId chany_base = 0;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int edge_count() const { return static_cast<int>(out_edges.size()); }

    std::span<const NodeId> fan_out(NodeId n) const
    {
        return {out_edges.data() + out_begin[n], out_edges.data() + out_begin[n + 1]};
    }
    std::span<const NodeId> fan_in(NodeId n) const
    {
        return {in_edges.data() + in_begin[n], in_edges.data() + in_begin[n + 1]};
    }
    int fan_in_count(NodeId n) const { return in_begin[n + 1] - in_begin[n]; }
    bool is_routing_mux(NodeId n) const { return fan_in_count(n) >= 2; }
    bool has_edge(NodeId from, NodeId to) const;

    int tile_index(int x, int y) const { return y * (grid.width + 2) + x; }
    const TileNodes &tile(int x, int y) const { return tiles[tile_index(x, y)]; }

    NodeId source_node(int x, int y, int slot) const { return tile(x, y).source_base + slot; }
    NodeId opin_node(int x, int y, int slot) const { return tile(x, y).opin_base + slot; }
    NodeId ipin_node(int x, int y, int pin) const { return tile(x, y).ipin_base + pin; }
    NodeId sink_node(int x, int y, int pin) const { return tile(x, y).sink_base + pin; }
    NodeId tb_ipin_node(int x, int y, int pin) const { return tile(x, y).tb_base + pin; }

    // CHANX x in [1, width], y in [0, height]; CHANY x in [0, width], y in [1, height]
    NodeId chanx_node(int x, int y, int track) const
    {
        return chanx_base + (y * grid.width + (x - 1)) * arch.channel_width_w + track;
    }
    NodeId chany_node(int x, int y, int track) const
    {
        return chany_base + ((y - 1) * (grid.width + 1) + x) * arch.channel_width_w + track;
    }

    // All trace-data input pins (control pins excluded).
    std::vector<NodeId> trace_data_pins() const;
    // One trigger-control pin per TB block.
    std::vector<NodeId> trigger_control_pins() const;
};

// Deterministic pure function of the architecture. Throws ValidationError on
// an invalid ArchSpec.
RoutingResourceGraph build_rrg(const ArchSpec &arch);

nlohmann::json rrg_to_json(const RoutingResourceGraph &rrg);

enum class Occupancy : uint8_t { Free, User, OverlayTrace, OverlayTrigger };

struct ResourceMask
{
    std::vector<Occupancy> state;

    explicit ResourceMask(size_t n = 0) : state(n, Occupancy::Free) {}
    Occupancy at(NodeId n) const { return state[n]; }
    bool is_free(NodeId n) const { return state[n] == Occupancy::Free; }
    void set(NodeId n, Occupancy o) { state[n] = o; }
    size_t count(Occupancy o) const;
};

struct Routing; // baseline_pnr

// Node marked User iff it appears in any net's route tree; all others Free.
ResourceMask spare_mask(const RoutingResourceGraph &rrg, const Routing &user_routing);

} // namespace ovdbg
