#include "ovdbg/rr_graph.hpp"

#include <algorithm>
#include <cmath>

#include "ovdbg/route.hpp"

namespace ovdbg {

const char *rr_kind_name(RrKind k)
{
    switch (k) {
    case RrKind::Source: return "SOURCE";
    case RrKind::Opin: return "OPIN";
    case RrKind::ChanX: return "CHANX";
    case RrKind::ChanY: return "CHANY";
    case RrKind::Ipin: return "IPIN";
    case RrKind::Sink: return "SINK";
    case RrKind::TbIpin: return "TB_IPIN";
    }
    return "?";
}

bool RoutingResourceGraph::has_edge(NodeId from, NodeId to) const
{
    auto span = fan_out(from);
    return std::find(span.begin(), span.end(), to) != span.end();
}

std::vector<NodeId> RoutingResourceGraph::trace_data_pins() const
{
    std::vector<NodeId> out;
    for (int y = 1; y <= grid.height; ++y)
        for (int x = 1; x <= grid.width; ++x)
            if (grid.tile_at(x, y) == TileKind::TraceBuffer) {
                const TileNodes &t = tile(x, y);
                for (int i = 0; i + 1 < t.n_tb_pins; ++i)
                    out.push_back(t.tb_base + i);
            }
    return out;
}

std::vector<NodeId> RoutingResourceGraph::trigger_control_pins() const
{
    std::vector<NodeId> out;
    for (int y = 1; y <= grid.height; ++y)
        for (int x = 1; x <= grid.width; ++x)
            if (grid.tile_at(x, y) == TileKind::TraceBuffer) {
                const TileNodes &t = tile(x, y);
                out.push_back(t.tb_base + t.n_tb_pins - 1);
            }
    return out;
}

namespace {

// ceil so that fc_in + fc_out > 1 guarantees track_count_in + track_count_out
// > W: with the disjoint switch block each track index is an isolated routing
// plane, and pigeonhole then gives every OPIN/IPIN pair a common plane.
int fc_track_count(double fc, int w)
{
    int n = static_cast<int>(std::ceil(fc * w - 1e-9));
    return std::clamp(n, 1, w);
}

// Spread track choices, staggered per pin location and parity-mixed so a
// pin's tracks never collapse onto one parity class of planes.
std::vector<int> fc_tracks(double fc, int w, int stagger)
{
    int n = fc_track_count(fc, w);
    std::vector<char> used(w, 0);
    std::vector<int> tracks;
    tracks.reserve(n);
    for (int j = 0; j < n; ++j) {
        int t = (stagger + j * w / n + (j & 1)) % w;
        while (used[t])
            t = (t + 1) % w;
        used[t] = 1;
        tracks.push_back(t);
    }
    return tracks;
}

struct EdgeAcc
{
    std::vector<std::pair<NodeId, NodeId>> list;
    void add(NodeId from, NodeId to) { list.emplace_back(from, to); }
    void add_bidir(NodeId a, NodeId b)
    {
        list.emplace_back(a, b);
        list.emplace_back(b, a);
    }
};

} // namespace

RoutingResourceGraph build_rrg(const ArchSpec &arch)
{
    require_valid(arch);

    RoutingResourceGraph g;
    g.arch = arch;
    g.grid = DeviceGrid::from_arch(arch);
    const DeviceGrid &grid = g.grid;
    const int W = arch.channel_width_w;
    const int width = grid.width;
    const int height = grid.height;

    g.tiles.assign((width + 2) * (height + 2), TileNodes{});

    auto push_node = [&](RrKind kind, int x, int y, int index) {
        g.nodes.push_back(RrNode{kind, static_cast<int16_t>(x), static_cast<int16_t>(y),
                                 static_cast<int16_t>(index), 1});
        return static_cast<NodeId>(g.nodes.size() - 1);
    };

    // Tile nodes, row-major over the whole device including the I/O ring.
    for (int y = 0; y <= height + 1; ++y) {
        for (int x = 0; x <= width + 1; ++x) {
            TileKind kind = grid.tile_at(x, y);
            TileNodes &t = g.tiles[g.tile_index(x, y)];
            switch (kind) {
            case TileKind::Clb: {
                t.n_slots = static_cast<int16_t>(arch.bles_per_clb);
                t.n_ipins = static_cast<int16_t>(arch.clb_inputs);
                t.source_base = static_cast<NodeId>(g.nodes.size());
                for (int s = 0; s < t.n_slots; ++s)
                    push_node(RrKind::Source, x, y, s);
                t.opin_base = static_cast<NodeId>(g.nodes.size());
                for (int s = 0; s < t.n_slots; ++s)
                    push_node(RrKind::Opin, x, y, s);
                t.ipin_base = static_cast<NodeId>(g.nodes.size());
                for (int p = 0; p < t.n_ipins; ++p)
                    push_node(RrKind::Ipin, x, y, p);
                t.sink_base = static_cast<NodeId>(g.nodes.size());
                for (int p = 0; p < t.n_ipins; ++p)
                    push_node(RrKind::Sink, x, y, p);
                break;
            }
            case TileKind::TraceBuffer: {
                t.n_tb_pins = static_cast<int16_t>(arch.tb_inputs_per_block + 1);
                t.tb_base = static_cast<NodeId>(g.nodes.size());
                for (int p = 0; p < t.n_tb_pins; ++p)
                    push_node(RrKind::TbIpin, x, y, p);
                break;
            }
            case TileKind::Io: {
                // pads_per_io = bles_per_clb; each pad can host one INPUT or
                // one OUTPUT block (SOURCE/OPIN for input pads, IPIN/SINK for
                // output pads)
                t.n_slots = static_cast<int16_t>(arch.bles_per_clb);
                t.n_ipins = t.n_slots;
                t.source_base = static_cast<NodeId>(g.nodes.size());
                for (int s = 0; s < t.n_slots; ++s)
                    push_node(RrKind::Source, x, y, s);
                t.opin_base = static_cast<NodeId>(g.nodes.size());
                for (int s = 0; s < t.n_slots; ++s)
                    push_node(RrKind::Opin, x, y, s);
                t.ipin_base = static_cast<NodeId>(g.nodes.size());
                for (int p = 0; p < t.n_ipins; ++p)
                    push_node(RrKind::Ipin, x, y, p);
                t.sink_base = static_cast<NodeId>(g.nodes.size());
                for (int p = 0; p < t.n_ipins; ++p)
                    push_node(RrKind::Sink, x, y, p);
                break;
            }
            case TileKind::Empty:
                break;
            }
        }
    }

    // Channel nodes: length-1 bidirectional segments, one node per (x, y, track).
    g.chanx_base = static_cast<NodeId>(g.nodes.size());
    for (int y = 0; y <= height; ++y)
        for (int x = 1; x <= width; ++x)
            for (int tck = 0; tck < W; ++tck)
                push_node(RrKind::ChanX, x, y, tck);
    g.chany_base = static_cast<NodeId>(g.nodes.size());
    for (int y = 1; y <= height; ++y)
        for (int x = 0; x <= width; ++x)
            for (int tck = 0; tck < W; ++tck)
                push_node(RrKind::ChanY, x, y, tck);

    EdgeAcc acc;

    // Channel segments adjacent to a fabric tile (x, y).
    struct AdjChan
    {
        bool horizontal;
        int x, y;
    };
    auto fabric_adjacent = [&](int x, int y) {
        return std::vector<AdjChan>{
            {true, x, y},      // above
            {true, x, y - 1},  // below
            {false, x - 1, y}, // left
            {false, x, y},     // right
        };
    };
    auto chan_node = [&](const AdjChan &c, int tck) {
        return c.horizontal ? g.chanx_node(c.x, c.y, tck) : g.chany_node(c.x, c.y, tck);
    };

    for (int y = 0; y <= height + 1; ++y) {
        for (int x = 0; x <= width + 1; ++x) {
            TileKind kind = grid.tile_at(x, y);
            const TileNodes &t = g.tiles[g.tile_index(x, y)];
            if (kind == TileKind::Clb) {
                for (int s = 0; s < t.n_slots; ++s)
                    acc.add(t.source_base + s, t.opin_base + s);
                for (int p = 0; p < t.n_ipins; ++p)
                    acc.add(t.ipin_base + p, t.sink_base + p);
                auto chans = fabric_adjacent(x, y);
                for (int s = 0; s < t.n_slots; ++s)
                    for (const auto &c : chans)
                        for (int tck : fc_tracks(arch.fc_out, W, x * 7 + y * 13 + s * 3))
                            acc.add(t.opin_base + s, chan_node(c, tck));
                for (int p = 0; p < t.n_ipins; ++p)
                    for (const auto &c : chans)
                        for (int tck : fc_tracks(arch.fc_in, W, x * 7 + y * 13 + (p + 1) * 5))
                            acc.add(chan_node(c, tck), t.ipin_base + p);
            } else if (kind == TileKind::TraceBuffer) {
                // trace inputs tap the two adjacent horizontal channels
                AdjChan above{true, x, y}, below{true, x, y - 1};
                for (int p = 0; p < t.n_tb_pins; ++p)
                    for (const auto &c : {above, below})
                        for (int tck : fc_tracks(arch.tb_fc, W, x * 7 + y * 13 + p * 5))
                            acc.add(chan_node(c, tck), t.tb_base + p);
            } else if (kind == TileKind::Io) {
                for (int s = 0; s < t.n_slots; ++s)
                    acc.add(t.source_base + s, t.opin_base + s);
                for (int p = 0; p < t.n_ipins; ++p)
                    acc.add(t.ipin_base + p, t.sink_base + p);
                AdjChan c{true, x, y};
                if (y == 0)
                    c = {true, x, 0};
                else if (y == height + 1)
                    c = {true, x, height};
                else if (x == 0)
                    c = {false, 0, y};
                else
                    c = {false, width, y};
                for (int s = 0; s < t.n_slots; ++s)
                    for (int tck : fc_tracks(arch.fc_out, W, x * 7 + y * 13 + s * 3))
                        acc.add(t.opin_base + s, chan_node(c, tck));
                for (int p = 0; p < t.n_ipins; ++p)
                    for (int tck : fc_tracks(arch.fc_in, W, x * 7 + y * 13 + (p + 1) * 5))
                        acc.add(chan_node(c, tck), t.ipin_base + p);
            }
        }
    }

    // Disjoint switch blocks: at every channel junction, connect all present
    // segments pairwise at equal track index.
    for (int y = 0; y <= height; ++y) {
        for (int x = 0; x <= width; ++x) {
            for (int tck = 0; tck < W; ++tck) {
                std::vector<NodeId> seg;
                if (x >= 1)
                    seg.push_back(g.chanx_node(x, y, tck)); // west
                if (x + 1 <= width)
                    seg.push_back(g.chanx_node(x + 1, y, tck)); // east
                if (y >= 1)
                    seg.push_back(g.chany_node(x, y, tck)); // south
                if (y + 1 <= height)
                    seg.push_back(g.chany_node(x, y + 1, tck)); // north
                for (size_t i = 0; i < seg.size(); ++i)
                    for (size_t j = i + 1; j < seg.size(); ++j)
                        acc.add_bidir(seg[i], seg[j]);
            }
        }
    }

    // CSR, stable with respect to the emit order above.
    const int n = g.node_count();
    g.out_begin.assign(n + 1, 0);
    g.in_begin.assign(n + 1, 0);
    for (const auto &[from, to] : acc.list) {
        ++g.out_begin[from + 1];
        ++g.in_begin[to + 1];
    }
    for (int i = 0; i < n; ++i) {
        g.out_begin[i + 1] += g.out_begin[i];
        g.in_begin[i + 1] += g.in_begin[i];
    }
    g.out_edges.resize(acc.list.size());
    g.in_edges.resize(acc.list.size());
    std::vector<int32_t> ocur(g.out_begin.begin(), g.out_begin.end() - 1);
    std::vector<int32_t> icur(g.in_begin.begin(), g.in_begin.end() - 1);
    for (const auto &[from, to] : acc.list) {
        g.out_edges[ocur[from]++] = to;
        g.in_edges[icur[to]++] = from;
    }
    return g;
}

nlohmann::json rrg_to_json(const RoutingResourceGraph &g)
{
    nlohmann::json nodes = nlohmann::json::array();
    for (const RrNode &n : g.nodes)
        nodes.push_back({rr_kind_name(n.kind), n.x, n.y, n.index, n.capacity});
    nlohmann::json edges = nlohmann::json::array();
    for (NodeId from = 0; from < g.node_count(); ++from)
        for (NodeId to : g.fan_out(from))
            edges.push_back({from, to});
    return nlohmann::json{{"nodes", nodes}, {"edges", edges}};
}

size_t ResourceMask::count(Occupancy o) const
{
    size_t n = 0;
    for (Occupancy s : state)
        if (s == o)
            ++n;
    return n;
}

ResourceMask spare_mask(const RoutingResourceGraph &rrg, const Routing &user_routing)
{
    ResourceMask mask(rrg.nodes.size());
    for (const RouteTree &tree : user_routing.nets)
        for (const RouteTreeNode &entry : tree.nodes)
            mask.set(entry.node, Occupancy::User);
    return mask;
}

} // namespace ovdbg
