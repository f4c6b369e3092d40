#include "ovdbg/trigger_overlay.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "ovdbg/debug_config.hpp"
#include "ovdbg/rng.hpp"

namespace ovdbg {

const char *conn_kind_name(ConnKind k)
{
    switch (k) {
    case ConnKind::Intra: return "INTRA";
    case ConnKind::Link: return "LINK";
    case ConnKind::Indirect: return "INDIRECT";
    case ConnKind::Blocked: return "BLOCKED";
    }
    return "?";
}

int OverlayFabric::cell_at(int x, int y) const
{
    for (size_t i = 0; i < cells.size(); ++i)
        if (cells[i].x == x && cells[i].y == y)
            return static_cast<int>(i);
    return -1;
}

std::vector<NodeId> OverlayFabric::claimed_nodes() const
{
    std::vector<NodeId> out;
    for (const OverlayLink &l : links)
        out.insert(out.end(), l.path.begin(), l.path.end());
    return out;
}

void OverlayFabric::rebuild_indexes()
{
    links_from.assign(cells.size(), {});
    links_into.assign(cells.size(), {});
    for (size_t i = 0; i < links.size(); ++i) {
        links_from[links[i].src_cell].push_back(static_cast<int>(i));
        links_into[links[i].dst_cell].push_back(static_cast<int>(i));
    }
}

namespace {

// Shortest free path between two pins over channel nodes, avoiding nodes in
// `taken`. Returns the full node path including both endpoints.
std::vector<NodeId> route_free_path(const RoutingResourceGraph &g, const ResourceMask &mask,
                                    const std::unordered_set<NodeId> &taken, NodeId from_pin,
                                    const std::set<NodeId> &to_pins)
{
    std::vector<double> cost(g.node_count(), std::numeric_limits<double>::infinity());
    std::vector<NodeId> prev(g.node_count(), kNoNode);
    using Entry = std::pair<double, NodeId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
    cost[from_pin] = 0;
    pq.push({0, from_pin});
    NodeId found = kNoNode;
    while (!pq.empty()) {
        auto [c, u] = pq.top();
        pq.pop();
        if (c > cost[u])
            continue;
        if (to_pins.count(u)) {
            found = u;
            break;
        }
        for (NodeId v : g.fan_out(u)) {
            RrKind k = g.nodes[v].kind;
            bool target = to_pins.count(v) > 0;
            if (!target && k != RrKind::ChanX && k != RrKind::ChanY)
                continue;
            if (!mask.is_free(v) || taken.count(v))
                continue;
            double nc = c + 1.0;
            if (nc < cost[v]) {
                cost[v] = nc;
                prev[v] = u;
                pq.push({nc, v});
            }
        }
    }
    if (found == kNoNode)
        return {};
    std::vector<NodeId> path;
    for (NodeId v = found; v != kNoNode; v = prev[v])
        path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

} // namespace

OverlayFabric build_trigger_fabric(const RoutingResourceGraph &rrg, const ResourceMask &mask,
                                   const Netlist &netlist, const Placement &placement,
                                   int link_budget, uint64_t /*seed*/)
{
    OverlayFabric fabric;
    const DeviceGrid &grid = rrg.grid;

    std::set<std::tuple<int, int, int>> occupied;
    for (size_t b = 0; b < netlist.blocks.size(); ++b) {
        const SlotRef &s = placement.block_slot[b];
        if (s.valid() && s.kind == SlotKind::Ble)
            occupied.insert({s.x, s.y, s.slot});
    }

    for (int y = 1; y <= grid.height; ++y) {
        for (int x = 1; x <= grid.width; ++x) {
            if (grid.tile_at(x, y) != TileKind::Clb)
                continue;
            OverlayCell cell;
            cell.x = x;
            cell.y = y;
            for (int s = 0; s < rrg.arch.bles_per_clb; ++s)
                if (!occupied.count({x, y, s}))
                    cell.spare_slots.push_back(s);
            if (cell.spare_slots.empty())
                continue;
            for (int p = 0; p < rrg.arch.clb_inputs; ++p)
                if (mask.is_free(rrg.ipin_node(x, y, p)))
                    cell.free_ipins.push_back(p);
            for (int s : cell.spare_slots) {
                for (NodeId v : rrg.fan_out(rrg.opin_node(x, y, s))) {
                    if (mask.is_free(v)) {
                        cell.out_ok_slots.push_back(s);
                        break;
                    }
                }
            }
            fabric.cells.push_back(std::move(cell));
        }
    }

    // Greedy nearest-neighbor pre-routed links.
    std::unordered_set<NodeId> taken;
    const int n_cells = static_cast<int>(fabric.cells.size());
    fabric.links_from.assign(n_cells, {});
    fabric.links_into.assign(n_cells, {});
    for (int a = 0; a < n_cells; ++a) {
        OverlayCell &ca = fabric.cells[a];
        if (ca.out_ok_slots.empty())
            continue;
        std::vector<int> partners;
        for (int b = 0; b < n_cells; ++b)
            if (b != a)
                partners.push_back(b);
        std::sort(partners.begin(), partners.end(), [&](int l, int r) {
            int dl = std::abs(fabric.cells[l].x - ca.x) + std::abs(fabric.cells[l].y - ca.y);
            int dr = std::abs(fabric.cells[r].x - ca.x) + std::abs(fabric.cells[r].y - ca.y);
            return dl != dr ? dl < dr : l < r;
        });
        // one link per source slot keeps link paths node-disjoint at the OPIN
        const int max_links = std::min<int>(link_budget, ca.out_ok_slots.size());
        int built = 0;
        int attempts = 0;
        for (int b : partners) {
            if (built >= max_links || attempts >= 4 * link_budget)
                break;
            OverlayCell &cb = fabric.cells[b];
            if (cb.free_ipins.empty())
                continue;
            bool dup = false;
            for (int l : fabric.links_from[a])
                if (fabric.links[l].dst_cell == b)
                    dup = true;
            if (dup)
                continue;
            ++attempts;
            int src_slot = ca.out_ok_slots[built];
            NodeId opin = rrg.opin_node(ca.x, ca.y, src_slot);
            int dst_ipin = cb.free_ipins.front();
            NodeId ipin = rrg.ipin_node(cb.x, cb.y, dst_ipin);
            std::vector<NodeId> path = route_free_path(rrg, mask, taken, opin, {ipin});
            if (path.empty())
                continue;
            for (NodeId v : path)
                taken.insert(v);
            cb.free_ipins.erase(cb.free_ipins.begin());
            OverlayLink link{a, src_slot, b, dst_ipin, std::move(path)};
            fabric.links.push_back(std::move(link));
            fabric.links_from[a].push_back(static_cast<int>(fabric.links.size() - 1));
            fabric.links_into[b].push_back(static_cast<int>(fabric.links.size() - 1));
            ++built;
        }
    }
    return fabric;
}

void apply_fabric_to_mask(const OverlayFabric &fabric, ResourceMask &mask)
{
    for (const OverlayLink &l : fabric.links)
        for (NodeId v : l.path)
            mask.set(v, Occupancy::OverlayTrigger);
}

std::vector<std::string> verify_fabric(const RoutingResourceGraph &rrg, const ResourceMask &mask,
                                       const Netlist &netlist, const Placement &placement,
                                       const OverlayFabric &fabric)
{
    std::vector<std::string> issues;
    std::set<std::tuple<int, int, int>> occupied;
    for (size_t b = 0; b < netlist.blocks.size(); ++b) {
        const SlotRef &s = placement.block_slot[b];
        if (s.valid() && s.kind == SlotKind::Ble)
            occupied.insert({s.x, s.y, s.slot});
    }
    for (size_t c = 0; c < fabric.cells.size(); ++c) {
        const OverlayCell &cell = fabric.cells[c];
        std::string tag = "cell " + std::to_string(c);
        if (rrg.grid.tile_at(cell.x, cell.y) != TileKind::Clb)
            issues.push_back(tag + ": not on a CLB tile");
        for (int s : cell.spare_slots)
            if (occupied.count({cell.x, cell.y, s}))
                issues.push_back(tag + ": slot " + std::to_string(s) + " hosts a user block");
        if (static_cast<int>(cell.free_ipins.size()) > rrg.arch.clb_inputs)
            issues.push_back(tag + ": more free input pins than physical pins");
        for (int p : cell.free_ipins)
            if (!mask.is_free(rrg.ipin_node(cell.x, cell.y, p)))
                issues.push_back(tag + ": input pin " + std::to_string(p) + " is not spare");
    }
    std::unordered_map<NodeId, int> seen;
    for (size_t l = 0; l < fabric.links.size(); ++l) {
        const OverlayLink &link = fabric.links[l];
        std::string tag = "link " + std::to_string(l);
        if (link.src_cell < 0 || link.src_cell >= static_cast<int>(fabric.cells.size()) ||
            link.dst_cell < 0 || link.dst_cell >= static_cast<int>(fabric.cells.size())) {
            issues.push_back(tag + ": cell index out of range");
            continue;
        }
        const OverlayCell &src = fabric.cells[link.src_cell];
        const OverlayCell &dst = fabric.cells[link.dst_cell];
        if (link.path.size() < 2) {
            issues.push_back(tag + ": path too short");
            continue;
        }
        if (link.path.front() != rrg.opin_node(src.x, src.y, link.src_slot))
            issues.push_back(tag + ": path does not start at the source OPIN");
        if (link.path.back() != rrg.ipin_node(dst.x, dst.y, link.dst_ipin))
            issues.push_back(tag + ": path does not end at the reserved IPIN");
        if (std::find(src.spare_slots.begin(), src.spare_slots.end(), link.src_slot) ==
            src.spare_slots.end())
            issues.push_back(tag + ": source slot is not spare");
        for (size_t i = 0; i + 1 < link.path.size(); ++i)
            if (!rrg.has_edge(link.path[i], link.path[i + 1]))
                issues.push_back(tag + ": missing RRG edge " + std::to_string(link.path[i]) +
                                 "->" + std::to_string(link.path[i + 1]));
        for (NodeId v : link.path) {
            Occupancy occ = mask.at(v);
            if (occ == Occupancy::User || occ == Occupancy::OverlayTrace)
                issues.push_back(tag + ": node " + std::to_string(v) +
                                 " collides with user or trace overlay");
            auto [it, fresh] = seen.try_emplace(v, static_cast<int>(l));
            if (!fresh)
                issues.push_back(tag + ": node " + std::to_string(v) + " shared with link " +
                                 std::to_string(it->second));
        }
    }
    return issues;
}

namespace {

// Internal trigger connections in deterministic (net, sink) order.
struct InternalConn
{
    int net, driver, sink;
};

std::vector<InternalConn> internal_conns(const TriggerNetlist &trig)
{
    std::vector<InternalConn> out;
    const Netlist &n = trig.netlist;
    for (size_t net = 0; net < n.nets.size(); ++net) {
        const Block &drv = n.blocks[n.nets[net].driver];
        if (drv.kind != BlockKind::Lut && drv.kind != BlockKind::Ff)
            continue;
        std::vector<int> sinks;
        for (const NetSink &s : n.nets[net].sinks) {
            BlockKind k = n.blocks[s.block].kind;
            if (k == BlockKind::Lut || k == BlockKind::Ff)
                sinks.push_back(s.block);
        }
        std::sort(sinks.begin(), sinks.end());
        sinks.erase(std::unique(sinks.begin(), sinks.end()), sinks.end());
        for (int s : sinks)
            out.push_back({static_cast<int>(net), n.nets[net].driver, s});
    }
    return out;
}

// Tap connections: (net driven by an INPUT block, consuming LE).
struct TapConn
{
    int net, sink;
};

std::vector<TapConn> tap_conns(const TriggerNetlist &trig)
{
    std::vector<TapConn> out;
    const Netlist &n = trig.netlist;
    for (size_t net = 0; net < n.nets.size(); ++net) {
        if (n.blocks[n.nets[net].driver].kind != BlockKind::Input)
            continue;
        for (const NetSink &s : n.nets[net].sinks) {
            BlockKind k = n.blocks[s.block].kind;
            if (k == BlockKind::Lut || k == BlockKind::Ff)
                out.push_back({static_cast<int>(net), s.block});
        }
    }
    return out;
}

int output_root_le(const TriggerNetlist &trig)
{
    const Netlist &n = trig.netlist;
    int fire = n.find_net(trig.fire_signal);
    return fire < 0 ? -1 : n.nets[fire].driver;
}

struct EvalResult
{
    double cost = 0;
    std::vector<ConnRealization> conns;
    std::vector<std::string> blocked; // block names with gamma_blocked terms
    // (cell, tap net) -> allocated feed pin index
    std::map<std::pair<int, int>, int> feed_pins;
    bool root_ok = true;
};

class Evaluator
{
  public:
    Evaluator(const OverlayFabric &fabric, const TriggerNetlist &trig, const SAParams &params)
        : fabric_(fabric), trig_(trig), params_(params), conns_(internal_conns(trig)),
          taps_(tap_conns(trig)), root_le_(output_root_le(trig))
    {
    }

    const std::vector<InternalConn> &conns() const { return conns_; }
    const std::vector<TapConn> &taps() const { return taps_; }
    int root_le() const { return root_le_; }

    EvalResult evaluate(const std::map<int, std::pair<int, int>> &le_slot) const
    {
        EvalResult r;
        std::set<std::pair<int, int>> occupied;
        for (const auto &[le, cs] : le_slot)
            occupied.insert(cs);

        std::unordered_map<int, int> link_net;             // link id -> net
        std::map<std::pair<int, int>, int> rt_net;         // (cell, slot) -> net

        for (const InternalConn &c : conns_) {
            ConnRealization real;
            real.net = c.net;
            real.driver_le = c.driver;
            real.sink_le = c.sink;
            auto [ca, sa] = le_slot.at(c.driver);
            auto [cb, sb] = le_slot.at(c.sink);
            if (ca == cb) {
                real.kind = ConnKind::Intra;
                real.cost = 0;
            } else if (!search_chain(c.net, ca, sa, cb, occupied, link_net, rt_net, real)) {
                real.kind = ConnKind::Blocked;
                real.cost = params_.gamma_blocked;
                r.blocked.push_back(trig_.netlist.blocks[c.driver].name);
                r.blocked.push_back(trig_.netlist.blocks[c.sink].name);
            }
            r.cost += real.cost;
            r.conns.push_back(std::move(real));
        }

        // debug-time input feeds need spare input pins at the consuming cells
        std::map<int, std::vector<int>> cell_taps; // cell -> tap nets (sorted unique)
        for (const TapConn &t : taps_) {
            int cell = le_slot.at(t.sink).first;
            auto &v = cell_taps[cell];
            if (std::find(v.begin(), v.end(), t.net) == v.end())
                v.push_back(t.net);
        }
        std::set<int> starved_cells;
        for (auto &[cell, nets] : cell_taps) {
            std::sort(nets.begin(), nets.end());
            int capacity = static_cast<int>(fabric_.cells[cell].free_ipins.size());
            for (size_t i = 0; i < nets.size(); ++i) {
                if (static_cast<int>(i) < capacity)
                    r.feed_pins[{cell, nets[i]}] = fabric_.cells[cell].free_ipins[i];
                else
                    starved_cells.insert(cell);
            }
        }
        for (const TapConn &t : taps_) {
            int cell = le_slot.at(t.sink).first;
            if (!r.feed_pins.count({cell, t.net})) {
                r.cost += params_.gamma_blocked;
                r.blocked.push_back(trig_.netlist.blocks[t.sink].name);
            }
        }

        // the fire signal must escape the root LE's cell
        if (root_le_ >= 0) {
            auto [cell, slot] = le_slot.at(root_le_);
            const auto &ok = fabric_.cells[cell].out_ok_slots;
            if (std::find(ok.begin(), ok.end(), slot) == ok.end()) {
                r.cost += params_.gamma_blocked;
                r.root_ok = false;
                r.blocked.push_back(trig_.netlist.blocks[root_le_].name);
            }
        }

        std::sort(r.blocked.begin(), r.blocked.end());
        r.blocked.erase(std::unique(r.blocked.begin(), r.blocked.end()), r.blocked.end());
        return r;
    }

    // Optimistic per-connection cost that ignores link/route-through claims;
    // used as the SA move guide on larger triggers.
    double proxy_conn_cost(int net, int ca, int sa, int cb,
                           const std::set<std::pair<int, int>> &occupied) const
    {
        if (ca == cb)
            return 0;
        std::unordered_map<int, int> no_links;
        std::map<std::pair<int, int>, int> no_rts;
        ConnRealization scratch;
        scratch.net = net;
        if (search_chain(net, ca, sa, cb, occupied, no_links, no_rts, scratch))
            return scratch.cost;
        return params_.gamma_blocked;
    }

  private:
    // BFS over pre-routed links with route-throughs, depth-limited. Claims
    // links and route-throughs in `link_net` / `rt_net` when a path is found.
    bool search_chain(int net, int src_cell, int src_slot, int dst_cell,
                      const std::set<std::pair<int, int>> &occupied,
                      std::unordered_map<int, int> &link_net,
                      std::map<std::pair<int, int>, int> &rt_net, ConnRealization &real) const
    {
        struct State
        {
            int cell;
            int slot; // -1 once past the first hop (signal on the crossbar)
            std::vector<int> links;
            std::vector<std::pair<int, int>> rts;
        };
        std::deque<State> queue;
        queue.push_back({src_cell, src_slot, {}, {}});
        std::set<int> visited{src_cell};
        constexpr int kMaxHops = 3;

        while (!queue.empty()) {
            State st = queue.front();
            queue.pop_front();
            if (static_cast<int>(st.links.size()) >= kMaxHops)
                continue;
            for (int l : fabric_.links_from[st.cell]) {
                const OverlayLink &link = fabric_.links[l];
                auto ln = link_net.find(l);
                if (ln != link_net.end() && ln->second != net)
                    continue; // carries another net
                std::vector<std::pair<int, int>> rts = st.rts;
                if (link.src_slot != st.slot) {
                    // needs a route-through LE at the link's source slot
                    std::pair<int, int> rt{st.cell, link.src_slot};
                    const auto &spare = fabric_.cells[st.cell].spare_slots;
                    if (std::find(spare.begin(), spare.end(), link.src_slot) == spare.end())
                        continue;
                    if (occupied.count(rt))
                        continue;
                    auto rn = rt_net.find(rt);
                    if (rn != rt_net.end() && rn->second != net)
                        continue;
                    rts.push_back(rt);
                }
                std::vector<int> links = st.links;
                links.push_back(l);
                if (link.dst_cell == dst_cell) {
                    for (int used : links)
                        link_net[used] = net;
                    for (const auto &rt : rts)
                        rt_net[rt] = net;
                    real.link_ids = links;
                    real.route_throughs = rts;
                    if (links.size() == 1 && rts.empty()) {
                        real.kind = ConnKind::Link;
                        real.cost = 1;
                    } else {
                        real.kind = ConnKind::Indirect;
                        real.cost = params_.gamma_indirect;
                    }
                    return true;
                }
                if (!visited.count(link.dst_cell)) {
                    visited.insert(link.dst_cell);
                    queue.push_back({link.dst_cell, -1, std::move(links), std::move(rts)});
                }
            }
        }
        return false;
    }

    const OverlayFabric &fabric_;
    const TriggerNetlist &trig_;
    SAParams params_;
    std::vector<InternalConn> conns_;
    std::vector<TapConn> taps_;
    int root_le_;
};

} // namespace

double evaluate_trigger_placement(const OverlayFabric &fabric, const TriggerNetlist &trig,
                                  const std::map<int, std::pair<int, int>> &le_slot,
                                  const SAParams &params, std::vector<ConnRealization> *out_conns)
{
    Evaluator ev(fabric, trig, params);
    EvalResult r = ev.evaluate(le_slot);
    if (out_conns)
        *out_conns = std::move(r.conns);
    return r.cost;
}

namespace {

class TriggerAnnealer
{
  public:
    TriggerAnnealer(const OverlayFabric &fabric, const TriggerNetlist &trig,
                    const SAParams &params)
        : fabric_(fabric), trig_(trig), params_(params), ev_(fabric, trig, params),
          rng_(params.seed)
    {
        for (size_t b = 0; b < trig.netlist.blocks.size(); ++b) {
            BlockKind k = trig.netlist.blocks[b].kind;
            if (k == BlockKind::Lut || k == BlockKind::Ff)
                les_.push_back(static_cast<int>(b));
        }
        for (size_t c = 0; c < fabric.cells.size(); ++c)
            for (int s : fabric.cells[c].spare_slots)
                all_slots_.push_back({static_cast<int>(c), s});
        if (les_.size() > all_slots_.size())
            throw CapacityError("trigger needs " + std::to_string(les_.size()) +
                                " spare LEs, fabric has " + std::to_string(all_slots_.size()));
        // exact mode: small enough to evaluate the real cost on every move
        exact_ = les_.size() <= 6 && ev_.conns().size() + ev_.taps().size() <= 14;
    }

    TriggerMapping run()
    {
        TriggerMapping m;
        init_random();

        double cost = move_cost();
        EvalResult full = ev_.evaluate(le_slot_);
        double best_full = full.cost;
        auto best_place = le_slot_;
        m.checkpoints.push_back({0, best_full});

        double t = initial_temperature();
        double rlim = std::max(grid_width(), grid_height());
        const int moves_per_t = params_.moves_per_le * static_cast<int>(les_.size());
        int stall = 0;

        for (int temp_no = 1; temp_no <= params_.max_temperatures; ++temp_no) {
            int accepted = 0;
            for (int mv = 0; mv < moves_per_t; ++mv) {
                double delta = propose(t, rlim);
                if (!std::isnan(delta)) {
                    cost += delta;
                    ++accepted;
                }
            }
            double frac = static_cast<double>(accepted) / moves_per_t;
            rlim = std::clamp(rlim * (1.0 - 0.44 + frac), 1.0,
                              static_cast<double>(std::max(grid_width(), grid_height())));
            t *= params_.cooling;

            double now_full = exact_ ? cost : ev_.evaluate(le_slot_).cost;
            if (now_full < best_full) {
                best_full = now_full;
                best_place = le_slot_;
                stall = 0;
            } else {
                ++stall;
            }
            m.checkpoints.push_back({temp_no, best_full});
            size_t n_conns = std::max<size_t>(1, ev_.conns().size());
            if (t < params_.exit_t_factor * (cost + 1.0) / n_conns ||
                stall >= params_.stall_temperatures)
                break;
        }

        m.le_slot = best_place;
        EvalResult final = ev_.evaluate(best_place);
        m.conns = std::move(final.conns);
        m.cost = final.cost;
        m.feasible = final.blocked.empty();
        m.blocked_les = std::move(final.blocked);
        return m;
    }

  private:
    int grid_width() const
    {
        int w = 1;
        for (const OverlayCell &c : fabric_.cells)
            w = std::max(w, c.x);
        return w;
    }
    int grid_height() const
    {
        int h = 1;
        for (const OverlayCell &c : fabric_.cells)
            h = std::max(h, c.y);
        return h;
    }

    void init_random()
    {
        std::vector<int> order(all_slots_.size());
        for (size_t i = 0; i < order.size(); ++i)
            order[i] = static_cast<int>(i);
        rng_.shuffle(order);
        le_slot_.clear();
        occupied_.clear();
        for (size_t i = 0; i < les_.size(); ++i) {
            le_slot_[les_[i]] = all_slots_[order[i]];
            occupied_.insert(all_slots_[order[i]]);
        }
        rebuild_proxy();
    }

    void rebuild_proxy()
    {
        proxy_conn_.assign(ev_.conns().size(), 0.0);
        for (size_t i = 0; i < ev_.conns().size(); ++i)
            proxy_conn_[i] = conn_cost(ev_.conns()[i]);
    }

    double conn_cost(const InternalConn &c) const
    {
        auto [ca, sa] = le_slot_.at(c.driver);
        auto [cb, sb] = le_slot_.at(c.sink);
        return ev_.proxy_conn_cost(c.net, ca, sa, cb, occupied_);
    }

    double tap_pressure() const
    {
        std::map<int, std::set<int>> cell_taps;
        for (const TapConn &t : ev_.taps())
            cell_taps[le_slot_.at(t.sink).first].insert(t.net);
        double cost = 0;
        for (const auto &[cell, nets] : cell_taps) {
            int cap = static_cast<int>(fabric_.cells[cell].free_ipins.size());
            if (static_cast<int>(nets.size()) > cap)
                cost += params_.gamma_blocked * (static_cast<int>(nets.size()) - cap);
        }
        return cost;
    }

    double root_term() const
    {
        if (ev_.root_le() < 0)
            return 0;
        auto [cell, slot] = le_slot_.at(ev_.root_le());
        const auto &ok = fabric_.cells[cell].out_ok_slots;
        return std::find(ok.begin(), ok.end(), slot) != ok.end() ? 0 : params_.gamma_blocked;
    }

    double move_cost()
    {
        if (exact_)
            return ev_.evaluate(le_slot_).cost;
        double c = tap_pressure() + root_term();
        for (size_t i = 0; i < ev_.conns().size(); ++i)
            c += proxy_conn_[i];
        return c;
    }

    double initial_temperature()
    {
        double sum = 0, sum2 = 0;
        int n = 0;
        const int samples = 64;
        for (int i = 0; i < samples; ++i) {
            double delta = propose(-1, std::max(grid_width(), grid_height()), true);
            if (std::isnan(delta))
                continue;
            sum += delta;
            sum2 += delta * delta;
            ++n;
        }
        if (n < 2)
            return 1.0;
        double var = (sum2 - sum * sum / n) / (n - 1);
        return var > 0 ? 20.0 * std::sqrt(var) : 1.0;
    }

    // One SA move; returns delta or NaN when rejected.
    double propose(double t, double rlim, bool measure_only = false)
    {
        int le = les_[rng_.next_below(les_.size())];
        auto from = le_slot_.at(le);
        bool do_swap = rng_.next_bool() && les_.size() >= 2;

        int le2 = -1;
        std::pair<int, int> to;
        if (do_swap) {
            le2 = les_[rng_.next_below(les_.size())];
            if (le2 == le)
                return nan_();
            to = le_slot_.at(le2);
        } else {
            int r = std::max(1, static_cast<int>(rlim));
            const OverlayCell &cf = fabric_.cells[from.first];
            bool found = false;
            for (int tries = 0; tries < 12 && !found; ++tries) {
                to = all_slots_[rng_.next_below(all_slots_.size())];
                const OverlayCell &ct = fabric_.cells[to.first];
                if (std::abs(ct.x - cf.x) > r || std::abs(ct.y - cf.y) > r)
                    continue;
                if (occupied_.count(to))
                    continue;
                found = true;
            }
            if (!found)
                return nan_();
        }

        double before, after;
        if (exact_) {
            before = ev_.evaluate(le_slot_).cost;
            apply(le, le2, from, to);
            after = ev_.evaluate(le_slot_).cost;
        } else {
            std::vector<size_t> touched;
            for (size_t i = 0; i < ev_.conns().size(); ++i) {
                const InternalConn &c = ev_.conns()[i];
                if (c.driver == le || c.sink == le || c.driver == le2 || c.sink == le2)
                    touched.push_back(i);
            }
            before = tap_pressure() + root_term();
            for (size_t i : touched)
                before += proxy_conn_[i];
            apply(le, le2, from, to);
            after = tap_pressure() + root_term();
            touched_costs_.clear();
            for (size_t i : touched) {
                double c = conn_cost(ev_.conns()[i]);
                touched_costs_.push_back({i, c});
                after += c;
            }
        }

        double delta = after - before;
        bool accept = !measure_only &&
                      (delta <= 0 || (t > 0 && rng_.next_double() < std::exp(-delta / t)));
        if (!accept) {
            apply(le, le2, to, from); // undo
            return measure_only ? delta : nan_();
        }
        if (!exact_)
            for (auto &[i, c] : touched_costs_)
                proxy_conn_[i] = c;
        return delta;
    }

    void apply(int le, int le2, const std::pair<int, int> &from, const std::pair<int, int> &to)
    {
        le_slot_[le] = to;
        occupied_.erase(from);
        if (le2 >= 0) {
            le_slot_[le2] = from;
            occupied_.insert(from);
        }
        occupied_.insert(to);
    }

    static double nan_() { return std::numeric_limits<double>::quiet_NaN(); }

    const OverlayFabric &fabric_;
    const TriggerNetlist &trig_;
    SAParams params_;
    Evaluator ev_;
    Rng rng_;
    bool exact_ = false;
    std::vector<int> les_;
    std::vector<std::pair<int, int>> all_slots_;
    std::map<int, std::pair<int, int>> le_slot_;
    std::set<std::pair<int, int>> occupied_;
    std::vector<double> proxy_conn_;
    std::vector<std::pair<size_t, double>> touched_costs_;
};

} // namespace

TriggerMapping anneal_trigger(const OverlayFabric &fabric, const TriggerNetlist &trig,
                              const SAParams &params)
{
    TriggerAnnealer annealer(fabric, trig, params);
    return annealer.run();
}

TriggerMapping map_trigger(const RoutingResourceGraph &rrg, const ResourceMask &mask,
                           const OverlayFabric &fabric, const TriggerNetlist &trig,
                           const std::map<std::string, NodeId> &signal_opins,
                           const SAParams &params)
{
    auto t0 = std::chrono::steady_clock::now();
    for (const std::string &tap : trig.taps)
        if (!signal_opins.count(tap))
            throw UnknownSignalError(tap);
    for (const Block &b : trig.netlist.blocks)
        if (b.kind == BlockKind::Lut &&
            static_cast<int>(b.inputs.size()) > rrg.arch.lut_size_k)
            throw CapacityError("trigger LUT '" + b.name + "' fan-in exceeds lut_size_k");

    TriggerMapping m = anneal_trigger(fabric, trig, params);

    if (m.feasible) {
        Evaluator ev(fabric, trig, params);
        EvalResult final = ev.evaluate(m.le_slot);

        std::unordered_set<NodeId> taken;
        for (const OverlayLink &l : fabric.links)
            for (NodeId v : l.path)
                taken.insert(v);

        // input feeds, one per (tap net, consuming cell)
        for (const auto &[key, ipin] : final.feed_pins) {
            auto [cell, net] = key;
            const std::string &tap = trig.netlist.nets[net].name;
            const OverlayCell &c = fabric.cells[cell];
            FeedRoute feed{tap, cell, ipin, {}, false};
            NodeId opin = signal_opins.at(tap);
            NodeId target = rrg.ipin_node(c.x, c.y, ipin);
            feed.path = route_free_path(rrg, mask, taken, opin, {target});
            feed.ok = !feed.path.empty();
            for (NodeId v : feed.path)
                taken.insert(v);
            m.input_feeds.push_back(std::move(feed));
        }

        // output feed: root LE OPIN to the nearest trigger-control pin
        int root = output_root_le(trig);
        if (root >= 0) {
            auto [cell, slot] = m.le_slot.at(root);
            const OverlayCell &c = fabric.cells[cell];
            std::set<NodeId> controls;
            for (NodeId pin : rrg.trigger_control_pins())
                if (mask.is_free(pin))
                    controls.insert(pin);
            FeedRoute feed{"fire", cell, -1, {}, false};
            if (!controls.empty()) {
                NodeId opin = rrg.opin_node(c.x, c.y, slot);
                feed.path = route_free_path(rrg, mask, taken, opin, controls);
                feed.ok = !feed.path.empty();
            }
            m.output_feed = std::move(feed);
        }
    }
    m.map_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return m;
}

std::vector<std::string> verify_mapping(const RoutingResourceGraph &rrg,
                                        const ResourceMask &mask, const OverlayFabric &fabric,
                                        const TriggerNetlist &trig, const TriggerMapping &mapping)
{
    std::vector<std::string> issues;
    const Netlist &n = trig.netlist;

    // placement shape
    std::set<std::pair<int, int>> le_slots;
    for (const auto &[le, cs] : mapping.le_slot) {
        if (le < 0 || le >= static_cast<int>(n.blocks.size())) {
            issues.push_back("mapping names unknown block id " + std::to_string(le));
            continue;
        }
        const Block &b = n.blocks[le];
        if (b.kind != BlockKind::Lut && b.kind != BlockKind::Ff)
            issues.push_back("block '" + b.name + "' is not an LE");
        if (b.kind == BlockKind::Lut && static_cast<int>(b.inputs.size()) > rrg.arch.lut_size_k)
            issues.push_back("LUT '" + b.name + "' fan-in exceeds lut_size_k");
        if (cs.first < 0 || cs.first >= static_cast<int>(fabric.cells.size())) {
            issues.push_back("block '" + b.name + "' placed on unknown cell");
            continue;
        }
        const OverlayCell &cell = fabric.cells[cs.first];
        if (std::find(cell.spare_slots.begin(), cell.spare_slots.end(), cs.second) ==
            cell.spare_slots.end())
            issues.push_back("block '" + b.name + "' slot is not spare");
        if (!le_slots.insert(cs).second)
            issues.push_back("slot (" + std::to_string(cs.first) + "," +
                             std::to_string(cs.second) + ") hosts two LEs");
    }
    for (const Block &b : n.blocks)
        if ((b.kind == BlockKind::Lut || b.kind == BlockKind::Ff) &&
            !mapping.le_slot.count(static_cast<int>(&b - n.blocks.data())))
            issues.push_back("LE '" + b.name + "' is unplaced");

    // connection traceability with exclusive link/route-through use
    std::map<int, int> link_net;
    std::map<std::pair<int, int>, int> rt_net;
    for (const ConnRealization &c : mapping.conns) {
        std::string tag = "conn " + n.nets[c.net].name + "->" + n.blocks[c.sink_le].name;
        if (!mapping.le_slot.count(c.driver_le) || !mapping.le_slot.count(c.sink_le)) {
            issues.push_back(tag + ": endpoint unplaced");
            continue;
        }
        auto [ca, sa] = mapping.le_slot.at(c.driver_le);
        auto [cb, sb] = mapping.le_slot.at(c.sink_le);
        switch (c.kind) {
        case ConnKind::Intra:
            if (ca != cb)
                issues.push_back(tag + ": INTRA across different cells");
            break;
        case ConnKind::Link:
            if (c.link_ids.size() != 1 || !c.route_throughs.empty())
                issues.push_back(tag + ": LINK must be one hop with no route-throughs");
            [[fallthrough]];
        case ConnKind::Indirect: {
            if (c.kind == ConnKind::Indirect &&
                c.link_ids.size() < 2 && c.route_throughs.empty())
                issues.push_back(tag + ": INDIRECT with a single direct link");
            int cur_cell = ca;
            int cur_slot = sa;
            size_t rt_used = 0;
            for (int l : c.link_ids) {
                if (l < 0 || l >= static_cast<int>(fabric.links.size())) {
                    issues.push_back(tag + ": unknown link " + std::to_string(l));
                    break;
                }
                const OverlayLink &link = fabric.links[l];
                if (link.src_cell != cur_cell) {
                    issues.push_back(tag + ": chain discontinuity at link " + std::to_string(l));
                    break;
                }
                if (link.src_slot != cur_slot) {
                    // must be backed by a route-through at that slot
                    if (rt_used >= c.route_throughs.size() ||
                        c.route_throughs[rt_used] !=
                            std::make_pair(link.src_cell, link.src_slot)) {
                        issues.push_back(tag + ": missing route-through for link " +
                                         std::to_string(l));
                        break;
                    }
                    ++rt_used;
                }
                auto [it, fresh] = link_net.try_emplace(l, c.net);
                if (!fresh && it->second != c.net)
                    issues.push_back(tag + ": link " + std::to_string(l) +
                                     " already carries net " + n.nets[it->second].name);
                cur_cell = link.dst_cell;
                cur_slot = -1;
            }
            if (rt_used != c.route_throughs.size())
                issues.push_back(tag + ": unused route-through entries");
            if (cur_cell != cb)
                issues.push_back(tag + ": chain does not end at the sink cell");
            break;
        }
        case ConnKind::Blocked:
            break;
        }
        for (const auto &rt : c.route_throughs) {
            if (le_slots.count(rt))
                issues.push_back(tag + ": route-through slot hosts a placed LE");
            auto [it, fresh] = rt_net.try_emplace(rt, c.net);
            if (!fresh && it->second != c.net)
                issues.push_back(tag + ": route-through slot reused by another net");
        }
    }

    // feeds: legal paths over spare resources, mutually disjoint, clear of links
    std::unordered_set<NodeId> link_nodes;
    for (const OverlayLink &l : fabric.links)
        for (NodeId v : l.path)
            link_nodes.insert(v);
    std::unordered_set<NodeId> feed_nodes;
    std::set<std::pair<int, int>> feed_pins_used;
    auto check_feed = [&](const FeedRoute &f, bool output) {
        if (!f.ok)
            return;
        std::string tag = std::string(output ? "output feed" : "input feed '") + f.tap +
                          (output ? "" : "'");
        if (f.path.empty()) {
            issues.push_back(tag + ": marked ok with empty path");
            return;
        }
        for (size_t i = 0; i + 1 < f.path.size(); ++i)
            if (!rrg.has_edge(f.path[i], f.path[i + 1]))
                issues.push_back(tag + ": missing RRG edge " + std::to_string(f.path[i]) + "->" +
                                 std::to_string(f.path[i + 1]));
        for (size_t i = 1; i < f.path.size(); ++i) { // the tapped OPIN is exempt
            NodeId v = f.path[i];
            Occupancy occ = mask.at(v);
            if (occ == Occupancy::User || occ == Occupancy::OverlayTrace)
                issues.push_back(tag + ": node " + std::to_string(v) +
                                 " collides with user or trace overlay");
            if (link_nodes.count(v))
                issues.push_back(tag + ": node " + std::to_string(v) + " collides with a link");
            if (!feed_nodes.insert(v).second)
                issues.push_back(tag + ": node " + std::to_string(v) +
                                 " shared with another feed");
        }
        if (!output) {
            if (f.cell < 0 || f.cell >= static_cast<int>(fabric.cells.size())) {
                issues.push_back(tag + ": unknown cell");
                return;
            }
            const OverlayCell &cell = fabric.cells[f.cell];
            if (std::find(cell.free_ipins.begin(), cell.free_ipins.end(), f.ipin) ==
                cell.free_ipins.end())
                issues.push_back(tag + ": pin is not a free input pin");
            if (!feed_pins_used.insert({f.cell, f.ipin}).second)
                issues.push_back(tag + ": pin used twice");
            if (f.path.back() != rrg.ipin_node(cell.x, cell.y, f.ipin))
                issues.push_back(tag + ": path does not end at the allocated pin");
        } else {
            NodeId last = f.path.back();
            if (rrg.nodes[last].kind != RrKind::TbIpin ||
                rrg.nodes[last].index != rrg.arch.tb_inputs_per_block)
                issues.push_back(tag + ": path does not end at a trigger-control pin");
        }
    };
    for (const FeedRoute &f : mapping.input_feeds)
        check_feed(f, false);
    if (mapping.output_feed.cell >= 0)
        check_feed(mapping.output_feed, true);

    // feasibility flag must match the cost structure
    bool any_blocked = false;
    for (const ConnRealization &c : mapping.conns)
        if (c.kind == ConnKind::Blocked)
            any_blocked = true;
    if (mapping.feasible && any_blocked)
        issues.push_back("mapping marked feasible but has blocked connections");
    if (!mapping.feasible && mapping.blocked_les.empty())
        issues.push_back("infeasible mapping does not name its blocked LEs");
    return issues;
}

Netlist merge_trigger(const Netlist &netlist, const TriggerNetlist &trig)
{
    Netlist merged = netlist;
    merged.name = netlist.name + "+trigger";
    const Netlist &t = trig.netlist;

    std::vector<int> net_map(t.nets.size(), -1);
    for (size_t net = 0; net < t.nets.size(); ++net) {
        const Block &drv = t.blocks[t.nets[net].driver];
        if (drv.kind == BlockKind::Input) {
            int user = merged.find_net(t.nets[net].name);
            if (user < 0)
                throw UnknownSignalError(t.nets[net].name);
            net_map[net] = user;
        } else {
            merged.nets.push_back(Net{"trig$" + t.nets[net].name, -1, {}});
            net_map[net] = static_cast<int>(merged.nets.size() - 1);
        }
    }
    for (const Block &b : t.blocks) {
        if (b.kind == BlockKind::Input)
            continue;
        Block nb;
        nb.name = "trig$" + b.name;
        nb.kind = b.kind;
        nb.cubes = b.cubes;
        nb.output = b.output == kNoNet ? kNoNet : net_map[b.output];
        for (int in : b.inputs)
            nb.inputs.push_back(net_map[in]);
        merged.blocks.push_back(std::move(nb));
        int blk = static_cast<int>(merged.blocks.size() - 1);
        const Block &placed = merged.blocks[blk];
        if (placed.output != kNoNet)
            merged.nets[placed.output].driver = blk;
        for (size_t pin = 0; pin < placed.inputs.size(); ++pin)
            merged.nets[placed.inputs[pin]].sinks.push_back(
                {blk, static_cast<int>(pin)});
    }
    return merged;
}

BaselineRecompileResult baseline_recompile_trigger(const Netlist &netlist,
                                                   const TriggerNetlist &trig,
                                                   const ArchSpec &arch, uint64_t seed)
{
    BaselineRecompileResult result;
    auto t0 = std::chrono::steady_clock::now();
    try {
        Netlist merged = merge_trigger(netlist, trig);
        Placement pl = place(merged, arch, seed);
        result.place_cost = placement_cost(merged, pl);
        RoutingResourceGraph rrg = build_rrg(arch);
        RouteResult rr = route(merged, pl, rrg, seed);
        result.ok = rr.ok();
        if (!rr.ok())
            result.detail = rr.detail;
    } catch (const std::exception &e) {
        result.ok = false;
        result.detail = e.what();
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

nlohmann::json fabric_to_json(const OverlayFabric &fabric)
{
    nlohmann::json cells = nlohmann::json::array();
    for (const OverlayCell &c : fabric.cells)
        cells.push_back({{"x", c.x},
                         {"y", c.y},
                         {"spare_slots", c.spare_slots},
                         {"free_ipins", c.free_ipins},
                         {"out_ok_slots", c.out_ok_slots}});
    nlohmann::json links = nlohmann::json::array();
    for (const OverlayLink &l : fabric.links)
        links.push_back({{"src_cell", l.src_cell},
                         {"src_slot", l.src_slot},
                         {"dst_cell", l.dst_cell},
                         {"dst_ipin", l.dst_ipin},
                         {"path", l.path}});
    return nlohmann::json{{"cells", cells}, {"links", links}};
}

OverlayFabric fabric_from_json(const nlohmann::json &j)
{
    OverlayFabric fabric;
    for (const auto &jc : j.at("cells")) {
        OverlayCell c;
        c.x = jc.at("x").get<int>();
        c.y = jc.at("y").get<int>();
        c.spare_slots = jc.at("spare_slots").get<std::vector<int>>();
        c.free_ipins = jc.at("free_ipins").get<std::vector<int>>();
        c.out_ok_slots = jc.at("out_ok_slots").get<std::vector<int>>();
        fabric.cells.push_back(std::move(c));
    }
    for (const auto &jl : j.at("links")) {
        OverlayLink l;
        l.src_cell = jl.at("src_cell").get<int>();
        l.src_slot = jl.at("src_slot").get<int>();
        l.dst_cell = jl.at("dst_cell").get<int>();
        l.dst_ipin = jl.at("dst_ipin").get<int>();
        l.path = jl.at("path").get<std::vector<NodeId>>();
        fabric.links.push_back(std::move(l));
    }
    fabric.rebuild_indexes();
    return fabric;
}

nlohmann::json mapping_to_json(const TriggerNetlist &trig, const TriggerMapping &m)
{
    const Netlist &n = trig.netlist;
    nlohmann::json les = nlohmann::json::object();
    for (const auto &[le, cs] : m.le_slot)
        les[n.blocks[le].name] = {cs.first, cs.second};
    nlohmann::json conns = nlohmann::json::array();
    for (const ConnRealization &c : m.conns) {
        nlohmann::json rts = nlohmann::json::array();
        for (const auto &rt : c.route_throughs)
            rts.push_back({rt.first, rt.second});
        conns.push_back({{"net", n.nets[c.net].name},
                         {"driver", n.blocks[c.driver_le].name},
                         {"sink", n.blocks[c.sink_le].name},
                         {"kind", conn_kind_name(c.kind)},
                         {"links", c.link_ids},
                         {"route_throughs", rts},
                         {"cost", c.cost}});
    }
    auto feed_json = [](const FeedRoute &f) {
        return nlohmann::json{
            {"tap", f.tap}, {"cell", f.cell}, {"ipin", f.ipin}, {"path", f.path}, {"ok", f.ok}};
    };
    nlohmann::json feeds = nlohmann::json::array();
    for (const FeedRoute &f : m.input_feeds)
        feeds.push_back(feed_json(f));
    nlohmann::json checkpoints = nlohmann::json::array();
    for (const auto &[temp, cost] : m.checkpoints)
        checkpoints.push_back({temp, cost});
    return nlohmann::json{{"le_slots", les},
                          {"conns", conns},
                          {"input_feeds", feeds},
                          {"output_feed", feed_json(m.output_feed)},
                          {"cost", m.cost},
                          {"feasible", m.feasible},
                          {"blocked_les", m.blocked_les},
                          {"checkpoints", checkpoints}};
}

} // namespace ovdbg
