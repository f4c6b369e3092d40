#include "ovdbg/route.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>

namespace ovdbg {

bool RouteTree::contains(NodeId n) const
{
    for (const RouteTreeNode &t : nodes)
        if (t.node == n)
            return true;
    return false;
}

SinkAssignment assign_pins(const Netlist &netlist, const Placement &placement,
                           const RoutingResourceGraph &rrg)
{
    SinkAssignment out;
    out.source_of_net.assign(netlist.nets.size(), kNoNode);
    out.sinks_of_net.resize(netlist.nets.size());

    for (size_t net = 0; net < netlist.nets.size(); ++net) {
        const SlotRef &s = placement.block_slot[netlist.nets[net].driver];
        out.source_of_net[net] = rrg.source_node(s.x, s.y, s.slot);
    }

    // per CLB tile: distinct incoming nets in net-id order claim pins 0,1,...
    std::map<std::pair<int, int>, std::vector<int>> clb_nets;
    for (size_t net = 0; net < netlist.nets.size(); ++net)
        for (const NetSink &s : netlist.nets[net].sinks) {
            const SlotRef &loc = placement.block_slot[s.block];
            if (loc.kind == SlotKind::Ble) {
                auto &v = clb_nets[{loc.x, loc.y}];
                if (std::find(v.begin(), v.end(), static_cast<int>(net)) == v.end())
                    v.push_back(static_cast<int>(net));
            }
        }
    std::map<std::pair<std::pair<int, int>, int>, int> pin_of; // (tile, net) -> pin
    for (auto &[tile, nets] : clb_nets) {
        std::sort(nets.begin(), nets.end());
        if (static_cast<int>(nets.size()) > rrg.arch.clb_inputs)
            throw CapacityError("CLB (" + std::to_string(tile.first) + "," +
                                std::to_string(tile.second) + ") input pins exhausted");
        for (size_t i = 0; i < nets.size(); ++i)
            pin_of[{tile, nets[i]}] = static_cast<int>(i);
    }

    for (size_t net = 0; net < netlist.nets.size(); ++net) {
        std::vector<NodeId> &sinks = out.sinks_of_net[net];
        for (const NetSink &s : netlist.nets[net].sinks) {
            const SlotRef &loc = placement.block_slot[s.block];
            NodeId sink;
            if (loc.kind == SlotKind::Ble) {
                int pin = pin_of.at({{loc.x, loc.y}, static_cast<int>(net)});
                sink = rrg.sink_node(loc.x, loc.y, pin);
            } else {
                sink = rrg.sink_node(loc.x, loc.y, loc.slot);
            }
            if (std::find(sinks.begin(), sinks.end(), sink) == sinks.end())
                sinks.push_back(sink);
        }
    }
    return out;
}

namespace {

struct BBox
{
    int xmin, xmax, ymin, ymax;
    bool contains(int x, int y) const
    {
        return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
    }
};

class PathFinder
{
  public:
    PathFinder(const Netlist &nl, const Placement &pl, const RoutingResourceGraph &g,
               const RouterOptions &opts)
        : nl_(nl), g_(g), opts_(opts), assign_(assign_pins(nl, pl, g))
    {
        const int n = g.node_count();
        occ_.assign(n, 0);
        hist_.assign(n, 0.0f);
        cost_.assign(n, 0.0);
        prev_.assign(n, kNoNode);
        stamp_.assign(n, 0);
        ipin_sink_.assign(n, kNoNode);
        for (NodeId v = 0; v < n; ++v)
            if (g.nodes[v].kind == RrKind::Ipin)
                ipin_sink_[v] = g.fan_out(v)[0];

        bbox_.resize(nl.nets.size());
        for (size_t net = 0; net < nl.nets.size(); ++net) {
            BBox bb{1 << 20, -(1 << 20), 1 << 20, -(1 << 20)};
            auto touch = [&](NodeId node) {
                bb.xmin = std::min(bb.xmin, static_cast<int>(g.nodes[node].x));
                bb.xmax = std::max(bb.xmax, static_cast<int>(g.nodes[node].x));
                bb.ymin = std::min(bb.ymin, static_cast<int>(g.nodes[node].y));
                bb.ymax = std::max(bb.ymax, static_cast<int>(g.nodes[node].y));
            };
            touch(assign_.source_of_net[net]);
            for (NodeId s : assign_.sinks_of_net[net])
                touch(s);
            bb.xmin -= opts.bb_margin;
            bb.xmax += opts.bb_margin;
            bb.ymin -= opts.bb_margin;
            bb.ymax += opts.bb_margin;
            bbox_[net] = bb;
        }
    }

    RouteResult run()
    {
        RouteResult result;
        Routing routing;
        routing.channel_width = g_.arch.channel_width_w;
        routing.nets.resize(nl_.nets.size());

        // seed all trees with their SOURCE
        for (size_t net = 0; net < nl_.nets.size(); ++net) {
            routing.nets[net].nodes = {{assign_.source_of_net[net], kNoNode}};
            occ_[assign_.source_of_net[net]]++;
        }

        double pres_fac = opts_.pres_fac_first;
        int best_overuse = std::numeric_limits<int>::max();
        int best_overuse_iter = 0;

        for (int iter = 1; iter <= opts_.max_iters; ++iter) {
            for (size_t net = 0; net < nl_.nets.size(); ++net) {
                if (assign_.sinks_of_net[net].empty())
                    continue;
                if (iter > 1 && !tree_touches_congestion(routing.nets[net]))
                    continue;
                rip_up(routing.nets[net], static_cast<int>(net));
                if (!route_net(static_cast<int>(net), routing.nets[net], pres_fac)) {
                    result.status = RouteStatus::Disconnected;
                    result.detail = "net '" + nl_.nets[net].name + "' has an unreachable sink";
                    result.iterations = iter;
                    result.routing = std::move(routing);
                    return result;
                }
            }

            int overused = 0;
            for (NodeId v = 0; v < g_.node_count(); ++v) {
                if (occ_[v] > g_.nodes[v].capacity) {
                    ++overused;
                    hist_[v] += static_cast<float>(opts_.hist_inc *
                                                   (occ_[v] - g_.nodes[v].capacity));
                }
            }
            if (opts_.iter_callback)
                opts_.iter_callback(iter, hist_, overused);

            if (overused == 0) {
                result.status = RouteStatus::Success;
                result.iterations = iter;
                result.routing = std::move(routing);
                return result;
            }
            if (overused < best_overuse) {
                best_overuse = overused;
                best_overuse_iter = iter;
            } else if (opts_.stall_abort && iter - best_overuse_iter >= opts_.stall_window &&
                       iter >= 2 * opts_.stall_window) {
                result.iterations = iter;
                break;
            }
            pres_fac *= opts_.pres_fac_mult;
        }

        result.status = RouteStatus::Congested;
        if (result.iterations == 0)
            result.iterations = opts_.max_iters;
        for (NodeId v = 0; v < g_.node_count(); ++v)
            if (occ_[v] > g_.nodes[v].capacity)
                result.congested.push_back(v);
        result.detail = std::to_string(result.congested.size()) + " nodes overused";
        result.routing = std::move(routing);
        return result;
    }

  private:
    bool tree_touches_congestion(const RouteTree &tree) const
    {
        for (const RouteTreeNode &t : tree.nodes)
            if (occ_[t.node] > g_.nodes[t.node].capacity)
                return true;
        return false;
    }

    void rip_up(RouteTree &tree, int net)
    {
        for (const RouteTreeNode &t : tree.nodes)
            occ_[t.node]--;
        tree.nodes = {{assign_.source_of_net[net], kNoNode}};
        occ_[assign_.source_of_net[net]]++;
    }

    double node_cost(NodeId v, double pres_fac) const
    {
        int over = occ_[v] + 1 - g_.nodes[v].capacity;
        double present = over > 0 ? 1.0 + pres_fac * over : 1.0;
        return (1.0 + hist_[v]) * present;
    }

    bool route_net(int net, RouteTree &tree, double pres_fac)
    {
        // nearest sinks first, with node id as the deterministic tie-break
        std::vector<NodeId> targets = assign_.sinks_of_net[net];
        NodeId src = assign_.source_of_net[net];
        std::sort(targets.begin(), targets.end(), [&](NodeId a, NodeId b) {
            int da = std::abs(g_.nodes[a].x - g_.nodes[src].x) +
                     std::abs(g_.nodes[a].y - g_.nodes[src].y);
            int db = std::abs(g_.nodes[b].x - g_.nodes[src].x) +
                     std::abs(g_.nodes[b].y - g_.nodes[src].y);
            return da != db ? da < db : a < b;
        });
        for (NodeId target : targets) {
            if (!route_sink(net, tree, target, pres_fac, bbox_[net])) {
                // retry with a wider box, then unbounded
                BBox wide = bbox_[net];
                wide.xmin -= 8;
                wide.xmax += 8;
                wide.ymin -= 8;
                wide.ymax += 8;
                if (!route_sink(net, tree, target, pres_fac, wide) &&
                    !route_sink(net, tree, target, pres_fac,
                                BBox{-1, 1 << 20, -1, 1 << 20}))
                    return false;
            }
        }
        return true;
    }

    bool route_sink(int net, RouteTree &tree, NodeId target, double pres_fac, const BBox &bb)
    {
        ++generation_;
        using Entry = std::pair<double, NodeId>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
        for (const RouteTreeNode &t : tree.nodes) {
            cost_[t.node] = 0.0;
            prev_[t.node] = kNoNode;
            stamp_[t.node] = generation_;
            pq.push({0.0, t.node});
        }
        NodeId found = kNoNode;
        while (!pq.empty()) {
            auto [c, u] = pq.top();
            pq.pop();
            if (stamp_[u] == generation_ && c > cost_[u])
                continue;
            if (u == target) {
                found = u;
                break;
            }
            for (NodeId v : g_.fan_out(u)) {
                const RrNode &node = g_.nodes[v];
                if (node.kind == RrKind::TbIpin)
                    continue; // debug fabric, not for user nets
                if (node.kind == RrKind::Sink && v != target)
                    continue;
                if (node.kind == RrKind::Ipin && ipin_sink_[v] != target)
                    continue;
                if ((node.kind == RrKind::ChanX || node.kind == RrKind::ChanY) &&
                    !bb.contains(node.x, node.y))
                    continue;
                double nc = c + node_cost(v, pres_fac);
                if (stamp_[v] != generation_ || nc < cost_[v] ||
                    (nc == cost_[v] && u < prev_[v])) {
                    stamp_[v] = generation_;
                    cost_[v] = nc;
                    prev_[v] = u;
                    pq.push({nc, v});
                }
            }
        }
        if (found == kNoNode)
            return false;
        // walk back and graft onto the tree
        std::vector<NodeId> path;
        for (NodeId v = found; prev_[v] != kNoNode; v = prev_[v])
            path.push_back(v);
        std::reverse(path.begin(), path.end());
        NodeId parent = path.empty() ? found : prev_[path.front()];
        for (NodeId v : path) {
            if (!tree.contains(v)) {
                tree.nodes.push_back({v, parent});
                occ_[v]++;
            }
            parent = v;
        }
        return true;
    }

    const Netlist &nl_;
    const RoutingResourceGraph &g_;
    RouterOptions opts_;
    SinkAssignment assign_;
    std::vector<int> occ_;
    std::vector<float> hist_;
    std::vector<double> cost_;
    std::vector<NodeId> prev_;
    std::vector<int> stamp_;
    std::vector<NodeId> ipin_sink_;
    std::vector<BBox> bbox_;
    int generation_ = 0;
};

} // namespace

RouteResult route(const Netlist &netlist, const Placement &placement,
                  const RoutingResourceGraph &rrg, uint64_t /*seed*/, const RouterOptions &opts)
{
    PathFinder pf(netlist, placement, rrg, opts);
    return pf.run();
}

std::vector<std::string> verify_routing(const RoutingResourceGraph &rrg, const Netlist &netlist,
                                        const Placement &placement, const Routing &routing)
{
    std::vector<std::string> issues;
    if (routing.nets.size() != netlist.nets.size()) {
        issues.push_back("routing net count does not match netlist");
        return issues;
    }
    SinkAssignment assign = assign_pins(netlist, placement, rrg);
    std::vector<int> used(rrg.node_count(), 0);

    for (size_t net = 0; net < netlist.nets.size(); ++net) {
        const RouteTree &tree = routing.nets[net];
        const std::string &name = netlist.nets[net].name;
        if (tree.nodes.empty()) {
            issues.push_back("net '" + name + "' has no route tree");
            continue;
        }
        if (tree.nodes[0].node != assign.source_of_net[net] ||
            tree.nodes[0].parent != kNoNode)
            issues.push_back("net '" + name + "' is not rooted at its SOURCE");
        std::set<NodeId> in_tree;
        for (const RouteTreeNode &t : tree.nodes) {
            if (!in_tree.insert(t.node).second)
                issues.push_back("net '" + name + "' lists node " + std::to_string(t.node) +
                                 " twice");
            used[t.node]++;
        }
        for (size_t i = 1; i < tree.nodes.size(); ++i) {
            const RouteTreeNode &t = tree.nodes[i];
            if (!in_tree.count(t.parent))
                issues.push_back("net '" + name + "' node " + std::to_string(t.node) +
                                 " has a parent outside the tree");
            else if (!rrg.has_edge(t.parent, t.node))
                issues.push_back("net '" + name + "' uses a non-existent edge " +
                                 std::to_string(t.parent) + "->" + std::to_string(t.node));
        }
        for (NodeId sink : assign.sinks_of_net[net])
            if (!in_tree.count(sink))
                issues.push_back("net '" + name + "' misses sink node " + std::to_string(sink));
    }
    for (NodeId v = 0; v < rrg.node_count(); ++v)
        if (used[v] > rrg.nodes[v].capacity)
            issues.push_back("node " + std::to_string(v) + " used " + std::to_string(used[v]) +
                             " times, capacity " + std::to_string(rrg.nodes[v].capacity));
    return issues;
}

int routing_wirelength(const RoutingResourceGraph &rrg, const Routing &routing)
{
    int wl = 0;
    for (const RouteTree &tree : routing.nets)
        for (const RouteTreeNode &t : tree.nodes) {
            RrKind k = rrg.nodes[t.node].kind;
            if (k == RrKind::ChanX || k == RrKind::ChanY)
                ++wl;
        }
    return wl;
}

MinWidthResult find_min_channel_width(const Netlist &netlist, const Placement &placement,
                                      const ArchSpec &arch_template, uint64_t seed, int w_hi,
                                      const RouterOptions &opts)
{
    MinWidthResult result;
    auto routable = [&](int w) {
        ArchSpec arch = arch_template;
        arch.channel_width_w = w;
        RoutingResourceGraph rrg = build_rrg(arch);
        bool ok = route(netlist, placement, rrg, seed, opts).ok();
        result.attempts.emplace_back(w, ok);
        return ok;
    };

    if (w_hi % 2 != 0)
        --w_hi;
    if (w_hi < 2)
        throw RoutingInfeasible("w_hi must be at least 2");
    if (!routable(w_hi))
        throw RoutingInfeasible("unroutable at w_hi = " + std::to_string(w_hi));

    int lo = 1, hi = w_hi / 2; // search in track pairs
    while (lo < hi) {
        int mid = lo + (hi - lo) / 2;
        if (routable(2 * mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    result.w_min = 2 * hi;
    // definitional check: one step narrower must fail
    if (result.w_min > 2) {
        bool below = false;
        for (auto &[w, ok] : result.attempts)
            if (w == result.w_min - 2) {
                below = true;
                break;
            }
        if (!below)
            routable(result.w_min - 2);
    }
    return result;
}

nlohmann::json routing_to_json(const Netlist &netlist, const Routing &routing)
{
    nlohmann::json nets = nlohmann::json::object();
    for (size_t net = 0; net < routing.nets.size(); ++net) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const RouteTreeNode &t : routing.nets[net].nodes)
            nodes.push_back({t.node, t.parent});
        nets[netlist.nets[net].name] = std::move(nodes);
    }
    return nlohmann::json{{"channel_width", routing.channel_width}, {"nets", nets}};
}

Routing routing_from_json(const Netlist &netlist, const nlohmann::json &j)
{
    Routing r;
    r.channel_width = j.at("channel_width").get<int>();
    r.nets.resize(netlist.nets.size());
    const auto &nets = j.at("nets");
    for (size_t net = 0; net < netlist.nets.size(); ++net) {
        for (const auto &pair : nets.at(netlist.nets[net].name))
            r.nets[net].nodes.push_back(
                {pair.at(0).get<NodeId>(), pair.at(1).get<NodeId>()});
    }
    return r;
}

} // namespace ovdbg
