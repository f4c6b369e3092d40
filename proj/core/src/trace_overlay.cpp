#include "ovdbg/trace_overlay.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace ovdbg {

size_t OverlayForest::claimed_node_count() const
{
    size_t n = 0;
    for (const OverlayTree &t : trees)
        n += t.parent.size();
    return n;
}

namespace {

struct Connection
{
    int signal = -1; // index into signals
    int slot = 0;    // fanout slot
    std::vector<NodeId> path; // opin first, root last; empty when unrouted
    int tree = -1;            // index into builder trees
    bool failed = false;
    std::set<int> failed_excl; // exclusion set at the last failure
};

struct TreeState
{
    NodeId root = kNoNode;
    std::unordered_map<NodeId, NodeId> parent;
    std::unordered_map<NodeId, int> refcount;
};

class OverlayBuilder
{
  public:
    OverlayBuilder(const RoutingResourceGraph &g, const ResourceMask &mask,
                   const std::vector<OverlaySignal> &signals,
                   const std::vector<NodeId> &trace_inputs, const OverlayParams &params)
        : g_(g), mask_(mask), signals_(signals), params_(params)
    {
        for (NodeId t : trace_inputs)
            if (mask.is_free(t))
                targets_.insert(t);
        claims_.resize(g.node_count());
        hist_.assign(g.node_count(), 0.0f);
        cost_.assign(g.node_count(), 0.0);
        prev_.assign(g.node_count(), kNoNode);
        stamp_.assign(g.node_count(), 0);
    }

    std::pair<OverlayForest, ConnectivityReport> run()
    {
        auto t0 = std::chrono::steady_clock::now();
        ConnectivityReport report;

        std::vector<int> order = hardest_first_order();
        for (int s : order)
            for (int k = 0; k < params_.fanout_target; ++k)
                conns_.push_back(Connection{s, k, {}, -1});

        double pres_fac = params_.pres_fac_first;
        bool converged = false;
        int iter = 0;
        std::vector<uint8_t> hopeless(signals_.size(), 0);
        for (iter = 1; iter <= params_.max_iters; ++iter) {
            for (Connection &c : conns_) {
                if (hopeless[c.signal])
                    continue;
                bool dirty = c.path.empty() || path_conflicted(c);
                if (iter > 1 && !dirty)
                    continue;
                // a failed connection is only worth retrying once the roots
                // excluded by its sibling slots have changed
                if (iter > 1 && c.path.empty() && c.failed &&
                    c.failed_excl == excluded_trees(c))
                    continue;
                rip_up(c);
                if (!route_connection(c, pres_fac)) {
                    c.failed = true;
                    c.failed_excl = excluded_trees(c);
                    if (c.slot == 0 && iter == 1)
                        hopeless[c.signal] = 1; // unreachable through spares
                } else {
                    c.failed = false;
                }
            }
            if (!any_conflict()) {
                converged = true;
                break;
            }
            for (NodeId v = 0; v < g_.node_count(); ++v)
                if (claims_[v].size() > 1)
                    hist_[v] += static_cast<float>(params_.hist_inc *
                                                   (claims_[v].size() - 1));
            pres_fac *= params_.pres_fac_mult;
        }

        if (!converged)
            evict_to_forest();

        OverlayForest forest = materialize();
        report.converged = converged;
        report.iterations = std::min(iter, params_.max_iters);
        for (const auto &[name, trees] : forest.signal_trees)
            report.reach[name] = static_cast<int>(trees.size());
        int connected = 0;
        for (const OverlaySignal &s : signals_) {
            auto it = report.reach.find(s.name);
            if (it != report.reach.end() && it->second > 0)
                ++connected;
            else {
                report.reach[s.name] = 0;
                report.unconnected.push_back(s.name);
            }
        }
        report.fraction_connected =
            signals_.empty() ? 1.0 : static_cast<double>(connected) / signals_.size();
        report.build_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return {std::move(forest), std::move(report)};
    }

  private:
    // Signals ordered by distance to the nearest trace input, descending
    // (hardest first); reverse BFS from all trace inputs over free channels.
    std::vector<int> hardest_first_order()
    {
        std::vector<int> dist(g_.node_count(), -1);
        std::queue<NodeId> q;
        for (NodeId t : targets_) {
            dist[t] = 0;
            q.push(t);
        }
        while (!q.empty()) {
            NodeId u = q.front();
            q.pop();
            for (NodeId v : g_.fan_in(u)) {
                RrKind k = g_.nodes[v].kind;
                if (k != RrKind::ChanX && k != RrKind::ChanY)
                    continue;
                if (!mask_.is_free(v) || dist[v] >= 0)
                    continue;
                dist[v] = dist[u] + 1;
                q.push(v);
            }
        }
        auto signal_dist = [&](const OverlaySignal &s) {
            int best = std::numeric_limits<int>::max();
            for (NodeId v : g_.fan_out(s.opin)) {
                RrKind k = g_.nodes[v].kind;
                if ((k == RrKind::ChanX || k == RrKind::ChanY) && dist[v] >= 0)
                    best = std::min(best, dist[v] + 1);
            }
            return best;
        };
        std::vector<std::pair<int, int>> keyed;
        for (size_t i = 0; i < signals_.size(); ++i)
            keyed.push_back({signal_dist(signals_[i]), static_cast<int>(i)});
        std::stable_sort(keyed.begin(), keyed.end(), [&](const auto &a, const auto &b) {
            if (a.first != b.first)
                return a.first > b.first;
            return signals_[a.second].name < signals_[b.second].name;
        });
        std::vector<int> order;
        for (auto &[d, i] : keyed)
            order.push_back(i);
        return order;
    }

    bool path_conflicted(const Connection &c) const
    {
        for (size_t i = 1; i < c.path.size(); ++i)
            if (claims_[c.path[i]].size() > 1)
                return true;
        return false;
    }

    bool any_conflict() const
    {
        for (const auto &c : claims_)
            if (c.size() > 1)
                return true;
        return false;
    }

    void rip_up(Connection &c)
    {
        if (c.path.empty())
            return;
        TreeState &tree = trees_[c.tree];
        for (size_t i = 1; i < c.path.size(); ++i) {
            NodeId v = c.path[i];
            if (--tree.refcount[v] == 0) {
                tree.refcount.erase(v);
                tree.parent.erase(v);
                auto &cl = claims_[v];
                cl.erase(std::find(cl.begin(), cl.end(), c.tree));
            }
        }
        c.path.clear();
        c.tree = -1;
    }

    int tree_for_root(NodeId root)
    {
        auto it = root_tree_.find(root);
        if (it != root_tree_.end())
            return it->second;
        trees_.push_back(TreeState{root, {}, {}});
        root_tree_[root] = static_cast<int>(trees_.size() - 1);
        return static_cast<int>(trees_.size() - 1);
    }

    int chain_len(int tree, NodeId from) const
    {
        const TreeState &t = trees_[tree];
        int len = 0;
        NodeId v = from;
        while (v != t.root) {
            auto it = t.parent.find(v);
            if (it == t.parent.end())
                return -1; // broken chain, caller skips the join
            v = it->second;
            ++len;
            if (len > g_.node_count())
                return -1;
        }
        return len;
    }

    // Roots already reached by other slots of the same signal.
    std::set<int> excluded_trees(const Connection &c) const
    {
        std::set<int> out;
        for (const Connection &other : conns_)
            if (other.signal == c.signal && other.slot != c.slot && other.tree >= 0)
                out.insert(other.tree);
        return out;
    }

    bool route_connection(Connection &c, double pres_fac)
    {
        const OverlaySignal &sig = signals_[c.signal];
        std::set<int> excluded = excluded_trees(c);

        ++generation_;
        using Entry = std::pair<double, NodeId>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
        cost_[sig.opin] = 0.0;
        prev_[sig.opin] = kNoNode;
        stamp_[sig.opin] = generation_;
        pq.push({0.0, sig.opin});

        double best_total = std::numeric_limits<double>::infinity();
        NodeId best_from = kNoNode; // last Dijkstra-searched node
        NodeId best_join = kNoNode; // node stepped onto to finish: a claimed
                                    // chan node of the joined tree, or a root
        int best_tree = -1;         // >= 0 when joining an existing tree

        auto offer = [&](double total, NodeId from, NodeId join, int tree) {
            if (total < best_total || (total == best_total && join < best_join)) {
                best_total = total;
                best_from = from;
                best_join = join;
                best_tree = tree;
            }
        };

        while (!pq.empty()) {
            auto [cu, u] = pq.top();
            pq.pop();
            if (stamp_[u] == generation_ && cu > cost_[u])
                continue;
            if (cu >= best_total)
                break;
            for (NodeId v : g_.fan_out(u)) {
                const RrNode &node = g_.nodes[v];
                if (node.kind == RrKind::TbIpin) {
                    if (!targets_.count(v))
                        continue;
                    auto rt = root_tree_.find(v);
                    if (rt == root_tree_.end() || trees_[rt->second].parent.empty())
                        offer(cu + 1.0, u, v, -1); // fresh tree
                    else if (!excluded.count(rt->second))
                        offer(cu + params_.tree_share_cost, u, v, rt->second);
                    continue;
                }
                if (node.kind != RrKind::ChanX && node.kind != RrKind::ChanY)
                    continue;
                if (!mask_.is_free(v))
                    continue;
                const auto &cl = claims_[v];
                // join a tree that owns this node: the rest of the path is
                // that tree's parent chain
                for (int tree : cl) {
                    if (excluded.count(tree))
                        continue;
                    int len = chain_len(tree, v);
                    if (len >= 0)
                        offer(cu + params_.tree_share_cost * (1 + len), u, v, tree);
                }
                // or contest it for some other tree
                double congestion = 1.0 + pres_fac * static_cast<double>(cl.size());
                double nc = cu + (1.0 + hist_[v]) * congestion;
                if (stamp_[v] != generation_ || nc < cost_[v]) {
                    stamp_[v] = generation_;
                    cost_[v] = nc;
                    prev_[v] = u;
                    pq.push({nc, v});
                }
            }
        }

        if (best_join == kNoNode)
            return false;

        // full path: opin ... best_from, then the join node, then (when
        // joining mid-tree) the existing chain up to the root
        std::vector<NodeId> path;
        for (NodeId v = best_from; v != kNoNode; v = prev_[v])
            path.push_back(v);
        std::reverse(path.begin(), path.end());
        path.push_back(best_join);

        int tree;
        if (best_tree >= 0) {
            tree = best_tree;
            const TreeState &ts = trees_[tree];
            NodeId v = best_join;
            while (v != ts.root) {
                v = ts.parent.at(v);
                path.push_back(v);
            }
        } else {
            tree = tree_for_root(best_join);
        }

        // claim everything past the opin
        TreeState &ts = trees_[tree];
        for (size_t i = 1; i < path.size(); ++i) {
            NodeId v = path[i];
            auto &cl = claims_[v];
            if (std::find(cl.begin(), cl.end(), tree) == cl.end()) {
                cl.push_back(tree);
                ts.parent[v] = (i + 1 < path.size()) ? path[i + 1] : kNoNode;
            }
            ts.refcount[v]++;
        }
        ts.parent[ts.root] = kNoNode;
        c.path = std::move(path);
        c.tree = tree;
        return true;
    }

    // Final conflict resolution: replay connections in (signal name, slot)
    // order; a connection whose path touches a node owned by another tree in
    // the replay is evicted. Lower signal names win.
    void evict_to_forest()
    {
        std::vector<Connection *> order;
        for (Connection &c : conns_)
            if (!c.path.empty())
                order.push_back(&c);
        std::sort(order.begin(), order.end(), [&](const Connection *a, const Connection *b) {
            const std::string &na = signals_[a->signal].name;
            const std::string &nb = signals_[b->signal].name;
            if (na != nb)
                return na < nb;
            return a->slot < b->slot;
        });
        std::unordered_map<NodeId, int> owner;
        for (Connection *c : order) {
            bool ok = true;
            for (size_t i = 1; i < c->path.size() && ok; ++i) {
                auto it = owner.find(c->path[i]);
                if (it != owner.end() && it->second != c->tree)
                    ok = false;
            }
            if (!ok) {
                c->path.clear();
                c->tree = -1;
                continue;
            }
            for (size_t i = 1; i < c->path.size(); ++i)
                owner[c->path[i]] = c->tree;
        }
        // rebuild per-tree structure from the surviving paths
        for (TreeState &t : trees_) {
            t.parent.clear();
            t.refcount.clear();
        }
        for (auto &cl : claims_)
            cl.clear();
        for (Connection *c : order) {
            if (c->path.empty())
                continue;
            TreeState &ts = trees_[c->tree];
            for (size_t i = 1; i < c->path.size(); ++i) {
                NodeId v = c->path[i];
                auto &cl = claims_[v];
                if (std::find(cl.begin(), cl.end(), c->tree) == cl.end()) {
                    cl.push_back(c->tree);
                    ts.parent[v] = (i + 1 < c->path.size()) ? c->path[i + 1] : kNoNode;
                }
                ts.refcount[v]++;
            }
            ts.parent[ts.root] = kNoNode;
        }
    }

    OverlayForest materialize()
    {
        OverlayForest forest;
        for (const OverlaySignal &s : signals_)
            forest.signals[s.name] = s.opin;
        std::vector<int> tree_index(trees_.size(), -1);
        for (size_t t = 0; t < trees_.size(); ++t) {
            if (trees_[t].parent.empty())
                continue;
            OverlayTree out;
            out.root = trees_[t].root;
            for (const auto &[node, parent] : trees_[t].parent)
                out.parent[node] = parent;
            tree_index[t] = static_cast<int>(forest.trees.size());
            forest.trees.push_back(std::move(out));
        }
        for (const Connection &c : conns_) {
            if (c.path.empty() || tree_index[c.tree] < 0)
                continue;
            OverlayTree &tree = forest.trees[tree_index[c.tree]];
            const std::string &name = signals_[c.signal].name;
            tree.leaves[name] = OverlayLeaf{c.path.front(), c.path[1]};
            auto &v = forest.signal_trees[name];
            if (std::find(v.begin(), v.end(), tree_index[c.tree]) == v.end())
                v.push_back(tree_index[c.tree]);
        }
        for (auto &[name, v] : forest.signal_trees)
            std::sort(v.begin(), v.end());
        return forest;
    }

    const RoutingResourceGraph &g_;
    const ResourceMask &mask_;
    const std::vector<OverlaySignal> &signals_;
    OverlayParams params_;
    std::set<NodeId> targets_;
    std::vector<Connection> conns_;
    std::vector<TreeState> trees_;
    std::unordered_map<NodeId, int> root_tree_;
    std::vector<std::vector<int>> claims_; // tree indices claiming each node
    std::vector<float> hist_;
    std::vector<double> cost_;
    std::vector<NodeId> prev_;
    std::vector<int> stamp_;
    int generation_ = 0;
};

} // namespace

std::pair<OverlayForest, ConnectivityReport> build_trace_overlay(
    const RoutingResourceGraph &rrg, const ResourceMask &mask,
    const std::vector<OverlaySignal> &signals, const std::vector<NodeId> &trace_inputs,
    const OverlayParams &params, uint64_t /*seed*/)
{
    OverlayBuilder builder(rrg, mask, signals, trace_inputs, params);
    return builder.run();
}

std::vector<std::string> verify_forest(const RoutingResourceGraph &rrg, const ResourceMask &mask,
                                       const OverlayForest &forest)
{
    std::vector<std::string> issues;
    std::unordered_map<NodeId, int> owner;

    for (size_t t = 0; t < forest.trees.size(); ++t) {
        const OverlayTree &tree = forest.trees[t];
        std::string tag = "tree " + std::to_string(t) + " (root " + std::to_string(tree.root) + ")";
        if (tree.root < 0 || tree.root >= rrg.node_count() ||
            rrg.nodes[tree.root].kind != RrKind::TbIpin) {
            issues.push_back(tag + ": root is not a trace-buffer input");
            continue;
        }
        if (!tree.parent.count(tree.root))
            issues.push_back(tag + ": root missing from node set");
        for (const auto &[node, parent] : tree.parent) {
            auto [it, fresh] = owner.try_emplace(node, static_cast<int>(t));
            if (!fresh && it->second != static_cast<int>(t))
                issues.push_back(tag + ": node " + std::to_string(node) +
                                 " also belongs to tree " + std::to_string(it->second));
            Occupancy occ = mask.at(node);
            if (occ == Occupancy::User || occ == Occupancy::OverlayTrigger)
                issues.push_back(tag + ": node " + std::to_string(node) +
                                 " is not a spare resource");
            if (node == tree.root) {
                if (parent != kNoNode)
                    issues.push_back(tag + ": root has a parent");
                continue;
            }
            if (!tree.parent.count(parent))
                issues.push_back(tag + ": node " + std::to_string(node) +
                                 " parent missing from tree");
            else if (!rrg.has_edge(node, parent))
                issues.push_back(tag + ": no RRG edge " + std::to_string(node) + "->" +
                                 std::to_string(parent));
        }
        // every node must reach the root by following parents
        for (const auto &[node, parent] : tree.parent) {
            NodeId v = node;
            size_t steps = 0;
            while (v != tree.root && steps <= tree.parent.size()) {
                auto it = tree.parent.find(v);
                if (it == tree.parent.end())
                    break;
                v = it->second;
                ++steps;
            }
            if (v != tree.root)
                issues.push_back(tag + ": node " + std::to_string(node) +
                                 " does not reach the root");
        }
        for (const auto &[name, leaf] : tree.leaves) {
            if (!tree.parent.count(leaf.entry)) {
                issues.push_back(tag + ": leaf '" + name + "' entry node not in tree");
                continue;
            }
            if (!rrg.has_edge(leaf.opin, leaf.entry))
                issues.push_back(tag + ": leaf '" + name + "' opin has no edge into the tree");
            auto sig = forest.signals.find(name);
            if (sig == forest.signals.end())
                issues.push_back(tag + ": leaf '" + name + "' not in the signal universe");
            else if (sig->second != leaf.opin)
                issues.push_back(tag + ": leaf '" + name + "' opin mismatch");
        }
    }
    // signal_trees must mirror the leaf sets exactly
    std::map<std::string, std::vector<int>> recount;
    for (size_t t = 0; t < forest.trees.size(); ++t)
        for (const auto &[name, leaf] : forest.trees[t].leaves)
            recount[name].push_back(static_cast<int>(t));
    for (auto &[name, v] : recount)
        std::sort(v.begin(), v.end());
    if (recount != forest.signal_trees)
        issues.push_back("signal_trees map does not match tree leaf sets");
    return issues;
}

void apply_forest_to_mask(const OverlayForest &forest, ResourceMask &mask)
{
    for (const OverlayTree &tree : forest.trees)
        for (const auto &[node, parent] : tree.parent)
            mask.set(node, Occupancy::OverlayTrace);
}

nlohmann::json forest_to_json(const OverlayForest &forest)
{
    nlohmann::json trees = nlohmann::json::array();
    for (const OverlayTree &t : forest.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto &[node, parent] : t.parent)
            nodes.push_back({node, parent});
        nlohmann::json leaves = nlohmann::json::object();
        for (const auto &[name, leaf] : t.leaves)
            leaves[name] = {{"opin", leaf.opin}, {"entry", leaf.entry}};
        trees.push_back({{"root", t.root}, {"nodes", nodes}, {"leaves", leaves}});
    }
    nlohmann::json signals = nlohmann::json::object();
    for (const auto &[name, opin] : forest.signals)
        signals[name] = opin;
    return nlohmann::json{{"trees", trees}, {"signals", signals}};
}

OverlayForest forest_from_json(const nlohmann::json &j)
{
    OverlayForest forest;
    for (const auto &jt : j.at("trees")) {
        OverlayTree t;
        t.root = jt.at("root").get<NodeId>();
        for (const auto &pair : jt.at("nodes"))
            t.parent[pair.at(0).get<NodeId>()] = pair.at(1).get<NodeId>();
        for (const auto &[name, leaf] : jt.at("leaves").items())
            t.leaves[name] =
                OverlayLeaf{leaf.at("opin").get<NodeId>(), leaf.at("entry").get<NodeId>()};
        forest.trees.push_back(std::move(t));
    }
    for (const auto &[name, opin] : j.at("signals").items())
        forest.signals[name] = opin.get<NodeId>();
    for (size_t t = 0; t < forest.trees.size(); ++t)
        for (const auto &[name, leaf] : forest.trees[t].leaves)
            forest.signal_trees[name].push_back(static_cast<int>(t));
    return forest;
}

nlohmann::json report_to_json(const ConnectivityReport &r)
{
    return nlohmann::json{{"fraction_connected", r.fraction_connected},
                          {"reach", r.reach},
                          {"unconnected", r.unconnected},
                          {"build_time_s", r.build_time_s},
                          {"iterations", r.iterations},
                          {"converged", r.converged}};
}

ConnectivityReport report_from_json(const nlohmann::json &j)
{
    ConnectivityReport r;
    r.fraction_connected = j.at("fraction_connected").get<double>();
    r.reach = j.at("reach").get<std::map<std::string, int>>();
    r.unconnected = j.at("unconnected").get<std::vector<std::string>>();
    r.build_time_s = j.at("build_time_s").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.converged = j.at("converged").get<bool>();
    return r;
}

} // namespace ovdbg
