#include "ovdbg/debug_config.hpp"

#include <algorithm>

#include "ovdbg/matching.hpp"

namespace ovdbg {

int BipartiteConnectivity::signal_index(const std::string &name) const
{
    auto it = std::lower_bound(signals.begin(), signals.end(), name);
    if (it == signals.end() || *it != name)
        return -1;
    return static_cast<int>(it - signals.begin());
}

BipartiteConnectivity fold_to_bipartite(const OverlayForest &forest)
{
    BipartiteConnectivity bip;
    for (const auto &[name, opin] : forest.signals)
        bip.signals.push_back(name); // std::map iterates sorted
    for (const OverlayTree &t : forest.trees)
        bip.trace_inputs.push_back(t.root);
    std::vector<int> tree_order(forest.trees.size());
    for (size_t i = 0; i < tree_order.size(); ++i)
        tree_order[i] = static_cast<int>(i);
    std::sort(tree_order.begin(), tree_order.end(),
              [&](int a, int b) { return forest.trees[a].root < forest.trees[b].root; });
    std::sort(bip.trace_inputs.begin(), bip.trace_inputs.end());

    bip.edges.assign(bip.signals.size(), {});
    for (size_t right = 0; right < tree_order.size(); ++right) {
        const OverlayTree &t = forest.trees[tree_order[right]];
        for (const auto &[name, leaf] : t.leaves) {
            int s = bip.signal_index(name);
            if (s >= 0)
                bip.edges[s].push_back(static_cast<int>(right));
        }
    }
    for (auto &e : bip.edges)
        std::sort(e.begin(), e.end());
    return bip;
}

std::map<std::string, NodeId> select_signals(const BipartiteConnectivity &bip,
                                             const std::vector<std::string> &requested,
                                             std::vector<std::string> *unmatched)
{
    // canonical request order: sorted unique names
    std::vector<std::string> want(requested);
    std::sort(want.begin(), want.end());
    want.erase(std::unique(want.begin(), want.end()), want.end());

    BipartiteGraph g;
    g.n_left = static_cast<int>(want.size());
    g.n_right = static_cast<int>(bip.trace_inputs.size());
    g.adj.resize(want.size());
    for (size_t i = 0; i < want.size(); ++i) {
        int s = bip.signal_index(want[i]);
        if (s < 0)
            throw UnknownSignalError(want[i]);
        g.adj[i] = bip.edges[s];
    }

    std::vector<int> match = hopcroft_karp(g);
    std::map<std::string, NodeId> out;
    for (size_t i = 0; i < want.size(); ++i) {
        if (match[i] >= 0)
            out[want[i]] = bip.trace_inputs[match[i]];
        else if (unmatched)
            unmatched->push_back(want[i]);
    }
    return out;
}

DebugConfig emit_mux_config(const OverlayForest &forest,
                            const std::map<std::string, NodeId> &matching)
{
    DebugConfig cfg;
    cfg.matching = matching;

    for (const auto &[signal, root] : matching) {
        const OverlayTree *tree = nullptr;
        for (const OverlayTree &t : forest.trees)
            if (t.root == root) {
                tree = &t;
                break;
            }
        if (!tree)
            throw std::logic_error("matching names trace input " + std::to_string(root) +
                                   " with no tree");
        auto leaf = tree->leaves.find(signal);
        if (leaf == tree->leaves.end())
            throw std::logic_error("signal '" + signal + "' is not a leaf of tree at " +
                                   std::to_string(root));
        NodeId from = leaf->second.opin;
        NodeId cur = leaf->second.entry;
        size_t steps = 0;
        while (true) {
            auto [it, fresh] = cfg.mux_selects.try_emplace(cur, from);
            if (!fresh && it->second != from)
                throw std::logic_error("select conflict at node " + std::to_string(cur) +
                                       " (forest corruption)");
            auto parent = tree->parent.find(cur);
            if (parent == tree->parent.end())
                throw std::logic_error("path walk fell off tree at node " + std::to_string(cur));
            if (parent->second == kNoNode) {
                if (cur != tree->root)
                    throw std::logic_error("path ended away from root at node " +
                                           std::to_string(cur));
                break;
            }
            from = cur;
            cur = parent->second;
            if (++steps > tree->parent.size())
                throw std::logic_error("cycle while walking tree at " + std::to_string(root));
        }
    }
    return cfg;
}

nlohmann::json debug_config_to_json(const DebugConfig &cfg)
{
    nlohmann::json matching = nlohmann::json::object();
    for (const auto &[signal, node] : cfg.matching)
        matching[signal] = node;
    nlohmann::json selects = nlohmann::json::array();
    for (const auto &[node, from] : cfg.mux_selects)
        selects.push_back({node, from});
    return nlohmann::json{
        {"matching", matching}, {"mux_selects", selects}, {"unmatched", cfg.unmatched}};
}

DebugConfig debug_config_from_json(const nlohmann::json &j)
{
    DebugConfig cfg;
    for (const auto &[signal, node] : j.at("matching").items())
        cfg.matching[signal] = node.get<NodeId>();
    for (const auto &pair : j.at("mux_selects"))
        cfg.mux_selects[pair.at(0).get<NodeId>()] = pair.at(1).get<NodeId>();
    cfg.unmatched = j.at("unmatched").get<std::vector<std::string>>();
    return cfg;
}

} // namespace ovdbg
