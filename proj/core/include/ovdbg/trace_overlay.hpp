#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ovdbg/rr_graph.hpp"

namespace ovdbg {

struct OverlayParams
{
    int fanout_target = 2;     // distinct trace inputs each signal should reach
    double width_margin = 0.3; // extra tracks over w_min, applied by the pipeline
    int max_iters = 30;
    // Cost of extending along nodes a tree already owns. Slightly above zero
    // so trees grow balanced instead of maximally shared.
    double tree_share_cost = 0.05;
    double pres_fac_first = 0.5;
    double pres_fac_mult = 1.3;
    double hist_inc = 1.0;
};

struct OverlaySignal
{
    std::string name;
    NodeId opin = kNoNode;
};

struct OverlayLeaf
{
    NodeId opin = kNoNode;  // the tapped user signal source
    NodeId entry = kNoNode; // first tree node on the leaf-to-root path
};

struct OverlayTree
{
    NodeId root = kNoNode;                  // a trace-buffer input pin
    std::map<NodeId, NodeId> parent;        // tree node -> parent; root maps to kNoNode
    std::map<std::string, OverlayLeaf> leaves; // signal name -> tap
};

struct OverlayForest
{
    std::vector<OverlayTree> trees;
    std::map<std::string, NodeId> signals; // full signal universe surveyed at build
    std::map<std::string, std::vector<int>> signal_trees; // signal -> tree indices

    size_t claimed_node_count() const;
};

struct ConnectivityReport
{
    double fraction_connected = 0.0;
    std::map<std::string, int> reach; // distinct roots per signal
    std::vector<std::string> unconnected;
    double build_time_s = 0.0;
    int iterations = 0;
    bool converged = true;
};

// Builds the trace overlay out of FREE resources: a forest of node-disjoint
// trees rooted at trace inputs, leaves at user signals. Routing multiplexers
// may be shared within a tree (their selects bind at debug time); cross-tree
// conflicts are negotiated over iterations and finally resolved by evicting
// the connection with the higher signal name. Best-effort: unreachable
// signals are reported, never fatal.
std::pair<OverlayForest, ConnectivityReport> build_trace_overlay(
    const RoutingResourceGraph &rrg, const ResourceMask &mask,
    const std::vector<OverlaySignal> &signals, const std::vector<NodeId> &trace_inputs,
    const OverlayParams &params, uint64_t seed);

// Independent checker: re-derives node-disjointness, parent-chain
// termination, edge existence, mask legality (tree nodes must not be User or
// OverlayTrigger) and leaf soundness from scratch.
std::vector<std::string> verify_forest(const RoutingResourceGraph &rrg, const ResourceMask &mask,
                                       const OverlayForest &forest);

// Marks every tree node OverlayTrace.
void apply_forest_to_mask(const OverlayForest &forest, ResourceMask &mask);

nlohmann::json forest_to_json(const OverlayForest &forest);
OverlayForest forest_from_json(const nlohmann::json &j);
nlohmann::json report_to_json(const ConnectivityReport &report);
ConnectivityReport report_from_json(const nlohmann::json &j);

} // namespace ovdbg
