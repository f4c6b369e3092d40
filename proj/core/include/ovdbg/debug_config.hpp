#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ovdbg/trace_overlay.hpp"

namespace ovdbg {

// Fold of the overlay forest: left vertices are user signals (the full
// universe, including unconnected ones), right vertices are trace inputs,
// with an edge iff the signal is a leaf of the tree rooted at that input.
struct BipartiteConnectivity
{
    std::vector<std::string> signals;    // sorted by name
    std::vector<NodeId> trace_inputs;    // tree roots, sorted by node id
    std::vector<std::vector<int>> edges; // per signal: sorted trace-input indices

    int signal_index(const std::string &name) const;
};

BipartiteConnectivity fold_to_bipartite(const OverlayForest &forest);

class UnknownSignalError : public std::runtime_error
{
  public:
    explicit UnknownSignalError(const std::string &signal)
        : std::runtime_error("unknown signal '" + signal + "'"), signal_(signal)
    {
    }
    const std::string &signal() const { return signal_; }

  private:
    std::string signal_;
};

// Maximum matching of the requested signals onto trace inputs
// (Hopcroft-Karp over the induced subgraph). Requests beyond the trace-input
// capacity are served maximally; unknown signals throw. Deterministic: ties
// prefer smaller trace-input node ids.
std::map<std::string, NodeId> select_signals(const BipartiteConnectivity &bip,
                                             const std::vector<std::string> &requested,
                                             std::vector<std::string> *unmatched = nullptr);

struct DebugConfig
{
    std::map<std::string, NodeId> matching;             // signal -> trace input
    std::map<NodeId, NodeId> mux_selects;               // node -> selected driver
    std::vector<std::string> unmatched;
};

// Walks each matched leaf-to-root path and assigns every node on it the
// select pointing at its path predecessor. Tree node-disjointness guarantees
// conflict-free selects; a failed walk throws (forest corruption).
DebugConfig emit_mux_config(const OverlayForest &forest,
                            const std::map<std::string, NodeId> &matching);

nlohmann::json debug_config_to_json(const DebugConfig &cfg);
DebugConfig debug_config_from_json(const nlohmann::json &j);

} // namespace ovdbg
