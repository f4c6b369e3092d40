#pragma once

#include <map>
#include <string>
#include <vector>

#include "ovdbg/rr_graph.hpp"

namespace ovdbg {

// Independent configuration oracle: interprets mux selects directly over RRG
// edges, with no knowledge of forests or matchings. Every configured node
// forwards the value of its selected driver; OPINs carry their signal name.
struct PropagationResult
{
    std::map<NodeId, std::string> delivered; // trace input -> arriving signal
    std::vector<std::string> violations;     // bad selects, cycles, dead drivers
};

PropagationResult simulate_propagation(const RoutingResourceGraph &rrg,
                                       const std::map<std::string, NodeId> &signal_opins,
                                       const std::map<NodeId, NodeId> &mux_selects);

} // namespace ovdbg
