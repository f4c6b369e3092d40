#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ovdbg/place.hpp"
#include "ovdbg/rr_graph.hpp"

namespace ovdbg {

struct RouteTreeNode
{
    NodeId node = kNoNode;
    NodeId parent = kNoNode; // kNoNode at the root SOURCE
};

struct RouteTree
{
    std::vector<RouteTreeNode> nodes; // root first
    bool contains(NodeId n) const;
};

struct Routing
{
    int channel_width = 0;
    std::vector<RouteTree> nets; // indexed by net id; sink-less nets hold just the SOURCE
};

struct RouterOptions
{
    double pres_fac_first = 0.5;
    double pres_fac_mult = 1.3;
    double hist_inc = 1.0;
    int max_iters = 50;
    int bb_margin = 3;
    bool stall_abort = true;
    int stall_window = 10;
    // test/diagnostic hook, called once per iteration after history update
    std::function<void(int iter, const std::vector<float> &history, int overused)> iter_callback;
};

enum class RouteStatus : uint8_t { Success, Congested, Disconnected };

struct RouteResult
{
    RouteStatus status = RouteStatus::Success;
    Routing routing;
    std::vector<NodeId> congested; // overused nodes when status == Congested
    int iterations = 0;
    std::string detail;

    bool ok() const { return status == RouteStatus::Success; }
};

// Negotiated-congestion routing of every net of a placed netlist. Failure is
// a value: a Congested result names the nodes still overused after the
// iteration cap.
RouteResult route(const Netlist &netlist, const Placement &placement,
                  const RoutingResourceGraph &rrg, uint64_t seed, const RouterOptions &opts = {});

// Per-net target SINK nodes and the per-(tile, net) input-pin assignment.
// Distinct nets entering a CLB claim input pins in net-id order; pads use the
// pin matching their slot. Throws CapacityError on input-pin overflow.
struct SinkAssignment
{
    std::vector<NodeId> source_of_net;             // driver SOURCE per net
    std::vector<std::vector<NodeId>> sinks_of_net; // deduplicated SINK targets per net
};
SinkAssignment assign_pins(const Netlist &netlist, const Placement &placement,
                           const RoutingResourceGraph &rrg);

// Independent legality checker: per-net tree connectivity over real RRG
// edges, every sink reached, global capacity respected.
std::vector<std::string> verify_routing(const RoutingResourceGraph &rrg, const Netlist &netlist,
                                        const Placement &placement, const Routing &routing);

// Channel nodes used, summed over nets.
int routing_wirelength(const RoutingResourceGraph &rrg, const Routing &routing);

struct MinWidthResult
{
    int w_min = 0;
    std::vector<std::pair<int, bool>> attempts; // (W, routed) in trial order
};

class RoutingInfeasible : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Binary search over even channel widths in [2, w_hi]; the same placement is
// reused for every width. Throws RoutingInfeasible when w_hi itself fails.
MinWidthResult find_min_channel_width(const Netlist &netlist, const Placement &placement,
                                      const ArchSpec &arch_template, uint64_t seed, int w_hi = 64,
                                      const RouterOptions &opts = {});

nlohmann::json routing_to_json(const Netlist &netlist, const Routing &routing);
Routing routing_from_json(const Netlist &netlist, const nlohmann::json &j);

} // namespace ovdbg
