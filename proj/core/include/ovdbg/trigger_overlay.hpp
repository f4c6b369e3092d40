#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ovdbg/netlist.hpp"
#include "ovdbg/place.hpp"
#include "ovdbg/route.hpp"
#include "ovdbg/rr_graph.hpp"
#include "ovdbg/trace_overlay.hpp"

namespace ovdbg {

// One overlay cell = one CLB's spare BLEs, with full intra-cluster
// connectivity assumed through the CLB's local crossbar.
struct OverlayCell
{
    int x = 0;
    int y = 0;
    std::vector<int> spare_slots; // BLE slots without user blocks
    std::vector<int> free_ipins;  // input pins free for debug-time feeds
    std::vector<int> out_ok_slots; // spare slots whose OPIN reaches a free track
};

struct OverlayLink
{
    int src_cell = -1;
    int src_slot = -1;
    int dst_cell = -1;
    int dst_ipin = -1;          // reserved input pin at the destination
    std::vector<NodeId> path;   // OPIN ... IPIN, pre-routed and claimed
};

struct OverlayFabric
{
    std::vector<OverlayCell> cells;
    std::vector<OverlayLink> links;

    std::vector<std::vector<int>> links_from; // cell -> outgoing link ids
    std::vector<std::vector<int>> links_into; // cell -> incoming link ids

    int cell_at(int x, int y) const; // -1 when absent
    std::vector<NodeId> claimed_nodes() const;
    void rebuild_indexes();
};

// Cells from every CLB with spare BLEs; links pre-routed greedily between
// near cells (nearest first) until link_budget outgoing links per cell or
// spare routing exhausts. A zero-cell fabric is valid.
OverlayFabric build_trigger_fabric(const RoutingResourceGraph &rrg, const ResourceMask &mask,
                                   const Netlist &netlist, const Placement &placement,
                                   int link_budget, uint64_t seed);

// Marks link paths OverlayTrigger.
void apply_fabric_to_mask(const OverlayFabric &fabric, ResourceMask &mask);

// Fabric invariants re-derived from scratch: spare slots really spare, link
// paths edge-valid, node-disjoint and clear of User/OverlayTrace nodes.
std::vector<std::string> verify_fabric(const RoutingResourceGraph &rrg, const ResourceMask &mask,
                                       const Netlist &netlist, const Placement &placement,
                                       const OverlayFabric &fabric);

struct SAParams
{
    uint64_t seed = 1;
    double cooling = 0.95;
    int moves_per_le = 100;
    double gamma_indirect = 5.0;  // route-throughs / chained links
    double gamma_blocked = 10000.0; // missing output or input pins
    double exit_t_factor = 0.005;
    int max_temperatures = 300;
    int stall_temperatures = 12; // stop after this many temps without a new best
};

enum class ConnKind : uint8_t { Intra, Link, Indirect, Blocked };

const char *conn_kind_name(ConnKind k);

struct ConnRealization
{
    int net = -1;       // trigger netlist net id
    int driver_le = -1; // trigger block ids
    int sink_le = -1;
    ConnKind kind = ConnKind::Blocked;
    std::vector<int> link_ids;
    std::vector<std::pair<int, int>> route_throughs; // (cell, slot)
    double cost = 0.0;
};

struct FeedRoute
{
    std::string tap;  // user signal (input feeds) or "fire" (output feed)
    int cell = -1;
    int ipin = -1;              // allocated feed pin, -1 for the output feed
    std::vector<NodeId> path;   // full node path including endpoints
    bool ok = false;
};

struct TriggerMapping
{
    std::map<int, std::pair<int, int>> le_slot; // trigger block -> (cell, slot)
    std::vector<ConnRealization> conns;
    std::vector<FeedRoute> input_feeds;
    FeedRoute output_feed;
    double cost = 0.0;
    bool feasible = false;
    std::vector<std::string> blocked_les;
    std::vector<std::pair<int, double>> checkpoints; // (temperature no, best cost)
    double map_time_s = 0.0;
};

// Deterministic cost of a candidate LE placement: connections realized in
// (net, sink) order with exclusive link/route-through claims. This is the
// cost SA reports and the exhaustive oracle minimizes.
double evaluate_trigger_placement(const OverlayFabric &fabric, const TriggerNetlist &trig,
                                  const std::map<int, std::pair<int, int>> &le_slot,
                                  const SAParams &params,
                                  std::vector<ConnRealization> *out_conns = nullptr);

// The annealing stage alone: places LEs and realizes connections, no feed
// routing. Throws CapacityError when the trigger has more LEs than the
// fabric has spare slots.
TriggerMapping anneal_trigger(const OverlayFabric &fabric, const TriggerNetlist &trig,
                              const SAParams &params);

// Simulated annealing over LE placements; feasible results get their input
// and output feeds routed over remaining FREE resources. Throws CapacityError
// when the trigger has more LEs than the fabric has spare slots.
TriggerMapping map_trigger(const RoutingResourceGraph &rrg, const ResourceMask &mask,
                           const OverlayFabric &fabric, const TriggerNetlist &trig,
                           const std::map<std::string, NodeId> &signal_opins,
                           const SAParams &params);

// Independent checker: slot injectivity, connection traceability over links
// and route-throughs, pin availability, LUT fan-in, feed legality and
// non-interference. The mask must reflect user + trace overlay claims only.
std::vector<std::string> verify_mapping(const RoutingResourceGraph &rrg,
                                        const ResourceMask &mask, const OverlayFabric &fabric,
                                        const TriggerNetlist &trig,
                                        const TriggerMapping &mapping);

struct BaselineRecompileResult
{
    bool ok = false;
    double seconds = 0.0;
    double place_cost = 0.0;
    std::string detail;
};

// Comparison baseline: merge the trigger into the user netlist and run the
// full place+route from scratch on the same architecture.
BaselineRecompileResult baseline_recompile_trigger(const Netlist &netlist,
                                                   const TriggerNetlist &trig,
                                                   const ArchSpec &arch, uint64_t seed);

// The merged netlist the baseline compiles (exposed for tests).
Netlist merge_trigger(const Netlist &netlist, const TriggerNetlist &trig);

nlohmann::json fabric_to_json(const OverlayFabric &fabric);
OverlayFabric fabric_from_json(const nlohmann::json &j);
nlohmann::json mapping_to_json(const TriggerNetlist &trig, const TriggerMapping &m);

} // namespace ovdbg
