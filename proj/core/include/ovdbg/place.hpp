#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ovdbg/arch.hpp"
#include "ovdbg/netlist.hpp"

namespace ovdbg {

enum class SlotKind : uint8_t { Ble, Pad };

struct SlotRef
{
    int16_t x = -1;
    int16_t y = -1;
    int16_t slot = -1;
    SlotKind kind = SlotKind::Ble;

    bool valid() const { return x >= 0; }
    bool operator==(const SlotRef &) const = default;
};

struct Placement
{
    std::vector<SlotRef> block_slot; // indexed by block id
};

class CapacityError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct PlaceOptions
{
    double inner_num = 1.0;      // moves per temperature = inner_num * blocks^(4/3)
    double target_accept = 0.44; // range limiter goal
    double exit_t_factor = 0.005;
    int max_temperatures = 256;
};

// VPR-style adaptive simulated annealing over bounding-box wirelength.
// Deterministic in seed; the returned placement is the best one visited.
// Throws CapacityError when the netlist cannot fit the architecture.
Placement place(const Netlist &netlist, const ArchSpec &arch, uint64_t seed,
                const PlaceOptions &opts = {});

// Total half-perimeter wirelength over all nets.
double placement_cost(const Netlist &netlist, const Placement &p);

// Empty result means the placement is legal for the netlist/arch pair.
std::vector<std::string> verify_placement(const Netlist &netlist, const ArchSpec &arch,
                                          const Placement &p);

nlohmann::json placement_to_json(const Netlist &netlist, const Placement &p);
Placement placement_from_json(const Netlist &netlist, const nlohmann::json &j);

} // namespace ovdbg
