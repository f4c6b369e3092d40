#pragma once

#include <cstdint>

#include "ovdbg/netlist.hpp"

namespace ovdbg {

// Random technology-mapped benchmark: n_luts LUTs (fan-in <= max_k), FFs at
// ~25% of the LUT count, external pin count scaling with n_luts^rent_p.
// Deterministic in seed; the result is connected and parses back from its
// own BLIF emission.
Netlist gen_synthetic(uint64_t seed, int n_luts, double rent_p, int max_k = 4);

// Small trigger circuit over the given user signals: a LUT reduction chain
// with the occasional latch, single output "fire".
TriggerNetlist gen_trigger(uint64_t seed, int n_les, const std::vector<std::string> &signals,
                           int max_k = 4);

} // namespace ovdbg
