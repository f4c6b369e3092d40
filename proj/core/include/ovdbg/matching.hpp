#pragma once

#include <vector>

namespace ovdbg {

struct BipartiteGraph
{
    int n_left = 0;
    int n_right = 0;
    std::vector<std::vector<int>> adj; // left vertex -> right vertices, sorted
};

// Hopcroft-Karp maximum matching. Left vertices are processed in index
// order and adjacency lists scanned as given, so results are deterministic;
// with sorted adjacency this prefers smaller right ids. Returns per-left
// matched right vertex or -1.
std::vector<int> hopcroft_karp(const BipartiteGraph &g);

// Maximum-matching certificate: no augmenting path from any unmatched left
// vertex. Polynomial, independent of the matcher above.
bool matching_is_maximum(const BipartiteGraph &g, const std::vector<int> &match_left);

} // namespace ovdbg
