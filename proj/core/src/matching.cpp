#include "ovdbg/matching.hpp"

#include <limits>
#include <queue>

namespace ovdbg {

namespace {

constexpr int kInf = std::numeric_limits<int>::max();

struct Hk
{
    const BipartiteGraph &g;
    std::vector<int> match_l, match_r, dist;

    explicit Hk(const BipartiteGraph &graph)
        : g(graph), match_l(graph.n_left, -1), match_r(graph.n_right, -1),
          dist(graph.n_left, kInf)
    {
    }

    bool bfs()
    {
        std::queue<int> q;
        for (int u = 0; u < g.n_left; ++u) {
            if (match_l[u] < 0) {
                dist[u] = 0;
                q.push(u);
            } else {
                dist[u] = kInf;
            }
        }
        bool reachable_free = false;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : g.adj[u]) {
                int w = match_r[v];
                if (w < 0) {
                    reachable_free = true;
                } else if (dist[w] == kInf) {
                    dist[w] = dist[u] + 1;
                    q.push(w);
                }
            }
        }
        return reachable_free;
    }

    bool dfs(int u)
    {
        for (int v : g.adj[u]) {
            int w = match_r[v];
            if (w < 0 || (dist[w] == dist[u] + 1 && dfs(w))) {
                match_l[u] = v;
                match_r[v] = u;
                return true;
            }
        }
        dist[u] = kInf;
        return false;
    }

    std::vector<int> run()
    {
        while (bfs())
            for (int u = 0; u < g.n_left; ++u)
                if (match_l[u] < 0)
                    dfs(u);
        return match_l;
    }
};

} // namespace

std::vector<int> hopcroft_karp(const BipartiteGraph &g)
{
    return Hk(g).run();
}

bool matching_is_maximum(const BipartiteGraph &g, const std::vector<int> &match_left)
{
    std::vector<int> match_r(g.n_right, -1);
    for (int u = 0; u < g.n_left; ++u)
        if (match_left[u] >= 0)
            match_r[match_left[u]] = u;

    // alternating BFS from every unmatched left vertex
    for (int start = 0; start < g.n_left; ++start) {
        if (match_left[start] >= 0)
            continue;
        std::vector<char> seen_l(g.n_left, 0), seen_r(g.n_right, 0);
        std::queue<int> q;
        q.push(start);
        seen_l[start] = 1;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : g.adj[u]) {
                if (seen_r[v])
                    continue;
                seen_r[v] = 1;
                int w = match_r[v];
                if (w < 0)
                    return false; // augmenting path exists
                if (!seen_l[w]) {
                    seen_l[w] = 1;
                    q.push(w);
                }
            }
        }
    }
    return true;
}

} // namespace ovdbg
