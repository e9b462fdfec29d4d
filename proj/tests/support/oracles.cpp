#include "oracles.hpp"

#include <functional>

namespace dplk::check {

std::vector<std::vector<int>> candidate_paths(const PlainGraph& g, int s, int t) {
    if (s == t) return {{s}};
    std::vector<std::vector<char>> adj(g.n, std::vector<char>(g.n, 0));
    for (auto [u, v] : g.edges) adj[u][v] = adj[v][u] = 1;
    std::vector<std::vector<int>> out;
    std::vector<int> path{s};
    std::vector<char> used(g.n, 0);
    used[s] = 1;
    std::function<void(int)> walk = [&](int u) {
        for (int w = 0; w < g.n; ++w) {
            if (!adj[u][w] || used[w]) continue;
            path.push_back(w);
            if (w == t) {
                if (path.size() >= 3) out.push_back(path);
            } else {
                used[w] = 1;
                walk(w);
                used[w] = 0;
            }
            path.pop_back();
        }
    };
    walk(s);
    return out;
}

std::vector<std::vector<int>> all_distances(const PlainGraph& g) {
    const int inf = 1 << 20;
    std::vector<std::vector<int>> d(g.n, std::vector<int>(g.n, inf));
    for (int v = 0; v < g.n; ++v) d[v][v] = 0;
    for (auto [u, v] : g.edges) d[u][v] = d[v][u] = 1;
    for (int k = 0; k < g.n; ++k)
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
    for (auto& row : d)
        for (int& x : row)
            if (x == inf) x = -1;
    return d;
}

bool exhaustive_paths(const PlainGraph& g, const std::vector<std::pair<int, int>>& pairs, int radius) {
    for (auto [s, t] : pairs)
        if (s < 0 || t < 0 || s >= g.n || t >= g.n) return false;
    std::vector<std::vector<std::vector<int>>> cands;
    for (auto [s, t] : pairs) cands.push_back(candidate_paths(g, s, t));
    auto dist = all_distances(g);
    auto far = [&](const std::vector<int>& a, const std::vector<int>& b) {
        for (int u : a)
            for (int v : b) {
                if (u == v) return false;
                if (radius >= 0 && dist[u][v] >= 0 && dist[u][v] <= radius) return false;
            }
        return true;
    };
    std::vector<const std::vector<int>*> chosen;
    std::function<bool(size_t)> pick = [&](size_t i) {
        if (i == pairs.size()) return true;
        for (const auto& p : cands[i]) {
            bool ok = true;
            for (const auto* q : chosen)
                if (!far(p, *q)) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            chosen.push_back(&p);
            if (pick(i + 1)) return true;
            chosen.pop_back();
        }
        return false;
    };
    return pick(0);
}

}  // namespace dplk::check
