#include "dplk/paths.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "dplk/error.hpp"

namespace dplk {

DpSolver::DpSolver(const ColoredStructure& s) : n_(s.n), adj_(s.adjacency()) { init(); }

DpSolver::DpSolver(const PlainGraph& g) : n_(g.n), adj_(g.n) {
    for (auto [u, v] : g.edges) {
        adj_[u].push_back(v);
        adj_[v].push_back(u);
    }
    for (auto& a : adj_) std::sort(a.begin(), a.end());
    init();
}

void DpSolver::init() {}

int DpSolver::distance(int u, int v) const {
    if (dist_.empty()) {
        dist_.assign(n_, std::vector<int>(n_, -1));
        for (int s = 0; s < n_; ++s) {
            auto& d = dist_[s];
            std::deque<int> q{s};
            d[s] = 0;
            while (!q.empty()) {
                int x = q.front();
                q.pop_front();
                for (int y : adj_[x])
                    if (d[y] < 0) {
                        d[y] = d[x] + 1;
                        q.push_back(y);
                    }
            }
        }
    }
    int d = dist_[u][v];
    return d < 0 ? 1 << 29 : d;
}

namespace {

struct Search {
    const DpSolver& g;
    int radius;
    std::vector<VertexPair> todo;     // distinct-endpoint pairs, ordered
    std::vector<char> used;           // vertices on placed paths
    std::vector<int> owner;           // path index owning a vertex, -1 if free
    std::vector<int> reserved;        // pair index whose terminal sits here, -1 if none
    std::vector<std::vector<int>> paths;
    std::vector<int> trivial_vertices;

    // A vertex may join path p if it is far enough from every vertex of
    // other paths and other pairs' terminals.
    bool far_enough(int x, int p) const {
        if (radius <= 0) return true;
        for (int y = 0; y < g.n(); ++y) {
            int o = owner[y];
            int rsv = reserved[y];
            bool other = (o >= 0 && o != p) || (rsv >= 0 && rsv != p);
            if (other && g.distance(x, y) <= radius) return false;
        }
        return true;
    }

    bool free_for(int x, int p) const {
        if (used[x]) return false;
        if (reserved[x] >= 0 && reserved[x] != p) return false;
        return far_enough(x, p);
    }

    bool connected_rest(size_t from) const {
        for (size_t p = from; p < todo.size(); ++p) {
            auto [s, t] = todo[p];
            std::vector<char> seen(g.n(), 0);
            std::vector<int> st{s};
            seen[s] = 1;
            bool ok = false;
            while (!st.empty() && !ok) {
                int x = st.back();
                st.pop_back();
                for (int y : g.adj()[x]) {
                    if (seen[y]) continue;
                    if (y == t) {
                        ok = true;
                        break;
                    }
                    if (used[y] || (reserved[y] >= 0 && reserved[y] != static_cast<int>(p))) continue;
                    seen[y] = 1;
                    st.push_back(y);
                }
            }
            if (!ok) return false;
        }
        return true;
    }

    bool place(size_t p) {
        if (p == todo.size()) return true;
        if (!connected_rest(p)) return false;
        auto [s, t] = todo[p];
        int pi = static_cast<int>(p);
        paths[p] = {s};
        used[s] = 1;
        owner[s] = pi;
        bool ok = extend(p, s, t);
        if (!ok) {
            used[s] = 0;
            owner[s] = -1;
            paths[p].clear();
        }
        return ok;
    }

    bool extend(size_t p, int cur, int t) {
        int pi = static_cast<int>(p);
        for (int w : g.adj()[cur]) {
            if (w == t) {
                if (paths[p].size() < 2) continue;
                paths[p].push_back(t);
                used[t] = 1;
                owner[t] = pi;
                if (place(p + 1)) return true;
                used[t] = 0;
                owner[t] = -1;
                paths[p].pop_back();
                continue;
            }
            if (!free_for(w, pi)) continue;
            used[w] = 1;
            owner[w] = pi;
            paths[p].push_back(w);
            if (extend(p, w, t)) return true;
            paths[p].pop_back();
            used[w] = 0;
            owner[w] = -1;
        }
        return false;
    }
};

}  // namespace

bool DpSolver::search(int radius, const std::vector<VertexPair>& pairs, std::vector<std::vector<int>>* out) const {
    std::vector<int> count(n_, 0);
    for (auto [s, t] : pairs) {
        if (s == BOT || t == BOT) return false;
        if (s < 0 || t < 0 || s >= n_ || t >= n_) throw InputError("dp argument out of range");
        ++count[s];
        if (t != s) ++count[t];
    }
    for (int c : count)
        if (c > 1) return false;
    Search S{*this, radius, {}, std::vector<char>(n_, 0), std::vector<int>(n_, -1), std::vector<int>(n_, -1), {}, {}};
    std::vector<std::pair<int, VertexPair>> order;
    std::vector<int> trivial;
    for (auto [s, t] : pairs) {
        if (s == t)
            trivial.push_back(s);
        else
            order.push_back({static_cast<int>(adj_[s].size() + adj_[t].size()), {s, t}});
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    int np = static_cast<int>(order.size());
    for (int i = 0; i < np; ++i) {
        S.todo.push_back(order[i].second);
        S.reserved[order[i].second.first] = i;
        S.reserved[order[i].second.second] = i;
    }
    // Trivial paths occupy their vertex and act as paths of their own.
    for (size_t j = 0; j < trivial.size(); ++j) {
        int v = trivial[j];
        S.used[v] = 1;
        S.owner[v] = np + static_cast<int>(j);
    }
    if (radius > 0) {
        std::vector<std::pair<int, int>> marks;
        for (int v = 0; v < n_; ++v) {
            int a = S.owner[v] >= 0 ? S.owner[v] : S.reserved[v];
            if (a >= 0) marks.push_back({v, a});
        }
        for (size_t i = 0; i < marks.size(); ++i)
            for (size_t j = i + 1; j < marks.size(); ++j)
                if (marks[i].second != marks[j].second && distance(marks[i].first, marks[j].first) <= radius)
                    return false;
    }
    S.paths.assign(np, {});
    bool ok = S.place(0);
    if (ok && out) {
        *out = S.paths;
        for (int v : trivial) out->push_back({v});
    }
    return ok;
}

bool DpSolver::dp(const std::vector<VertexPair>& pairs) const { return search(0, pairs, nullptr); }

bool DpSolver::sdp(int radius, const std::vector<VertexPair>& pairs) const {
    if (radius < 0) throw InputError("sdp radius must be non-negative");
    return search(radius, pairs, nullptr);
}

bool DpSolver::dp_witness(const std::vector<VertexPair>& pairs, std::vector<std::vector<int>>& paths) const {
    return search(0, pairs, &paths);
}

bool eval_dp(const ColoredStructure& s, const std::vector<VertexPair>& pairs) { return DpSolver(s).dp(pairs); }

bool eval_sdp(const ColoredStructure& s, int radius, const std::vector<VertexPair>& pairs) {
    return DpSolver(s).sdp(radius, pairs);
}

IndexGraph lift_linkage(const std::vector<int>& boundary, const std::vector<IndexPair>& m) {
    std::set<IndexPair> want;
    for (auto [u, w] : m) want.insert({std::min(u, w), std::max(u, w)});
    IndexGraph out;
    int r = static_cast<int>(boundary.size());
    for (int i = 0; i < r; ++i) {
        if (boundary[i] == BOT) continue;
        for (int j = i; j < r; ++j) {
            if (boundary[j] == BOT) continue;
            int a = std::min(boundary[i], boundary[j]), b = std::max(boundary[i], boundary[j]);
            if (want.count({a, b})) out.push_back({i, j});
        }
    }
    return out;
}

std::string pattern_to_string(const Pattern& p) {
    if (p.empty) return "EMPTY";
    std::ostringstream o;
    auto pairs = [&](const std::vector<IndexPair>& v) {
        o << "{";
        for (size_t i = 0; i < v.size(); ++i) o << (i ? "," : "") << "(" << v[i].first + 1 << "," << v[i].second + 1 << ")";
        o << "}";
    };
    o << "V={";
    for (size_t i = 0; i < p.parts.size(); ++i) {
        o << (i ? "," : "") << "{";
        for (size_t j = 0; j < p.parts[i].size(); ++j) o << (j ? "," : "") << p.parts[i][j] + 1;
        o << "}";
    }
    o << "} kappa=";
    pairs(p.kappa);
    o << " delta=";
    pairs(p.delta);
    o << " He=";
    pairs(p.he);
    o << " HP={";
    for (size_t i = 0; i < p.hp.size(); ++i) {
        o << (i ? "," : "");
        pairs(p.hp[i]);
    }
    o << "}";
    return o.str();
}

Pattern boundary_skeleton(const BoundariedColoredGraph& g) {
    Pattern p;
    p.r = static_cast<int>(g.boundary.size());
    const auto& b = g.boundary;
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < p.r; ++i) {
        if (b[i] == BOT) continue;
        if (b[i] < 0 || b[i] >= g.base.n) throw InputError("boundary entry out of range");
        groups[b[i]].push_back(i);
    }
    for (auto& [v, idx] : groups) p.parts.push_back(idx);
    std::sort(p.parts.begin(), p.parts.end());
    for (int i = 0; i < p.r; ++i) {
        if (b[i] == BOT) continue;
        for (size_t j = 0; j < g.apex.size(); ++j)
            if (g.apex[j] == b[i]) p.kappa.push_back({i, static_cast<int>(j)});
        int pos = 0;
        for (const auto* list : {&g.base.colors, &g.base.pcolors})
            for (const auto& c : *list) {
                if (std::binary_search(c.members.begin(), c.members.end(), b[i])) p.delta.push_back({i, pos});
                ++pos;
            }
        for (int j = i + 1; j < p.r; ++j)
            if (b[j] != BOT && g.base.has_edge(b[i], b[j])) p.he.push_back({i, j});
    }
    return p;
}

namespace {

struct PairingEnum {
    const std::vector<std::vector<int>>& adj;
    const PairingOptions& opt;
    std::vector<int> terminals;  // distinct boundary vertices, ascending
    std::vector<char> used;
    std::vector<char> is_endpoint;
    std::vector<std::vector<int>> current;
    std::vector<int> boundary;
    std::vector<Pairing> out;

    void record() {
        Pairing p;
        p.boundary = boundary;
        p.paths = current;
        for (auto& path : p.paths)
            if (path.front() > path.back()) std::reverse(path.begin(), path.end());
        std::sort(p.paths.begin(), p.paths.end());
        out.push_back(std::move(p));
    }

    void step(size_t k) {
        if (k == terminals.size()) {
            record();
            return;
        }
        int u = terminals[k];
        step(k + 1);  // u is not the smaller end of any path
        if (used[u]) return;
        if (opt.trivial_paths) {
            used[u] = 1;
            current.push_back({u});
            step(k + 1);
            current.pop_back();
            used[u] = 0;
        }
        used[u] = 1;
        is_endpoint[u] = 1;
        std::vector<int> path{u};
        for (size_t j = k + 1; j < terminals.size(); ++j) {
            int w = terminals[j];
            if (used[w]) continue;
            walk(k, path, w);
        }
        is_endpoint[u] = 0;
        used[u] = 0;
    }

    void walk(size_t k, std::vector<int>& path, int target) {
        int cur = path.back();
        for (int w : adj[cur]) {
            if (w == target) {
                int len = static_cast<int>(path.size());
                if (len < opt.min_length) continue;
                path.push_back(w);
                used[w] = 1;
                current.push_back(path);
                step(k + 1);
                current.pop_back();
                used[w] = 0;
                path.pop_back();
                continue;
            }
            if (used[w]) continue;
            used[w] = 1;
            path.push_back(w);
            walk(k, path, target);
            path.pop_back();
            used[w] = 0;
        }
    }
};

}  // namespace

std::vector<Pairing> enumerate_pairings(const BoundariedColoredGraph& g, const PairingOptions& opt) {
    if (g.base.n > opt.max_n)
        throw GuardError("pairing-enumeration", "n = " + std::to_string(g.base.n) + " > max_n = " + std::to_string(opt.max_n));
    if (opt.min_length != 1 && opt.min_length != 2) throw InputError("min_length must be 1 or 2");
    auto adj = g.base.adjacency();
    PairingEnum e{adj, opt, {}, std::vector<char>(g.base.n, 0), std::vector<char>(g.base.n, 0), {}, g.boundary, {}};
    for (int v : g.boundary) {
        if (v == BOT) continue;
        if (v < 0 || v >= g.base.n) throw InputError("boundary entry out of range");
        e.terminals.push_back(v);
    }
    std::sort(e.terminals.begin(), e.terminals.end());
    e.terminals.erase(std::unique(e.terminals.begin(), e.terminals.end()), e.terminals.end());
    e.step(0);
    std::sort(e.out.begin(), e.out.end());
    e.out.erase(std::unique(e.out.begin(), e.out.end()), e.out.end());
    return e.out;
}

IndexGraph imprint(const Pairing& p) {
    std::vector<IndexPair> m;
    for (const auto& path : p.paths) m.push_back({path.front(), path.back()});
    return lift_linkage(p.boundary, m);
}

Pattern compression(const BoundariedColoredGraph& g, int max_n) {
    Pattern p = boundary_skeleton(g);
    PairingOptions opt;
    opt.min_length = 2;
    opt.trivial_paths = true;
    opt.max_n = max_n;
    std::set<IndexGraph> hp;
    hp.insert(IndexGraph{});
    for (const auto& L : enumerate_pairings(g, opt)) {
        bool nontrivial = false;
        for (const auto& path : L.paths)
            if (path.size() > 1) nontrivial = true;
        if (!nontrivial) continue;
        hp.insert(imprint(L));
    }
    p.hp.assign(hp.begin(), hp.end());
    return p;
}

Pairing glue_pairings(const Pairing& p1, const Pairing& p2, int shared) {
    int total = static_cast<int>(p1.boundary.size());
    if (static_cast<int>(p2.boundary.size()) != total) throw InputError("incompatible: boundary lengths differ");
    if (shared < 0 || shared > total) throw InputError("incompatible: shared suffix length out of range");
    int r = total - shared;
    auto terminals = [](const Pairing& p) {
        std::set<int> t;
        for (const auto& path : p.paths) {
            t.insert(path.front());
            t.insert(path.back());
        }
        return t;
    };
    auto t1 = terminals(p1), t2 = terminals(p2);
    for (int i = r; i < total; ++i) {
        if (p1.boundary[i] == BOT || !t1.count(p1.boundary[i]))
            throw InputError("incompatible: shared entry " + std::to_string(i + 1) + " is not a terminal of the first pairing");
        if (p2.boundary[i] == BOT || !t2.count(p2.boundary[i]))
            throw InputError("incompatible: shared entry " + std::to_string(i + 1) + " is not a terminal of the second pairing");
    }
    for (int i = 0; i < r; ++i)
        if ((p1.boundary[i] == BOT) == (p2.boundary[i] == BOT))
            throw InputError("incompatible: complementarity violated at entry " + std::to_string(i + 1));
    auto suffix_edges = [&](const Pairing& p) {
        std::set<IndexPair> s;
        for (auto e : imprint(p))
            if (e.first >= r && e.second >= r) s.insert(e);
        return s;
    };
    auto e1 = suffix_edges(p1), e2 = suffix_edges(p2);
    for (auto e : e1)
        if (e2.count(e))
            throw InputError("incompatible: shared pair (" + std::to_string(e.first + 1) + "," +
                             std::to_string(e.second + 1) + ") linked on both sides");
    // New ids: first-side vertices keep their ids, second-side vertices are
    // shifted past them, except shared entries which map onto the first side.
    int off = 0;
    for (const auto& path : p1.paths)
        for (int v : path) off = std::max(off, v + 1);
    for (int v : p1.boundary)
        if (v != BOT) off = std::max(off, v + 1);
    std::map<int, int> map2;
    for (int i = r; i < total; ++i) {
        auto [it, fresh] = map2.emplace(p2.boundary[i], p1.boundary[i]);
        if (!fresh && it->second != p1.boundary[i])
            throw InputError("incompatible: shared entries identify inconsistently");
    }
    auto id2 = [&](int v) {
        auto it = map2.find(v);
        return it != map2.end() ? it->second : v + off;
    };
    std::map<int, std::vector<int>> nbr;
    std::set<int> verts;
    auto add_path = [&](const std::vector<int>& path, bool second) {
        for (size_t i = 0; i < path.size(); ++i) {
            int v = second ? id2(path[i]) : path[i];
            verts.insert(v);
            if (i > 0) {
                int u = second ? id2(path[i - 1]) : path[i - 1];
                nbr[u].push_back(v);
                nbr[v].push_back(u);
            }
        }
    };
    for (const auto& path : p1.paths) add_path(path, false);
    for (const auto& path : p2.paths) add_path(path, true);
    Pairing out;
    std::set<int> seen;
    for (int v : verts) {
        if (seen.count(v)) continue;
        // collect component
        std::vector<int> comp;
        std::vector<int> st{v};
        seen.insert(v);
        while (!st.empty()) {
            int x = st.back();
            st.pop_back();
            comp.push_back(x);
            for (int y : nbr[x])
                if (!seen.count(y)) {
                    seen.insert(y);
                    st.push_back(y);
                }
        }
        size_t edges = 0;
        int start = -1;
        for (int x : comp) {
            std::set<int> uniq(nbr[x].begin(), nbr[x].end());
            if (uniq.size() != nbr[x].size() || nbr[x].size() > 2)
                throw InputError("incompatible: glued linkage is not a union of paths");
            edges += nbr[x].size();
            if (nbr[x].size() <= 1 && (start < 0 || x < start)) start = x;
        }
        edges /= 2;
        if (edges + 1 != comp.size()) throw InputError("incompatible: gluing closes a cycle");
        std::vector<int> path{start};
        int prev = -1, cur = start;
        while (true) {
            int next = -1;
            for (int y : nbr[cur])
                if (y != prev) next = y;
            if (next < 0) break;
            path.push_back(next);
            prev = cur;
            cur = next;
        }
        if (path.front() > path.back()) std::reverse(path.begin(), path.end());
        out.paths.push_back(path);
    }
    std::sort(out.paths.begin(), out.paths.end());
    for (int i = 0; i < r; ++i) out.boundary.push_back(p1.boundary[i] != BOT ? p1.boundary[i] : id2(p2.boundary[i]));
    return out;
}

}  // namespace dplk
