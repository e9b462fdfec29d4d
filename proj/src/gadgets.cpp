#include "dplk/gadgets.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "dplk/error.hpp"

namespace dplk {

EdgePairing pair_clique_edges(int r) {
    if (r < 1) throw InputError("pairing needs r >= 1");
    int n = 4 * r + 1;
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) edges.push_back({u, v});
    size_t m = edges.size();
    // Perfect matching on the graph of endpoint-disjoint edges, by search
    // that always extends the first unmatched edge.
    std::vector<int> mate(m, -1);
    long long steps = 0;
    std::function<bool(size_t)> rec = [&](size_t from) {
        while (from < m && mate[from] >= 0) ++from;
        if (from == m) return true;
        if (++steps > 10000000) throw GuardError("pairing-search", "r=" + std::to_string(r));
        auto [a, b] = edges[from];
        for (size_t j = from + 1; j < m; ++j) {
            if (mate[j] >= 0) continue;
            auto [c, d] = edges[j];
            if (a == c || a == d || b == c || b == d) continue;
            mate[from] = static_cast<int>(j);
            mate[j] = static_cast<int>(from);
            if (rec(from + 1)) return true;
            mate[from] = mate[j] = -1;
        }
        return false;
    };
    if (!rec(0)) throw DefectError("no edge pairing found for r=" + std::to_string(r));
    EdgePairing out;
    for (size_t i = 0; i < m; ++i)
        if (mate[i] > static_cast<int>(i)) out.push_back({edges[i], edges[mate[i]]});
    return out;
}

std::vector<std::string> check_edge_pairing(int r, const EdgePairing& p) {
    std::vector<std::string> bad;
    int n = 4 * r + 1;
    if (static_cast<int>(p.size()) != n * r)
        bad.push_back("expected " + std::to_string(n * r) + " pairs, got " + std::to_string(p.size()));
    std::set<Edge> seen;
    for (const auto& [e, f] : p) {
        for (Edge x : {e, f}) {
            if (x.first > x.second) std::swap(x.first, x.second);
            if (x.first < 0 || x.second >= n || x.first == x.second)
                bad.push_back("edge " + std::to_string(x.first) + "-" + std::to_string(x.second) + " is not in the clique");
            else if (!seen.insert(x).second)
                bad.push_back("edge " + std::to_string(x.first) + "-" + std::to_string(x.second) + " used twice");
        }
        if (e.first == f.first || e.first == f.second || e.second == f.first || e.second == f.second)
            bad.push_back("pair shares an endpoint at edges " + std::to_string(e.first) + "-" + std::to_string(e.second) +
                          " and " + std::to_string(f.first) + "-" + std::to_string(f.second));
    }
    if (static_cast<int>(seen.size()) != n * (n - 1) / 2) bad.push_back("pairs do not cover every edge");
    return bad;
}

LinkabilityGadget build_linkability_gadget(const PlainGraph& g, int k) {
    if (k < 9 || (k - 1) % 4 != 0) throw InputError("k must be 4r+1 with r >= 2, got " + std::to_string(k));
    LinkabilityGadget out;
    out.k = k;
    out.k_prime = k * (k - 1) / 4 + 1;
    int half = (k - 1) / 2;
    int next = 0;
    out.s_sets.resize(g.n);
    for (int x = 0; x < g.n; ++x)
        for (int i = 0; i < half; ++i) out.s_sets[x].push_back(next++);
    for (int x = 0; x < g.n; ++x) out.w.push_back(next++);
    for (size_t e = 0; e < g.edges.size(); ++e) out.l.push_back(next++);
    ColoredStructure& s = out.structure;
    s.n = next;
    for (int u = 0; u < g.n * half; ++u)
        for (int v = u + 1; v < g.n * half; ++v) s.edges.push_back({u, v});
    for (int x = 0; x < g.n; ++x)
        for (int v : out.s_sets[x]) s.edges.push_back({v, out.w[x]});
    for (size_t e = 0; e < g.edges.size(); ++e) {
        auto [x, y] = g.edges[e];
        for (int z : {x, y})
            for (int v : out.s_sets[z]) s.edges.push_back({v, out.l[e]});
    }
    std::vector<int> r = out.w;
    r.insert(r.end(), out.l.begin(), out.l.end());
    s.annotations.push_back(r);
    s.normalize();
    return out;
}

std::vector<std::string> check_linkability_gadget(const PlainGraph& g, const LinkabilityGadget& gad) {
    std::vector<std::string> bad;
    const auto& s = gad.structure;
    int k = gad.k, half = (k - 1) / 2;
    int m = static_cast<int>(g.edges.size());
    if (s.n != g.n * half + g.n + m) bad.push_back("vertex count " + std::to_string(s.n) + " differs from n(k-1)/2 + n + m");
    long long clique = static_cast<long long>(g.n) * half;
    long long expect_edges = clique * (clique - 1) / 2 + static_cast<long long>(g.n) * half + 2LL * m * half;
    if (static_cast<long long>(s.edges.size()) != expect_edges) bad.push_back("edge count differs from the closed form");
    if (gad.k_prime * 4 != k * (k - 1) + 4) bad.push_back("k' differs from C(k,2)/2 + 1");
    auto adj = s.adjacency();
    for (int x = 0; x < g.n; ++x)
        if (static_cast<int>(adj[gad.w[x]].size()) != half) bad.push_back("w_" + std::to_string(x) + " has wrong degree");
    for (int e = 0; e < m; ++e)
        if (static_cast<int>(adj[gad.l[e]].size()) != k - 1) bad.push_back("edge vertex " + std::to_string(e) + " has degree other than k-1");
    for (int u = 0; u < clique; ++u)
        for (int v = u + 1; v < clique; ++v)
            if (!s.has_edge(u, v)) {
                bad.push_back("S is not a clique");
                u = static_cast<int>(clique);
                break;
            }
    if (s.annotations.size() != 1 || s.annotations[0].size() != static_cast<size_t>(g.n + m))
        bad.push_back("annotation R must hold W and L");
    return bad;
}

GridTilingGadget build_gridtiling_gadget(const GridTilingInstance& inst) {
    int k = inst.k, d = inst.d;
    if (k < 2 || d < 2) throw InputError("grid tiling gadget needs k, D >= 2");
    if (static_cast<int>(inst.cells.size()) != k * k) throw InputError("grid tiling needs k^2 cells");
    GridTilingGadget out;
    int side = k * d;
    out.side = side;
    auto cross = [&](int col, int row) { return row * side + col; };
    int next = side * side;
    ColoredStructure& s = out.structure;
    std::vector<int> o, t;
    for (int v = 0; v < side * side; ++v) {
        o.push_back(v);
        t.push_back(v);
    }
    for (int row = 0; row < side; ++row)
        for (int col = 0; col + 1 < side; ++col) {
            int mid = next++;
            s.edges.push_back({cross(col, row), mid});
            s.edges.push_back({mid, cross(col + 1, row)});
            t.push_back(mid);
        }
    for (int col = 0; col < side; ++col)
        for (int row = 0; row + 1 < side; ++row) {
            int mid = next++;
            s.edges.push_back({cross(col, row), mid});
            s.edges.push_back({mid, cross(col, row + 1)});
            o.push_back(mid);
        }
    s.n = next;
    std::vector<int> b, c;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            for (auto [x, y] : inst.cells[i * k + j]) {
                if (x < 1 || y < 1 || x > d || y > d) throw InputError("grid tiling pair outside [D]^2");
                int v = cross(i * d + x - 1, j * d + y - 1);
                ((i + j) % 2 == 0 ? b : c).push_back(v);
            }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    std::set<int> bs(b.begin(), b.end()), cs(c.begin(), c.end());
    NamedSet only_o{"O", {}}, only_t{"T", {}}, ot{"OT", {}}, otb{"OTB", {}}, otc{"OTC", {}};
    for (int v = 0; v < s.n; ++v) {
        if (v >= side * side) {
            (std::binary_search(o.begin(), o.end(), v) ? only_o : only_t).members.push_back(v);
            continue;
        }
        if (bs.count(v)) otb.members.push_back(v);
        else if (cs.count(v)) otc.members.push_back(v);
        else ot.members.push_back(v);
    }
    s.colors = {only_o, only_t, ot, otb, otc};
    s.normalize();
    std::sort(o.begin(), o.end());
    std::sort(t.begin(), t.end());
    out.b = b;
    out.c = c;
    out.o = o;
    out.t = t;
    out.pattern.n = k * k;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            if (i + 1 < k) out.pattern.edges.push_back({i * k + j, (i + 1) * k + j});
            if (j + 1 < k) out.pattern.edges.push_back({i * k + j, i * k + j + 1});
            out.lambda.push_back((i + j) % 2);
        }
    return out;
}

bool oracle_grid_tiling(const GridTilingInstance& inst) {
    int k = inst.k;
    std::vector<int> first(k, 0), second(k, 0);  // 0 = unset
    std::vector<std::pair<int, int>> pick(k * k);
    std::function<bool(int)> rec = [&](int cell) {
        if (cell == k * k) return true;
        int i = cell / k, j = cell % k;
        for (auto [x, y] : inst.cells[cell]) {
            if ((first[i] && first[i] != x) || (second[j] && second[j] != y)) continue;
            int sf = first[i], ss = second[j];
            first[i] = x;
            second[j] = y;
            if (rec(cell + 1)) return true;
            first[i] = sf;
            second[j] = ss;
        }
        return false;
    };
    return rec(0);
}

bool oracle_mono_path_tm(const PlainGraph& g, const std::vector<std::vector<int>>& classes, const PlainGraph& h,
                         const std::vector<int>& lambda) {
    int n = g.n;
    std::vector<std::vector<int>> adj(n);
    for (auto [u, v] : g.edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    std::vector<std::vector<bool>> in(classes.size(), std::vector<bool>(n, false));
    for (size_t c = 0; c < classes.size(); ++c)
        for (int v : classes[c]) in[c][v] = true;
    std::vector<int> img(h.n, -1);
    std::vector<bool> branch(n, false), used(n, false);
    size_t m = h.edges.size();

    std::function<bool(size_t)> route;
    std::function<bool(size_t, size_t, int)> extend = [&](size_t e, size_t c, int at) {
        int goal = img[h.edges[e].second];
        for (int w : adj[at]) {
            if (!in[c][w]) continue;
            if (w == goal) {
                if (route(e + 1)) return true;
                continue;
            }
            if (branch[w] || used[w]) continue;
            used[w] = true;
            bool ok = extend(e, c, w);
            used[w] = false;
            if (ok) return true;
        }
        return false;
    };
    route = [&](size_t e) {
        if (e == m) return true;
        int a = img[h.edges[e].first], b = img[h.edges[e].second];
        for (size_t c = 0; c < classes.size(); ++c)
            if (in[c][a] && in[c][b] && extend(e, c, a)) return true;
        return false;
    };
    std::function<bool(int)> place = [&](int x) {
        if (x == h.n) return route(0);
        for (int v : classes.at(lambda[x])) {
            if (branch[v]) continue;
            branch[v] = true;
            img[x] = v;
            bool ok = place(x + 1);
            branch[v] = false;
            if (ok) return true;
        }
        return false;
    };
    return place(0);
}

GadgetCheck verify_gadget_iff(const GridTilingInstance& inst) {
    if (inst.k != 2 || inst.d != 2) throw GuardError("gadget-scale", "iff check runs at k=2, D=2 only");
    GadgetCheck out;
    out.tiling = oracle_grid_tiling(inst);
    auto gad = build_gridtiling_gadget(inst);
    PlainGraph g{gad.structure.n, gad.structure.edges};
    // Classes in lambda order: B, C, then the path colors O and T.
    out.minor = oracle_mono_path_tm(g, {gad.b, gad.c, gad.o, gad.t}, gad.pattern, gad.lambda);
    return out;
}

std::string serialize_grid_tiling(const GridTilingInstance& inst) {
    if (inst.k < 1 || inst.cells.size() != static_cast<size_t>(inst.k) * inst.k)
        throw InputError("grid tiling needs k^2 cells");
    std::ostringstream o;
    o << "k " << inst.k << "\nd " << inst.d << "\n";
    for (int i = 0; i < inst.k; ++i)
        for (int j = 0; j < inst.k; ++j) {
            o << "cell " << i + 1 << " " << j + 1;
            for (auto [x, y] : inst.cells[i * inst.k + j]) o << " " << x << "," << y;
            o << "\n";
        }
    return o.str();
}

GridTilingInstance parse_grid_tiling(const std::string& text) {
    GridTilingInstance inst;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        auto fail = [&](const std::string& why) {
            throw InputError("grid tiling line " + std::to_string(line_no) + ": " + why);
        };
        if (kw == "k" || kw == "d") {
            int v;
            if (!(ls >> v) || v < 1) fail("expected a positive integer");
            (kw == "k" ? inst.k : inst.d) = v;
            if (kw == "k") inst.cells.assign(v * v, {});
        } else if (kw == "cell") {
            int i, j;
            if (!inst.k) fail("cell before k");
            if (!(ls >> i >> j) || i < 1 || j < 1 || i > inst.k || j > inst.k) fail("bad cell index");
            std::string tok;
            while (ls >> tok) {
                int x, y;
                char comma;
                std::istringstream ts(tok);
                if (!(ts >> x >> comma >> y) || comma != ',') fail("bad pair '" + tok + "'");
                if (x < 1 || y < 1 || (inst.d && (x > inst.d || y > inst.d))) fail("pair outside [D]^2");
                inst.cells[(i - 1) * inst.k + j - 1].push_back({x, y});
            }
        } else {
            fail("unknown keyword '" + kw + "'");
        }
    }
    if (!inst.k || !inst.d) throw InputError("grid tiling needs k and d");
    for (auto& c : inst.cells) {
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
    }
    return inst;
}

}  // namespace dplk
