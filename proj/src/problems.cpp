#include "dplk/problems.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>
#include <set>

#include <json.hpp>

#include "dplk/apex.hpp"
#include "dplk/error.hpp"
#include "dplk/paths.hpp"
#include "dplk/semantics.hpp"

namespace dplk {

namespace {

const std::vector<std::pair<ProblemKind, std::string>>& kind_table() {
    static const std::vector<std::pair<ProblemKind, std::string>> t = {
        {ProblemKind::DisjointPaths, "disjoint-paths"},
        {ProblemKind::Minor, "minor"},
        {ProblemKind::TopologicalMinor, "topological-minor"},
        {ProblemKind::UnorderedLinkability, "unordered-linkability"},
        {ProblemKind::OrderedLinkability, "ordered-linkability"},
        {ProblemKind::Deletion, "deletion"},
        {ProblemKind::Amalgamation, "amalgamation"},
        {ProblemKind::Replacement, "replacement"},
        {ProblemKind::Reconfiguration, "reconfiguration"},
    };
    return t;
}

void check_graph(const PlainGraph& g, const std::string& what) {
    if (g.n < 0) throw InputError(what + ": negative vertex count");
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : g.edges) {
        if (u < 0 || v < 0 || u >= g.n || v >= g.n) throw InputError(what + ": edge endpoint out of range");
        if (u == v) throw InputError(what + ": self-loop at " + std::to_string(u));
        if (!seen.insert({std::min(u, v), std::max(u, v)}).second) throw InputError(what + ": repeated edge");
    }
}

void check_vertices(const std::vector<int>& vs, int n, const std::string& what, bool distinct) {
    std::set<int> seen;
    for (int v : vs) {
        if (v < 0 || v >= n) throw InputError(what + ": vertex " + std::to_string(v) + " out of range");
        if (distinct && !seen.insert(v).second) throw InputError(what + ": repeated vertex " + std::to_string(v));
    }
}

int max_degree(const PlainGraph& g) {
    std::vector<int> d(g.n, 0);
    for (auto [u, v] : g.edges) ++d[u], ++d[v];
    return g.n ? *std::max_element(d.begin(), d.end()) : 0;
}

bool is_perfect_matching(const PlainGraph& h) {
    std::vector<int> d(h.n, 0);
    for (auto [u, v] : h.edges) ++d[u], ++d[v];
    return std::all_of(d.begin(), d.end(), [](int x) { return x == 1; });
}

std::vector<std::vector<int>> adjacency_of(const PlainGraph& g) {
    std::vector<std::vector<int>> adj(g.n);
    for (auto [u, v] : g.edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
}

// Requires the sentence to talk about the bare graph, optionally with the
// listed colors.
void require_graph_sentence(const F& phi, const std::vector<std::string>& colors, const std::string& kind) {
    if (!phi) throw InputError(kind + ": missing inner sentence");
    if (!free_vars(phi).empty()) throw InputError(kind + ": inner formula must be a sentence");
    Vocabulary v;
    v.colors = colors;
    check_vocabulary(phi, v);
}

void charge(long long& used, long long amount, long long budget, const std::string& guard) {
    used += amount;
    if (used > budget)
        throw GuardError(guard, "search exceeds " + std::to_string(budget) + " steps");
}

}  // namespace

std::string kind_name(ProblemKind k) {
    for (const auto& [kk, n] : kind_table())
        if (kk == k) return n;
    throw DefectError("unknown problem kind");
}

ProblemKind parse_kind(const std::string& name) {
    for (const auto& [k, n] : kind_table())
        if (n == name) return k;
    throw InputError("unknown problem kind '" + name + "'");
}

const std::vector<ProblemKind>& all_kinds() {
    static const std::vector<ProblemKind> v = [] {
        std::vector<ProblemKind> out;
        for (const auto& [k, n] : kind_table()) out.push_back(k);
        return out;
    }();
    return v;
}

// ---------------------------------------------------------------- actions

int numbered_pair_index(int k, int i, int j) {
    if (i > j) std::swap(i, j);
    int idx = 0;
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
            if (a == i && b == j) return idx;
            ++idx;
        }
    throw InputError("pair " + std::to_string(i + 1) + "-" + std::to_string(j + 1) + " outside [" + std::to_string(k) + "]");
}

NumberedGraph numbered_graph_of(int k, const std::vector<std::pair<int, int>>& edges) {
    NumberedGraph g = 0;
    for (auto [i, j] : edges) {
        if (i == j) throw InputError("self-loop in numbered graph");
        g |= 1u << numbered_pair_index(k, i, j);
    }
    return g;
}

std::string numbered_graph_to_string(int k, NumberedGraph g) {
    std::string out = "{";
    int idx = 0;
    bool first = true;
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b, ++idx)
            if (g >> idx & 1u) {
                if (!first) out += ",";
                first = false;
                out += std::to_string(a + 1) + "-" + std::to_string(b + 1);
            }
    return out + "}";
}

ReplacementAction builtin_action(const std::string& name, int k) {
    if (k < 1 || k > 4) throw InputError("replacement actions need 1 <= k <= 4");
    int pairs = k * (k - 1) / 2;
    NumberedGraph full = (1u << pairs) - 1;
    ReplacementAction a;
    a.k = k;
    for (NumberedGraph g = 0; g <= full; ++g) {
        if (name == "identity") a.table.push_back(g);
        else if (name == "complement") a.table.push_back(full & ~g);
        else if (name == "delete-all") a.table.push_back(0);
        else if (name == "clique") a.table.push_back(full);
        else throw InputError("unknown builtin action '" + name + "'");
    }
    return a;
}

namespace {

NumberedGraph parse_numbered(int k, std::string text) {
    text.erase(std::remove_if(text.begin(), text.end(), ::isspace), text.end());
    if (text.size() < 2 || text.front() != '{' || text.back() != '}')
        throw InputError("numbered graph must be written {i-j,...}: '" + text + "'");
    text = text.substr(1, text.size() - 2);
    std::vector<std::pair<int, int>> edges;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t comma = text.find(',', pos);
        std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        size_t dash = item.find('-');
        if (dash == std::string::npos) throw InputError("bad edge '" + item + "' in numbered graph");
        try {
            int i = std::stoi(item.substr(0, dash)), j = std::stoi(item.substr(dash + 1));
            if (i < 1 || j < 1 || i > k || j > k) throw InputError("edge '" + item + "' outside [" + std::to_string(k) + "]");
            edges.push_back({i - 1, j - 1});
        } catch (const std::logic_error&) {
            throw InputError("bad edge '" + item + "' in numbered graph");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return numbered_graph_of(k, edges);
}

}  // namespace

ReplacementAction parse_action(const std::string& text) {
    ReplacementAction a;
    std::vector<bool> given;
    size_t start = 0;
    int line_no = 0;
    while (start <= text.size()) {
        size_t nl = text.find('\n', start);
        std::string line = text.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
        start = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (a.k == 0) {
            int k = 0;
            char buf[8] = {0};
            if (std::sscanf(line.c_str(), " %1s %d", buf, &k) != 2 || buf[0] != 'k')
                throw InputError("action line " + std::to_string(line_no) + ": expected 'k K'");
            a = builtin_action("identity", k);
            given.assign(a.table.size(), false);
            continue;
        }
        size_t arrow = line.find("->");
        if (arrow == std::string::npos) throw InputError("action line " + std::to_string(line_no) + ": expected '->'");
        NumberedGraph from = parse_numbered(a.k, line.substr(0, arrow));
        NumberedGraph to = parse_numbered(a.k, line.substr(arrow + 2));
        if (given[from]) throw InputError("action line " + std::to_string(line_no) + ": source graph listed twice");
        given[from] = true;
        a.table[from] = to;
    }
    if (a.k == 0) throw InputError("empty action");
    return a;
}

std::string serialize_action(const ReplacementAction& a) {
    std::string out = "k " + std::to_string(a.k) + "\n";
    for (size_t g = 0; g < a.table.size(); ++g)
        out += numbered_graph_to_string(a.k, static_cast<NumberedGraph>(g)) + " -> " +
               numbered_graph_to_string(a.k, a.table[g]) + "\n";
    return out;
}

// ---------------------------------------------------------------- instances

void validate_instance(const ProblemInstance& inst) {
    const std::string kn = kind_name(inst.kind);
    check_graph(inst.host, kn + " host");
    if (inst.radius < 0) throw InputError(kn + ": negative radius");
    switch (inst.kind) {
        case ProblemKind::DisjointPaths:
            if (inst.terminals.empty()) throw InputError(kn + ": no terminal pairs");
            for (auto [s, t] : inst.terminals) check_vertices({s, t}, inst.host.n, kn + " terminals", false);
            break;
        case ProblemKind::Minor:
        case ProblemKind::TopologicalMinor:
            check_graph(inst.pattern, kn + " pattern");
            if (inst.induced) throw InputError(kn + ": induced variant not supported");
            break;
        case ProblemKind::UnorderedLinkability:
        case ProblemKind::OrderedLinkability:
            check_graph(inst.pattern, kn + " pattern");
            check_vertices(inst.roots, inst.host.n, kn + " roots", true);
            if (inst.induced && !is_perfect_matching(inst.pattern))
                throw InputError(kn + ": induced variant needs a perfect matching pattern");
            break;
        case ProblemKind::Deletion:
            if (inst.k < 0) throw InputError(kn + ": negative k");
            if (inst.k >= inst.host.n) throw InputError(kn + ": k must leave at least one vertex");
            if (inst.induced) throw InputError(kn + ": induced variant not supported");
            require_graph_sentence(inst.phi, {}, kn);
            if (has_op(inst.phi, Op::Sdp)) throw InputError(kn + ": sdp atoms are not supported");
            break;
        case ProblemKind::Amalgamation:
            check_graph(inst.host2, kn + " second host");
            if (inst.k < 0) throw InputError(kn + ": negative k");
            require_graph_sentence(inst.phi, {}, kn);
            if (has_op(inst.phi, Op::Sdp)) throw InputError(kn + ": sdp atoms are not supported");
            break;
        case ProblemKind::Replacement:
            if (inst.k < 1) throw InputError(kn + ": k must be positive");
            if (inst.action.k != inst.k) throw InputError(kn + ": action is not defined on " + std::to_string(inst.k) + "-numbered graphs");
            if (inst.action.table.size() != (1u << (inst.k * (inst.k - 1) / 2)))
                throw InputError(kn + ": action table is not total");
            require_graph_sentence(inst.phi, {}, kn);
            if (has_op(inst.phi, Op::Sdp)) throw InputError(kn + ": sdp atoms are not supported");
            break;
        case ProblemKind::Reconfiguration:
            check_vertices(inst.source, inst.host.n, kn + " S", true);
            check_vertices(inst.target, inst.host.n, kn + " T", true);
            if (inst.length < 0) throw InputError(kn + ": negative length");
            require_graph_sentence(inst.phi, {"S"}, kn);
            break;
    }
}

namespace {

PlainGraph graph_from_json(const nlohmann::json& j, const std::string& what) {
    PlainGraph g;
    if (!j.is_object()) throw InputError(what + " must be an object with n and edges");
    g.n = j.value("n", 0);
    for (const auto& e : j.value("edges", nlohmann::json::array())) {
        if (!e.is_array() || e.size() != 2) throw InputError(what + ": edges must be pairs");
        g.edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    return g;
}

}  // namespace

ProblemInstance parse_instance(ProblemKind kind, const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("params: ") + e.what());
    }
    ProblemInstance inst;
    inst.kind = kind;
    try {
        if (j.contains("host")) inst.host = graph_from_json(j["host"], "host");
        if (j.contains("host2")) inst.host2 = graph_from_json(j["host2"], "host2");
        if (j.contains("pattern")) inst.pattern = graph_from_json(j["pattern"], "pattern");
        for (const auto& p : j.value("terminals", nlohmann::json::array()))
            inst.terminals.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
        inst.roots = j.value("roots", std::vector<int>{});
        inst.k = j.value("k", 0);
        if (j.contains("phi")) inst.phi = parse_sentence(j["phi"].get<std::string>());
        if (j.contains("action")) {
            std::string a = j["action"].get<std::string>();
            inst.action = a.find("->") != std::string::npos || a.rfind("k ", 0) == 0 ? parse_action(a) : builtin_action(a, inst.k);
        }
        inst.source = j.value("source", std::vector<int>{});
        inst.target = j.value("target", std::vector<int>{});
        inst.length = j.value("length", 0);
        inst.induced = j.value("induced", false);
        inst.radius = j.value("radius", 0);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("params: ") + e.what());
    }
    if (kind == ProblemKind::UnorderedLinkability || kind == ProblemKind::OrderedLinkability)
        if (!j.contains("roots")) {
            inst.roots.resize(inst.host.n);
            std::iota(inst.roots.begin(), inst.roots.end(), 0);
        }
    validate_instance(inst);
    return inst;
}

// ---------------------------------------------------------------- encodings

namespace {

// Each edge of H becomes a direct edge, a path through one or two new
// vertices, or a path whose inner stretch is a dp pair. One dp atom keeps
// everything apart and keeps the branch vertices off the paths.
F route_formula(const std::vector<Term>& branch, const std::vector<std::pair<int, int>>& edges, NameSupply& names,
                long long& used, long long budget) {
    size_t m = edges.size();
    std::vector<std::string> w(m), p(m), q(m);
    for (size_t e = 0; e < m; ++e) {
        w[e] = names.fresh("w");
        p[e] = names.fresh("p");
        q[e] = names.fresh("q");
    }
    std::vector<F> ds;
    std::vector<int> type(m, 0);
    std::function<void(size_t)> rec = [&](size_t e) {
        if (e < m) {
            for (int t = 0; t < 4; ++t) {
                type[e] = t;
                rec(e + 1);
            }
            return;
        }
        std::vector<std::string> vars;
        std::vector<F> cons;
        std::vector<std::pair<Term, Term>> pairs;
        for (const auto& b : branch) pairs.push_back({b, b});
        for (size_t i = 0; i < m; ++i) {
            const Term &a = branch[edges[i].first], &b = branch[edges[i].second];
            Term tw = var(w[i]), tp = var(p[i]), tq = var(q[i]);
            switch (type[i]) {
                case 0:
                    cons.push_back(edge(a, b));
                    break;
                case 1:
                    vars.push_back(w[i]);
                    cons.push_back(edge(a, tw));
                    cons.push_back(edge(tw, b));
                    pairs.push_back({tw, tw});
                    break;
                case 2:
                    vars.push_back(p[i]);
                    vars.push_back(q[i]);
                    cons.push_back(edge(a, tp));
                    cons.push_back(edge(tp, tq));
                    cons.push_back(edge(tq, b));
                    pairs.push_back({tp, tp});
                    pairs.push_back({tq, tq});
                    break;
                default:
                    vars.push_back(p[i]);
                    vars.push_back(q[i]);
                    cons.push_back(edge(a, tp));
                    cons.push_back(edge(tq, b));
                    cons.push_back(neq(tp, tq));
                    pairs.push_back({tp, tq});
                    break;
            }
        }
        charge(used, static_cast<long long>(pairs.size() + cons.size()) * 3 + 4, budget, "encoding-size");
        ds.push_back(exists_block(vars, cons, dp(pairs)));
    };
    rec(0);
    return disj(ds);
}

std::vector<std::pair<Term, Term>> mapped_pairs(const std::vector<Term>& xs, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::pair<Term, Term>> out;
    for (auto [a, b] : edges) out.push_back({xs[a], xs[b]});
    return out;
}

std::vector<F> distinct_terms(const std::vector<Term>& xs) {
    std::vector<F> out;
    for (size_t i = 0; i < xs.size(); ++i)
        for (size_t j = i + 1; j < xs.size(); ++j) out.push_back(neq(xs[i], xs[j]));
    return out;
}

std::vector<std::string> fresh_vars(NameSupply& names, const std::string& stem, int count) {
    std::vector<std::string> out;
    for (int i = 0; i < count; ++i) out.push_back(names.fresh(stem + std::to_string(i + 1)));
    return out;
}

std::vector<Term> as_terms(const std::vector<std::string>& vs) {
    std::vector<Term> out;
    for (const auto& v : vs) out.push_back(var(v));
    return out;
}

F encode_containment(const ProblemInstance& inst, long long budget) {
    if (inst.kind == ProblemKind::Minor && max_degree(inst.pattern) > 3)
        throw InputError("minor: encoding covers patterns of maximum degree at most 3; use the oracle");
    NameSupply names({});
    auto xs = fresh_vars(names, "x", inst.pattern.n);
    auto ts = as_terms(xs);
    long long used = 0;
    F body = route_formula(ts, inst.pattern.edges, names, used, budget);
    return exists_block(xs, distinct_terms(ts), body);
}

F encode_linkability(const ProblemInstance& inst, long long budget) {
    NameSupply names({});
    int k = inst.pattern.n;
    auto xs = fresh_vars(names, "x", k);
    auto ts = as_terms(xs);
    long long used = 0;
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::set<std::set<std::pair<int, int>>> seen;
    std::vector<F> ds;
    do {
        std::vector<std::pair<int, int>> edges;
        std::set<std::pair<int, int>> key;
        for (auto [a, b] : inst.pattern.edges) {
            int u = perm[a], v = perm[b];
            edges.push_back({u, v});
            key.insert({std::min(u, v), std::max(u, v)});
        }
        if (!seen.insert(key).second) continue;
        if (inst.induced)
            ds.push_back(sdp(inst.radius, mapped_pairs(ts, edges)));
        else
            ds.push_back(route_formula(ts, edges, names, used, budget));
        if (inst.kind == ProblemKind::OrderedLinkability) break;
    } while (std::next_permutation(perm.begin(), perm.end()));
    F body = disj2(neg(conj(distinct_terms(ts))), disj(ds));
    for (int i = k - 1; i >= 0; --i) body = forall(xs[i], body, 1);
    return body;
}

// Quantifiers skip the deleted vertices and paths avoid them.
F relativize_deleted(const F& f, const std::vector<Term>& del) {
    switch (f->op) {
        case Op::Exists: {
            std::vector<F> parts;
            for (const auto& d : del) parts.push_back(neq(var(f->name), d));
            parts.push_back(relativize_deleted(f->kids[0], del));
            return exists(f->name, conj(parts), f->num);
        }
        case Op::Forall: {
            std::vector<F> parts;
            for (const auto& d : del) parts.push_back(eq(var(f->name), d));
            parts.push_back(relativize_deleted(f->kids[0], del));
            return forall(f->name, disj(parts), f->num);
        }
        case Op::Not:
            return neg(relativize_deleted(f->kids[0], del));
        case Op::And:
        case Op::Or: {
            std::vector<F> kids;
            for (const auto& k : f->kids) kids.push_back(relativize_deleted(k, del));
            return f->op == Op::And ? conj(kids) : disj(kids);
        }
        case Op::Dp: {
            auto pairs = term_pairs(*f);
            for (const auto& d : del) pairs.push_back({d, d});
            return dp(pairs);
        }
        default:
            return f;
    }
}

F encode_deletion(const ProblemInstance& inst) {
    NameSupply names(all_vars(inst.phi));
    auto ds = fresh_vars(names, "d", inst.k);
    auto ts = as_terms(ds);
    return exists_block(ds, distinct_terms(ts), relativize_deleted(inst.phi, ts));
}

F encode_amalgamation(const ProblemInstance& inst, long long budget) {
    int k = inst.k;
    NameSupply names(all_vars(inst.phi));
    auto v1 = as_terms(fresh_vars(names, "u", k));
    auto v2 = as_terms(fresh_vars(names, "v", k));
    auto zeq = [=](const Term& a, const Term& b) {
        std::vector<F> ds{eq(a, b)};
        for (int i = 0; i < k; ++i) {
            ds.push_back(conj2(eq(a, v1[i]), eq(b, v2[i])));
            ds.push_back(conj2(eq(b, v1[i]), eq(a, v2[i])));
        }
        return disj(ds);
    };
    auto zedge = [=](const Term& a, const Term& b) {
        std::vector<F> ds{edge(a, b)};
        for (int i = 0; i < k; ++i) {
            ds.push_back(conj2(eq(a, v1[i]), edge(v2[i], b)));
            ds.push_back(conj2(eq(a, v2[i]), edge(v1[i], b)));
            ds.push_back(conj2(eq(b, v1[i]), edge(a, v2[i])));
            ds.push_back(conj2(eq(b, v2[i]), edge(a, v1[i])));
        }
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                if (i == j) continue;
                ds.push_back(conj({eq(a, v1[i]), eq(b, v1[j]), edge(v2[i], v2[j])}));
                ds.push_back(conj({eq(a, v2[i]), eq(b, v2[j]), edge(v1[i], v1[j])}));
            }
        return disj(ds);
    };
    ApexContext ctx;
    ctx.apex = v1;
    ctx.apex.insert(ctx.apex.end(), v2.begin(), v2.end());
    ctx.same = zeq;
    ctx.adjacent = zedge;
    auto apex = ctx.apex;
    ctx.adjacent_to_apex = [=](int i, const Term& y) { return zedge(apex[i], y); };
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < k; ++i) ctx.group.push_back(i);
    ZetaBuilder zb(ctx, names, budget);
    F star = map_atoms(inst.phi, [&](const Formula& f) -> F {
        if (f.op == Op::Eq) return zeq(f.terms[0], f.terms[1]);
        if (f.op == Op::Edge) return zedge(f.terms[0], f.terms[1]);
        if (f.op == Op::Dp) return zb.build(term_pairs(f));
        return nullptr;
    });
    std::vector<std::string> vars;
    std::vector<F> cons;
    for (int i = 0; i < k; ++i) {
        vars.push_back(v1[i].name);
        cons.push_back(mem(v1[i], "V1"));
    }
    for (int i = 0; i < k; ++i) {
        vars.push_back(v2[i].name);
        cons.push_back(mem(v2[i], "V2"));
    }
    for (auto& c : distinct_terms(v1)) cons.push_back(c);
    for (auto& c : distinct_terms(v2)) cons.push_back(c);
    return exists_block(vars, cons, star);
}

F encode_replacement(const ProblemInstance& inst, long long budget) {
    int k = inst.k;
    NameSupply names(all_vars(inst.phi));
    auto vs = as_terms(fresh_vars(names, "v", k));
    // [mu^{-1}(G) = H] for every numbered graph H.
    std::vector<F> is_graph;
    for (size_t h = 0; h < inst.action.table.size(); ++h) {
        std::vector<F> parts;
        int idx = 0;
        for (int a = 0; a < k; ++a)
            for (int b = a + 1; b < k; ++b, ++idx) {
                F e = edge(vs[a], vs[b]);
                parts.push_back((h >> idx & 1u) ? e : neg(e));
            }
        is_graph.push_back(conj(parts));
    }
    auto xi_edge = [=, &inst](const Term& x, const Term& y) {
        std::vector<F> in_x, in_y;
        for (int i = 0; i < k; ++i) {
            in_x.push_back(eq(x, vs[i]));
            in_y.push_back(eq(y, vs[i]));
        }
        std::vector<F> ds{conj2(edge(x, y), neg(conj2(disj(in_x), disj(in_y))))};
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                if (i == j) continue;
                int idx = numbered_pair_index(k, i, j);
                std::vector<F> sources;
                for (size_t h = 0; h < inst.action.table.size(); ++h)
                    if (inst.action.table[h] >> idx & 1u) sources.push_back(is_graph[h]);
                if (sources.empty()) continue;
                ds.push_back(conj({eq(x, vs[i]), eq(y, vs[j]), disj(sources)}));
            }
        return disj(ds);
    };
    ApexContext ctx;
    ctx.apex = vs;
    ctx.same = [](const Term& a, const Term& b) { return eq(a, b); };
    ctx.adjacent = xi_edge;
    ctx.adjacent_to_apex = [=](int i, const Term& y) { return xi_edge(vs[i], y); };
    ZetaBuilder zb(ctx, names, budget);
    F hat = map_atoms(inst.phi, [&](const Formula& f) -> F {
        if (f.op == Op::Edge) return xi_edge(f.terms[0], f.terms[1]);
        if (f.op == Op::Dp) return zb.build(term_pairs(f));
        return nullptr;
    });
    std::vector<std::string> vars;
    for (const auto& t : vs) vars.push_back(t.name);
    return exists_block(vars, distinct_terms(vs), hat);
}

F encode_reconfiguration(const ProblemInstance& inst) {
    NameSupply names(all_vars(inst.phi));
    int l = inst.length;
    auto xs = as_terms(fresh_vars(names, "x", l));
    auto ys = as_terms(fresh_vars(names, "y", l));
    Term z = var(names.fresh("z"));
    // Membership in the i-th set of the sequence.
    std::function<F(int, const Term&)> in_set = [&](int i, const Term& t) -> F {
        if (i == 0) return disj2(mem(t, "S_only"), mem(t, "ST"));
        return disj2(conj2(in_set(i - 1, t), neq(t, xs[i - 1])), eq(t, ys[i - 1]));
    };
    auto phi_at = [&](int i) {
        return map_atoms(inst.phi, [&](const Formula& f) -> F {
            if (f.op == Op::Mem && f.name == "S") return in_set(i, f.terms[0]);
            return nullptr;
        });
    };
    std::vector<F> options;
    for (int m = 0; m <= l; ++m) {
        std::vector<std::string> vars;
        std::vector<F> cons;
        for (int i = 1; i <= m; ++i) {
            vars.push_back(xs[i - 1].name);
            vars.push_back(ys[i - 1].name);
            cons.push_back(in_set(i - 1, xs[i - 1]));
            cons.push_back(neg(in_set(i - 1, ys[i - 1])));
        }
        std::vector<F> body;
        for (int i = 0; i <= m; ++i) body.push_back(phi_at(i));
        F in_t = disj2(mem(z, "T_only"), mem(z, "ST"));
        F at_end = in_set(m, z);
        body.push_back(forall(z.name, disj2(conj2(at_end, in_t), conj2(neg(at_end), neg(in_t)))));
        options.push_back(exists_block(vars, cons, conj(body)));
    }
    return disj(options);
}

}  // namespace

ColoredStructure build_structure(const ProblemInstance& inst) {
    ColoredStructure s;
    switch (inst.kind) {
        case ProblemKind::DisjointPaths: {
            s = structure_from_graph(inst.host);
            for (size_t i = 0; i < inst.terminals.size(); ++i) {
                s.constants.push_back({"s" + std::to_string(i + 1), inst.terminals[i].first});
                s.constants.push_back({"t" + std::to_string(i + 1), inst.terminals[i].second});
            }
            break;
        }
        case ProblemKind::UnorderedLinkability:
        case ProblemKind::OrderedLinkability:
            s = structure_from_graph(inst.host);
            s.annotations.push_back(inst.roots);
            break;
        case ProblemKind::Amalgamation: {
            PlainGraph g{inst.host.n + inst.host2.n, inst.host.edges};
            for (auto [u, v] : inst.host2.edges) g.edges.push_back({u + inst.host.n, v + inst.host.n});
            s = structure_from_graph(g);
            NamedSet a{"V1", {}}, b{"V2", {}};
            for (int v = 0; v < inst.host.n; ++v) a.members.push_back(v);
            for (int v = 0; v < inst.host2.n; ++v) b.members.push_back(inst.host.n + v);
            s.colors = {a, b};
            break;
        }
        case ProblemKind::Reconfiguration: {
            s = structure_from_graph(inst.host);
            std::set<int> S(inst.source.begin(), inst.source.end()), T(inst.target.begin(), inst.target.end());
            NamedSet so{"S_only", {}}, to{"T_only", {}}, st{"ST", {}};
            for (int v = 0; v < inst.host.n; ++v) {
                if (S.count(v) && T.count(v)) st.members.push_back(v);
                else if (S.count(v)) so.members.push_back(v);
                else if (T.count(v)) to.members.push_back(v);
            }
            s.colors = {so, to, st};
            break;
        }
        default:
            s = structure_from_graph(inst.host);
    }
    s.normalize();
    return s;
}

Encoding encode(const ProblemInstance& inst, long long budget) {
    validate_instance(inst);
    Encoding out;
    switch (inst.kind) {
        case ProblemKind::DisjointPaths: {
            std::vector<std::pair<Term, Term>> pairs;
            for (size_t i = 0; i < inst.terminals.size(); ++i)
                pairs.push_back({cst("s" + std::to_string(i + 1)), cst("t" + std::to_string(i + 1))});
            out.sentence = inst.induced ? sdp(inst.radius, pairs) : dp(pairs);
            break;
        }
        case ProblemKind::Minor:
        case ProblemKind::TopologicalMinor:
            out.sentence = encode_containment(inst, budget);
            break;
        case ProblemKind::UnorderedLinkability:
        case ProblemKind::OrderedLinkability:
            out.sentence = encode_linkability(inst, budget);
            break;
        case ProblemKind::Deletion:
            out.sentence = encode_deletion(inst);
            break;
        case ProblemKind::Amalgamation:
            out.sentence = encode_amalgamation(inst, budget);
            break;
        case ProblemKind::Replacement:
            out.sentence = encode_replacement(inst, budget);
            break;
        case ProblemKind::Reconfiguration:
            out.sentence = encode_reconfiguration(inst);
            break;
    }
    out.vocabulary = vocabulary_of(build_structure(inst));
    out.rank = quantifier_rank(out.sentence);
    return out;
}

// ---------------------------------------------------------------- oracles

bool route_pairs(const PlainGraph& g, const std::vector<std::pair<int, int>>& pairs, const std::vector<bool>& allowed) {
    auto adj = adjacency_of(g);
    std::vector<bool> blocked(g.n, false), used(g.n, false);
    for (int v = 0; v < g.n; ++v) blocked[v] = !allowed[v];
    for (auto [a, b] : pairs) blocked[a] = blocked[b] = true;
    std::function<bool(size_t)> next_pair;
    std::function<bool(size_t, int)> extend = [&](size_t i, int at) {
        int goal = pairs[i].second;
        for (int w : adj[at]) {
            if (w == goal && next_pair(i + 1)) return true;
            if (blocked[w] || used[w]) continue;
            used[w] = true;
            bool ok = extend(i, w);
            used[w] = false;
            if (ok) return true;
        }
        return false;
    };
    next_pair = [&](size_t i) { return i == pairs.size() || extend(i, pairs[i].first); };
    return next_pair(0);
}

bool has_topological_minor(const PlainGraph& g, const PlainGraph& h) {
    if (h.n > g.n) return false;
    std::vector<int> img(h.n, -1);
    std::vector<bool> taken(g.n, false);
    std::function<bool(int)> place = [&](int i) {
        if (i == h.n) {
            std::vector<bool> allowed(g.n, true);
            for (int v : img) allowed[v] = false;
            std::vector<std::pair<int, int>> pairs;
            for (auto [a, b] : h.edges) pairs.push_back({img[a], img[b]});
            return route_pairs(g, pairs, allowed);
        }
        for (int v = 0; v < g.n; ++v) {
            if (taken[v]) continue;
            taken[v] = true;
            img[i] = v;
            bool ok = place(i + 1);
            taken[v] = false;
            if (ok) return true;
        }
        return false;
    };
    return place(0);
}

bool has_minor(const PlainGraph& g, const PlainGraph& h) {
    if (h.n > g.n) return false;
    if (h.n == 0) return true;
    auto adj = adjacency_of(g);
    std::vector<int> label(g.n, 0);  // 0 unused, else branch set index + 1
    auto check = [&] {
        for (int b = 1; b <= h.n; ++b) {
            int start = -1, size = 0;
            for (int v = 0; v < g.n; ++v)
                if (label[v] == b) {
                    ++size;
                    if (start < 0) start = v;
                }
            if (start < 0) return false;
            std::vector<bool> seen(g.n, false);
            std::vector<int> stack{start};
            seen[start] = true;
            int reached = 0;
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                ++reached;
                for (int w : adj[v])
                    if (!seen[w] && label[w] == b) {
                        seen[w] = true;
                        stack.push_back(w);
                    }
            }
            if (reached != size) return false;
        }
        for (auto [a, b] : h.edges) {
            bool found = false;
            for (auto [u, v] : g.edges)
                if ((label[u] == a + 1 && label[v] == b + 1) || (label[u] == b + 1 && label[v] == a + 1)) found = true;
            if (!found) return false;
        }
        return true;
    };
    std::function<bool(int)> rec = [&](int v) {
        if (v == g.n) return check();
        for (int b = 0; b <= h.n; ++b) {
            label[v] = b;
            if (rec(v + 1)) return true;
        }
        label[v] = 0;
        return false;
    };
    return rec(0);
}

namespace {

// Full vertex-disjoint path systems, trivial paths for equal endpoints,
// length >= 2 otherwise, paths pairwise at distance > radius.
bool path_system(const PlainGraph& g, const std::vector<std::pair<int, int>>& pairs, int radius) {
    int n = g.n;
    auto adj = adjacency_of(g);
    std::vector<std::vector<int>> dist(n, std::vector<int>(n, 1 << 20));
    for (int s = 0; s < n; ++s) {
        std::queue<int> bfs;
        dist[s][s] = 0;
        bfs.push(s);
        while (!bfs.empty()) {
            int v = bfs.front();
            bfs.pop();
            for (int w : adj[v])
                if (dist[s][w] > dist[s][v] + 1) {
                    dist[s][w] = dist[s][v] + 1;
                    bfs.push(w);
                }
        }
    }
    std::vector<int> owner(n, -1);
    for (size_t i = 0; i < pairs.size(); ++i)
        for (int v : {pairs[i].first, pairs[i].second}) {
            if (owner[v] >= 0 && owner[v] != static_cast<int>(i)) return false;
            owner[v] = static_cast<int>(i);
        }
    std::vector<std::vector<int>> paths(pairs.size());
    auto far_enough = [&](size_t i) {
        for (size_t j = 0; j < i; ++j)
            for (int a : paths[i])
                for (int b : paths[j])
                    if (dist[a][b] <= radius) return false;
        return true;
    };
    std::vector<bool> used(n, false);
    std::function<bool(size_t)> next_pair;
    std::function<bool(size_t, int)> extend = [&](size_t i, int at) {
        int goal = pairs[i].second;
        for (int w : adj[at]) {
            if (w == goal) {
                if (paths[i].size() < 2) continue;
                paths[i].push_back(w);
                bool ok = far_enough(i) && next_pair(i + 1);
                paths[i].pop_back();
                if (ok) return true;
                continue;
            }
            if (used[w] || owner[w] >= 0) continue;
            used[w] = true;
            paths[i].push_back(w);
            bool ok = extend(i, w);
            paths[i].pop_back();
            used[w] = false;
            if (ok) return true;
        }
        return false;
    };
    next_pair = [&](size_t i) {
        if (i == pairs.size()) return true;
        auto [s, t] = pairs[i];
        paths[i] = {s};
        if (s == t) return far_enough(i) && next_pair(i + 1);
        return extend(i, s);
    };
    return next_pair(0);
}

bool linkable_tuple(const ProblemInstance& inst, const std::vector<int>& tuple) {
    const auto& h = inst.pattern;
    std::vector<int> perm(h.n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<bool> allowed(inst.host.n, true);
    for (int v : tuple) allowed[v] = false;
    do {
        std::vector<std::pair<int, int>> pairs;
        for (auto [a, b] : h.edges) pairs.push_back({tuple[perm[a]], tuple[perm[b]]});
        bool ok = inst.induced ? eval_sdp(structure_from_graph(inst.host), inst.radius, pairs)
                               : route_pairs(inst.host, pairs, allowed);
        if (ok) return true;
        if (inst.kind == ProblemKind::OrderedLinkability) return false;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

// Calls fn on every sequence of `len` distinct items; stops when fn is false.
bool all_sequences(const std::vector<int>& items, int len, const std::function<bool(const std::vector<int>&)>& fn) {
    std::vector<int> cur;
    std::vector<bool> taken(items.size(), false);
    std::function<bool()> rec = [&] {
        if (static_cast<int>(cur.size()) == len) return fn(cur);
        for (size_t i = 0; i < items.size(); ++i) {
            if (taken[i]) continue;
            taken[i] = true;
            cur.push_back(items[i]);
            bool ok = rec();
            cur.pop_back();
            taken[i] = false;
            if (!ok) return false;
        }
        return true;
    };
    return rec();
}

std::vector<int> range_of(int n) {
    std::vector<int> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

ColoredStructure with_color_s(const PlainGraph& g, unsigned mask) {
    ColoredStructure s = structure_from_graph(g);
    NamedSet c{"S", {}};
    for (int v = 0; v < g.n; ++v)
        if (mask >> v & 1u) c.members.push_back(v);
    s.colors.push_back(c);
    s.normalize();
    return s;
}

}  // namespace

bool oracle(const ProblemInstance& inst, long long budget) {
    validate_instance(inst);
    long long used = 0;
    const auto& g = inst.host;
    switch (inst.kind) {
        case ProblemKind::DisjointPaths:
            if (g.n > 12) throw GuardError("oracle-size", "n=" + std::to_string(g.n) + " above 12");
            return path_system(g, inst.terminals, inst.induced ? inst.radius : 0);
        case ProblemKind::Minor:
            if (g.n > 10) throw GuardError("oracle-size", "n=" + std::to_string(g.n) + " above 10");
            return has_minor(g, inst.pattern);
        case ProblemKind::TopologicalMinor:
            if (g.n > 10) throw GuardError("oracle-size", "n=" + std::to_string(g.n) + " above 10");
            return has_topological_minor(g, inst.pattern);
        case ProblemKind::UnorderedLinkability:
        case ProblemKind::OrderedLinkability:
            if (g.n > 10) throw GuardError("oracle-size", "n=" + std::to_string(g.n) + " above 10");
            return all_sequences(inst.roots, inst.pattern.n, [&](const std::vector<int>& t) {
                charge(used, 1, budget, "oracle-steps");
                return linkable_tuple(inst, t);
            });
        case ProblemKind::Deletion: {
            auto base = structure_from_graph(g);
            bool found = false;
            std::vector<bool> pick(g.n, false);
            std::fill(pick.end() - inst.k, pick.end(), true);
            do {
                charge(used, 1, budget, "oracle-steps");
                std::vector<int> keep;
                for (int v = 0; v < g.n; ++v)
                    if (!pick[v]) keep.push_back(v);
                if (evaluate(induced_substructure(base, keep), inst.phi)) found = true;
            } while (!found && std::next_permutation(pick.begin(), pick.end()));
            return found;
        }
        case ProblemKind::Amalgamation: {
            const auto& g2 = inst.host2;
            int k = inst.k;
            if (k > g.n || k > g2.n) return false;
            std::vector<bool> pick(g.n, false);
            std::fill(pick.end() - k, pick.end(), true);
            bool found = false;
            do {
                std::vector<int> s1;
                for (int v = 0; v < g.n; ++v)
                    if (pick[v]) s1.push_back(v);
                all_sequences(range_of(g2.n), k, [&](const std::vector<int>& s2) {
                    charge(used, 1, budget, "oracle-steps");
                    // G_2 vertices map after G_1; merged ones take their partner's id.
                    std::vector<int> id(g2.n, -1);
                    for (int i = 0; i < k; ++i) id[s2[i]] = s1[i];
                    int next = g.n;
                    for (int v = 0; v < g2.n; ++v)
                        if (id[v] < 0) id[v] = next++;
                    std::set<std::pair<int, int>> es;
                    for (auto [u, v] : g.edges) es.insert({std::min(u, v), std::max(u, v)});
                    for (auto [u, v] : g2.edges) es.insert({std::min(id[u], id[v]), std::max(id[u], id[v])});
                    PlainGraph j{next, {es.begin(), es.end()}};
                    if (evaluate(structure_from_graph(j), inst.phi)) found = true;
                    return !found;
                });
            } while (!found && std::next_permutation(pick.begin(), pick.end()));
            return found;
        }
        case ProblemKind::Replacement: {
            bool found = false;
            all_sequences(range_of(g.n), inst.k, [&](const std::vector<int>& mu) {
                charge(used, 1, budget, "oracle-steps");
                std::vector<int> pos(g.n, -1);
                for (int i = 0; i < inst.k; ++i) pos[mu[i]] = i;
                std::vector<std::pair<int, int>> inside, kept;
                for (auto [u, v] : g.edges) {
                    if (pos[u] >= 0 && pos[v] >= 0) inside.push_back({pos[u], pos[v]});
                    else kept.push_back({u, v});
                }
                NumberedGraph image = inst.action.apply(numbered_graph_of(inst.k, inside));
                int idx = 0;
                for (int a = 0; a < inst.k; ++a)
                    for (int b = a + 1; b < inst.k; ++b, ++idx)
                        if (image >> idx & 1u) kept.push_back({mu[a], mu[b]});
                if (evaluate(structure_from_graph(PlainGraph{g.n, kept}), inst.phi)) found = true;
                return !found;
            });
            return found;
        }
        case ProblemKind::Reconfiguration: {
            if (g.n > 16) throw GuardError("oracle-size", "n=" + std::to_string(g.n) + " above 16");
            unsigned s = 0, t = 0;
            for (int v : inst.source) s |= 1u << v;
            for (int v : inst.target) t |= 1u << v;
            std::map<unsigned, bool> feasible;
            auto ok = [&](unsigned m) {
                auto it = feasible.find(m);
                if (it != feasible.end()) return it->second;
                charge(used, 1, budget, "oracle-steps");
                return feasible[m] = evaluate(with_color_s(g, m), inst.phi);
            };
            if (!ok(s)) return false;
            std::map<unsigned, int> depth{{s, 0}};
            std::queue<unsigned> bfs;
            bfs.push(s);
            while (!bfs.empty()) {
                unsigned m = bfs.front();
                bfs.pop();
                if (m == t) return true;
                if (depth[m] == inst.length) continue;
                for (int v = 0; v < g.n; ++v) {
                    if (!(m >> v & 1u)) continue;
                    for (int u = 0; u < g.n; ++u) {
                        if (m >> u & 1u) continue;
                        unsigned nm = (m & ~(1u << v)) | (1u << u);
                        if (depth.count(nm) || !ok(nm)) continue;
                        depth[nm] = depth[m] + 1;
                        bfs.push(nm);
                    }
                }
            }
            return false;
        }
    }
    throw DefectError("unhandled problem kind");
}

}  // namespace dplk
