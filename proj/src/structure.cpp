#include "dplk/structure.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "dplk/error.hpp"

namespace dplk {

long long budget_from_env(long long fallback) {
    const char* v = std::getenv("DPLK_BUDGET");
    if (v == nullptr || *v == '\0') return fallback;
    char* end = nullptr;
    long long x = std::strtoll(v, &end, 10);
    if (end == v || x <= 0) return fallback;
    return x;
}

namespace {

void sort_unique(std::vector<int>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

struct Token {
    std::string text;
    int column;
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.size()) {
        if (line[i] == '#') break;
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != '#') ++j;
        out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
        i = j;
    }
    return out;
}

[[noreturn]] void fail(int line, int col, const std::string& msg) {
    throw InputError("structure line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
}

int parse_int(const Token& t, int line) {
    if (t.text.empty()) fail(line, t.column, "expected integer");
    size_t k = 0;
    if (t.text[0] == '-') k = 1;
    if (k == t.text.size()) fail(line, t.column, "expected integer, got '" + t.text + "'");
    for (size_t i = k; i < t.text.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(t.text[i])))
            fail(line, t.column, "expected integer, got '" + t.text + "'");
    try {
        return std::stoi(t.text);
    } catch (...) {
        fail(line, t.column, "integer out of range: '" + t.text + "'");
    }
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

}  // namespace

void ColoredStructure::normalize() {
    for (auto& e : edges)
        if (e.first > e.second) std::swap(e.first, e.second);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (auto& c : colors) sort_unique(c.members);
    for (auto& c : pcolors) sort_unique(c.members);
    for (auto& a : annotations) sort_unique(a);
}

bool ColoredStructure::has_edge(int u, int v) const {
    if (u == BOT || v == BOT || u == v) return false;
    if (u > v) std::swap(u, v);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
}

int ColoredStructure::constant_index(const std::string& name) const {
    for (size_t i = 0; i < constants.size(); ++i)
        if (constants[i].name == name) return static_cast<int>(i);
    return -1;
}

int ColoredStructure::constant_value(const std::string& name) const {
    int i = constant_index(name);
    if (i < 0) throw InputError("unknown constant '" + name + "'");
    return constants[i].value;
}

const NamedSet* ColoredStructure::find_unary(const std::string& name) const {
    for (const auto& c : colors)
        if (c.name == name) return &c;
    for (const auto& c : pcolors)
        if (c.name == name) return &c;
    return nullptr;
}

std::vector<std::vector<int>> ColoredStructure::adjacency() const {
    std::vector<std::vector<int>> adj(n);
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
}

ColoredStructure parse_structure(const std::string& text) {
    ColoredStructure s;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_n = false;
    std::set<std::string> names;
    std::map<int, std::vector<int>> annots;
    int max_annot = 0;
    auto vertex = [&](const Token& t, int ln) {
        int v = parse_int(t, ln);
        if (v < 0 || v >= s.n) fail(ln, t.column, "vertex id " + t.text + " out of range 0.." + std::to_string(s.n - 1));
        return v;
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = tokenize(line);
        if (toks.empty()) continue;
        const std::string& kw = toks[0].text;
        if (!have_n) {
            if (kw != "n") fail(lineno, toks[0].column, "first directive must be 'n <int>'");
            if (toks.size() != 2) fail(lineno, toks[0].column, "'n' takes exactly one integer");
            s.n = parse_int(toks[1], lineno);
            if (s.n < 1) fail(lineno, toks[1].column, "universe must be non-empty (n >= 1)");
            have_n = true;
            continue;
        }
        if (kw == "n") {
            fail(lineno, toks[0].column, "duplicate 'n' directive");
        } else if (kw == "edge") {
            if (toks.size() != 3) fail(lineno, toks[0].column, "'edge' takes two vertex ids");
            int u = vertex(toks[1], lineno), v = vertex(toks[2], lineno);
            if (u == v) fail(lineno, toks[2].column, "anti-reflexive: self-loop on vertex " + std::to_string(u));
            s.edges.emplace_back(std::min(u, v), std::max(u, v));
        } else if (kw == "color" || kw == "pcolor") {
            if (toks.size() < 2) fail(lineno, toks[0].column, "'" + kw + "' needs a name");
            const std::string& nm = toks[1].text;
            if (!valid_name(nm)) fail(lineno, toks[1].column, "invalid name '" + nm + "'");
            if (!names.insert(nm).second) fail(lineno, toks[1].column, "duplicate name '" + nm + "'");
            NamedSet ns{nm, {}};
            for (size_t i = 2; i < toks.size(); ++i) ns.members.push_back(vertex(toks[i], lineno));
            (kw == "color" ? s.colors : s.pcolors).push_back(std::move(ns));
        } else if (kw == "const") {
            if (toks.size() != 3) fail(lineno, toks[0].column, "'const' takes a name and a vertex id or _");
            const std::string& nm = toks[1].text;
            if (!valid_name(nm)) fail(lineno, toks[1].column, "invalid name '" + nm + "'");
            if (!names.insert(nm).second) fail(lineno, toks[1].column, "duplicate name '" + nm + "'");
            int v = toks[2].text == "_" ? BOT : vertex(toks[2], lineno);
            s.constants.push_back({nm, v});
        } else if (kw == "annot") {
            if (toks.size() < 2) fail(lineno, toks[0].column, "'annot' needs an index");
            int idx = parse_int(toks[1], lineno);
            if (idx < 1) fail(lineno, toks[1].column, "annotation index must be >= 1");
            auto& a = annots[idx];
            for (size_t i = 2; i < toks.size(); ++i) a.push_back(vertex(toks[i], lineno));
            max_annot = std::max(max_annot, idx);
        } else {
            fail(lineno, toks[0].column, "unknown directive '" + kw + "'");
        }
    }
    if (!have_n) fail(lineno + 1, 1, "missing 'n' directive");
    s.annotations.assign(max_annot, {});
    for (auto& [i, a] : annots) s.annotations[i - 1] = a;
    s.normalize();
    auto v = validate(s);
    if (!v.empty()) throw InputError("structure invariant violated: " + v.front());
    return s;
}

std::string serialize_structure(const ColoredStructure& s0) {
    ColoredStructure s = s0;
    s.normalize();
    std::ostringstream o;
    o << "n " << s.n << "\n";
    for (auto [u, v] : s.edges) o << "edge " << u << " " << v << "\n";
    auto sets = [&](const char* kw, const std::vector<NamedSet>& v) {
        for (const auto& c : v) {
            o << kw << " " << c.name;
            for (int x : c.members) o << " " << x;
            o << "\n";
        }
    };
    sets("color", s.colors);
    sets("pcolor", s.pcolors);
    for (const auto& c : s.constants) {
        o << "const " << c.name << " ";
        if (c.value == BOT)
            o << "_";
        else
            o << c.value;
        o << "\n";
    }
    for (size_t i = 0; i < s.annotations.size(); ++i) {
        o << "annot " << i + 1;
        for (int x : s.annotations[i]) o << " " << x;
        o << "\n";
    }
    return o.str();
}

std::vector<std::string> validate(const ColoredStructure& s, bool constants_as_apex) {
    std::vector<std::string> out;
    if (s.n < 1) {
        out.push_back("universe must be non-empty");
        return out;
    }
    auto in_range = [&](int v) { return v >= 0 && v < s.n; };
    for (auto [u, v] : s.edges) {
        if (u == v)
            out.push_back("anti-reflexive: self-loop on vertex " + std::to_string(u));
        else if (!in_range(u) || !in_range(v))
            out.push_back("edge out of range: " + std::to_string(u) + " " + std::to_string(v));
    }
    std::set<std::string> names;
    std::vector<int> owner(s.n, -1);
    for (size_t i = 0; i < s.colors.size(); ++i) {
        const auto& c = s.colors[i];
        if (!names.insert(c.name).second) out.push_back("duplicate name '" + c.name + "'");
        for (int v : c.members) {
            if (!in_range(v)) {
                out.push_back("color out of range: '" + c.name + "' contains " + std::to_string(v));
                continue;
            }
            if (owner[v] >= 0 && owner[v] != static_cast<int>(i))
                out.push_back("colors not pairwise disjoint: '" + s.colors[owner[v]].name + "' and '" + c.name +
                              "' share vertex " + std::to_string(v));
            owner[v] = static_cast<int>(i);
        }
    }
    for (const auto& c : s.pcolors) {
        if (!names.insert(c.name).second) out.push_back("duplicate name '" + c.name + "'");
        for (int v : c.members)
            if (!in_range(v)) out.push_back("color out of range: '" + c.name + "' contains " + std::to_string(v));
    }
    std::map<int, std::string> seen;
    for (const auto& c : s.constants) {
        if (!names.insert(c.name).second) out.push_back("duplicate name '" + c.name + "'");
        if (c.value == BOT) continue;
        if (!in_range(c.value)) {
            out.push_back("constant out of range: '" + c.name + "' = " + std::to_string(c.value));
            continue;
        }
        if (constants_as_apex) {
            auto [it, fresh] = seen.emplace(c.value, c.name);
            if (!fresh)
                out.push_back("apex constants not distinct: '" + it->second + "' and '" + c.name + "' both equal " +
                              std::to_string(c.value));
        }
    }
    for (size_t i = 0; i < s.annotations.size(); ++i)
        for (int v : s.annotations[i])
            if (!in_range(v))
                out.push_back("annotation out of range: R_" + std::to_string(i + 1) + " contains " + std::to_string(v));
    return out;
}

void require_valid(const ColoredStructure& s, bool constants_as_apex) {
    auto v = validate(s, constants_as_apex);
    if (!v.empty()) throw InputError("structure invariant violated: " + v.front());
}

ColoredStructure disjoint_union(const ColoredStructure& a, const ColoredStructure& b) {
    auto names = [](const std::vector<NamedSet>& v) {
        std::vector<std::string> r;
        for (const auto& x : v) r.push_back(x.name);
        return r;
    };
    if (names(a.colors) != names(b.colors) || names(a.pcolors) != names(b.pcolors) ||
        a.constants.size() != b.constants.size() || a.annotations.size() != b.annotations.size())
        throw InputError("vocabulary mismatch in disjoint union");
    for (size_t i = 0; i < a.constants.size(); ++i)
        if (a.constants[i].name != b.constants[i].name) throw InputError("vocabulary mismatch in disjoint union");
    ColoredStructure u = a;
    int off = a.n;
    u.n = a.n + b.n;
    for (auto [x, y] : b.edges) u.edges.emplace_back(x + off, y + off);
    for (size_t i = 0; i < b.colors.size(); ++i)
        for (int v : b.colors[i].members) u.colors[i].members.push_back(v + off);
    for (size_t i = 0; i < b.pcolors.size(); ++i)
        for (int v : b.pcolors[i].members) u.pcolors[i].members.push_back(v + off);
    for (size_t i = 0; i < b.annotations.size(); ++i)
        for (int v : b.annotations[i]) u.annotations[i].push_back(v + off);
    for (size_t i = 0; i < b.constants.size(); ++i) {
        int va = a.constants[i].value, vb = b.constants[i].value;
        if (va != BOT && vb != BOT)
            throw InputError("conflicting constant '" + a.constants[i].name +
                             "': both sides interpret it in disjoint universes");
        u.constants[i].value = va != BOT ? va : (vb == BOT ? BOT : vb + off);
    }
    u.normalize();
    return u;
}

PlainGraph gaifman_graph(const ColoredStructure& s) {
    PlainGraph g{s.n, s.edges};
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

ColoredStructure relabel(const ColoredStructure& s, const std::vector<int>& perm) {
    ColoredStructure r = s;
    auto m = [&](int v) { return v == BOT ? BOT : perm[v]; };
    for (auto& [u, v] : r.edges) {
        u = m(u);
        v = m(v);
    }
    for (auto& c : r.colors)
        for (auto& v : c.members) v = m(v);
    for (auto& c : r.pcolors)
        for (auto& v : c.members) v = m(v);
    for (auto& c : r.constants) c.value = m(c.value);
    for (auto& a : r.annotations)
        for (auto& v : a) v = m(v);
    r.normalize();
    return r;
}

ColoredStructure induced_substructure(const ColoredStructure& s, const std::vector<int>& keep0) {
    std::vector<int> keep = keep0;
    sort_unique(keep);
    if (keep.empty()) throw InputError("induced substructure would have an empty universe");
    std::vector<int> id(s.n, BOT);
    for (size_t i = 0; i < keep.size(); ++i) id[keep[i]] = static_cast<int>(i);
    ColoredStructure r;
    r.n = static_cast<int>(keep.size());
    for (auto [u, v] : s.edges)
        if (id[u] != BOT && id[v] != BOT) r.edges.emplace_back(id[u], id[v]);
    auto project = [&](const std::vector<NamedSet>& in) {
        std::vector<NamedSet> out;
        for (const auto& c : in) {
            NamedSet ns{c.name, {}};
            for (int v : c.members)
                if (id[v] != BOT) ns.members.push_back(id[v]);
            out.push_back(ns);
        }
        return out;
    };
    r.colors = project(s.colors);
    r.pcolors = project(s.pcolors);
    for (const auto& c : s.constants) r.constants.push_back({c.name, c.value == BOT ? BOT : id[c.value]});
    for (const auto& a : s.annotations) {
        std::vector<int> na;
        for (int v : a)
            if (id[v] != BOT) na.push_back(id[v]);
        r.annotations.push_back(na);
    }
    r.normalize();
    return r;
}

ColoredStructure structure_from_graph(const PlainGraph& g) {
    ColoredStructure s;
    s.n = g.n;
    s.edges = g.edges;
    s.normalize();
    require_valid(s);
    return s;
}

PlainGraph make_path(int n) {
    PlainGraph g{n, {}};
    for (int i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
    return g;
}

PlainGraph make_cycle(int n) {
    PlainGraph g = make_path(n);
    if (n >= 3) g.edges.emplace_back(0, n - 1);
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

PlainGraph make_complete(int n) {
    PlainGraph g{n, {}};
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
    return g;
}

}  // namespace dplk
