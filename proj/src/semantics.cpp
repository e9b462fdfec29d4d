#include "dplk/semantics.hpp"

#include <algorithm>
#include <set>

#include "dplk/error.hpp"
#include "dplk/normal_form.hpp"

namespace dplk {

Model::Model(ColoredStructure s) : s_(std::move(s)), solver_(s_) {
    int n = s_.n;
    adj_.assign(static_cast<size_t>(n) * n, 0);
    for (auto [u, v] : s_.edges) adj_[u * n + v] = adj_[v * n + u] = 1;
    for (const auto* list : {&s_.colors, &s_.pcolors})
        for (const auto& c : *list) {
            std::vector<char> row(n, 0);
            for (int v : c.members) row[v] = 1;
            unary_.push_back(std::move(row));
        }
    for (const auto& a : s_.annotations) {
        std::vector<char> row(n, 0);
        for (int v : a) row[v] = 1;
        annot_.push_back(std::move(row));
    }
}

int Model::unary_position(const std::string& name) const {
    int pos = 0;
    for (const auto* list : {&s_.colors, &s_.pcolors})
        for (const auto& c : *list) {
            if (c.name == name) return pos;
            ++pos;
        }
    return -1;
}

int Model::constant(const std::string& name) const {
    int i = s_.constant_index(name);
    if (i < 0) throw InputError("unknown constant '@" + name + "'");
    return s_.constants[i].value;
}

namespace {

std::vector<int> memo_key(int tag, std::vector<VertexPair>& pairs) {
    for (auto& [a, b] : pairs)
        if (a > b) std::swap(a, b);
    std::sort(pairs.begin(), pairs.end());
    std::vector<int> key{tag};
    for (auto [a, b] : pairs) {
        key.push_back(a);
        key.push_back(b);
    }
    return key;
}

bool has_bot(const std::vector<VertexPair>& pairs) {
    return std::any_of(pairs.begin(), pairs.end(), [](const VertexPair& p) { return p.first == BOT || p.second == BOT; });
}

}  // namespace

bool Model::dp(std::vector<VertexPair> pairs) const {
    if (has_bot(pairs)) return false;
    auto key = memo_key(-1, pairs);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    bool v = solver_.dp(pairs);
    memo_.emplace(std::move(key), v);
    return v;
}

bool Model::sdp(int radius, std::vector<VertexPair> pairs) const {
    if (has_bot(pairs)) return false;
    auto key = memo_key(radius, pairs);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    bool v = solver_.sdp(radius, pairs);
    memo_.emplace(std::move(key), v);
    return v;
}

// Term encoding: slot >= 0, or a resolved constant stored as -2 - value
// (value BOT maps to -1).
struct CompiledFormula::Node {
    Op op;
    std::vector<int> terms;
    int num = 0;
    int slot = -1;
    std::vector<Node> kids;
};

namespace {

struct Compiler {
    const Model& m;
    std::map<std::string, int> scope;
    int next = 0;

    int term(const Term& t) {
        if (t.constant) {
            int v = m.constant(t.name);
            return v == BOT ? -1 : -2 - v;
        }
        auto it = scope.find(t.name);
        if (it == scope.end()) throw InputError("unbound variable '" + t.name + "'");
        return it->second;
    }

    CompiledFormula::Node build(const F& f) {
        CompiledFormula::Node nd{f->op, {}, f->num, -1, {}};
        for (const auto& t : f->terms) nd.terms.push_back(term(t));
        if (f->op == Op::Mem) {
            nd.num = m.unary_position(f->name);
            if (nd.num < 0) throw InputError("unknown color '" + f->name + "'");
        }
        if ((f->op == Op::InAnnot || is_quantifier(*f)) && f->num > m.annotations())
            throw InputError("unknown annotation index " + std::to_string(f->num));
        if (is_quantifier(*f)) {
            nd.slot = next++;
            auto saved = scope.find(f->name) != scope.end() ? scope[f->name] : -1;
            scope[f->name] = nd.slot;
            nd.kids.push_back(build(f->kids[0]));
            if (saved >= 0)
                scope[f->name] = saved;
            else
                scope.erase(f->name);
            return nd;
        }
        for (const auto& k : f->kids) nd.kids.push_back(build(k));
        return nd;
    }
};

inline int value(int code, const std::vector<int>& env) {
    if (code >= 0) return env[code];
    return code == -1 ? BOT : -2 - code;
}

}  // namespace

CompiledFormula::CompiledFormula(const F& f, const Model& m, const std::vector<std::string>& free) : m_(m) {
    Compiler c{m, {}, 0};
    for (const auto& v : free) c.scope[v] = c.next++;
    free_ = c.next;
    root_ = std::make_shared<Node>(c.build(f));
    slots_ = c.next;
}

bool CompiledFormula::eval(const std::vector<int>& free_values) const {
    if (static_cast<int>(free_values.size()) != free_) throw InputError("free-variable value count mismatch");
    std::vector<int> env(slots_, BOT);
    std::copy(free_values.begin(), free_values.end(), env.begin());
    return run(*root_, env);
}

bool CompiledFormula::run(const Node& nd, std::vector<int>& env) const {
    switch (nd.op) {
        case Op::True:
            return true;
        case Op::False:
            return false;
        case Op::Eq: {
            int a = value(nd.terms[0], env), b = value(nd.terms[1], env);
            return a != BOT && a == b;
        }
        case Op::Mem:
            return m_.in_unary(nd.num, value(nd.terms[0], env));
        case Op::Edge:
            return m_.edge(value(nd.terms[0], env), value(nd.terms[1], env));
        case Op::InAnnot:
            return m_.in_annotation(nd.num - 1, value(nd.terms[0], env));
        case Op::Dp:
        case Op::Sdp: {
            std::vector<VertexPair> pairs;
            for (size_t i = 0; i + 1 < nd.terms.size(); i += 2)
                pairs.push_back({value(nd.terms[i], env), value(nd.terms[i + 1], env)});
            return nd.op == Op::Dp ? m_.dp(std::move(pairs)) : m_.sdp(nd.num, std::move(pairs));
        }
        case Op::Not:
            return !run(nd.kids[0], env);
        case Op::And:
            for (const auto& k : nd.kids)
                if (!run(k, env)) return false;
            return true;
        case Op::Or:
            for (const auto& k : nd.kids)
                if (run(k, env)) return true;
            return false;
        case Op::Exists:
        case Op::Forall: {
            bool ex = nd.op == Op::Exists;
            auto body = [&](int v) {
                env[nd.slot] = v;
                return run(nd.kids[0], env);
            };
            bool result = !ex;
            if (nd.num) {
                for (int v : m_.annotation(nd.num - 1))
                    if (body(v) == ex) {
                        result = ex;
                        break;
                    }
            } else {
                for (int v = 0; v < m_.n(); ++v)
                    if (body(v) == ex) {
                        result = ex;
                        break;
                    }
            }
            env[nd.slot] = BOT;
            return result;
        }
    }
    throw DefectError("unknown node");
}

bool evaluate(const Model& m, const F& sentence) { return CompiledFormula(sentence, m).eval(); }

bool evaluate(const ColoredStructure& s, const F& sentence) {
    Model m(s);
    return evaluate(m, sentence);
}

bool evaluate(const ColoredStructure& s, const PrenexSentence& p) { return evaluate(s, from_prenex(p)); }

ApexTuple constant_tuple(const ColoredStructure& s) {
    ApexTuple a;
    for (const auto& c : s.constants) a.push_back(c.value);
    return a;
}

namespace {

Pattern pattern_with(const BoundariedColoredGraph& g, const Model& m, int dp_cap) {
    Pattern p = boundary_skeleton(g);
    std::set<int> distinct;
    for (int v : g.boundary)
        if (v != BOT) distinct.insert(v);
    std::vector<int> d(distinct.begin(), distinct.end());
    std::set<IndexGraph> hp{IndexGraph{}};
    for (const auto& atom : proper_dp_atoms(static_cast<int>(d.size()), dp_cap)) {
        std::vector<VertexPair> pairs;
        for (auto [i, j] : atom) pairs.push_back({d[i], d[j]});
        if (m.dp(pairs)) hp.insert(lift_linkage(g.boundary, pairs));
    }
    p.hp.assign(hp.begin(), hp.end());
    return p;
}

}  // namespace

Pattern pattern_of(const BoundariedColoredGraph& g, int dp_cap) {
    Model m(g.base);
    return pattern_with(g, m, dp_cap);
}

Pattern pattern_of(const Model& m, const ApexTuple& apex, const std::vector<int>& boundary, int dp_cap) {
    BoundariedColoredGraph g{m.structure(), apex, boundary};
    return pattern_with(g, m, dp_cap);
}

bool realizes(const ColoredStructure& s, const std::vector<int>& tuple, const Pattern& h, int dp_cap) {
    if (static_cast<int>(tuple.size()) != h.r) throw InputError("tuple length does not match pattern arity");
    return pattern_of(BoundariedColoredGraph{s, constant_tuple(s), tuple}, dp_cap) == h;
}

}  // namespace dplk
