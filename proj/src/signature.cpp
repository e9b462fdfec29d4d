#include "dplk/signature.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "dplk/error.hpp"

namespace dplk {

std::vector<std::string> TypeShape::vars() const {
    std::vector<std::string> v;
    for (int i = 1; i <= r; ++i) v.push_back("x" + std::to_string(i));
    return v;
}

std::vector<F> TypeShape::family() const {
    std::vector<F> out;
    auto v = vars();
    for (const auto& x : v) out.push_back(eq(var(x), var(x)));
    auto rest = atom_family(dnf());
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

TypeShape type_shape(const ColoredStructure& s, int r, int dp_cap) {
    if (r < 0) throw InputError("rank must be non-negative");
    if (dp_cap < 0) dp_cap = default_dp_cap(r);
    return {r, vocabulary_of(s), dp_cap};
}

SigNode make_type(std::vector<int> atoms, const std::vector<F>& family) {
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    SigNode n;
    n.depth = 0;
    n.text = "<";
    for (size_t i = 0; i < atoms.size(); ++i) n.text += (i ? "; " : "") + to_string(family.at(atoms[i]));
    n.text += ">";
    n.atoms = std::move(atoms);
    return n;
}

SigNode make_set(std::vector<SigNode> elems) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    SigNode n;
    n.depth = elems.empty() ? 1 : elems[0].depth + 1;
    n.text = "{";
    for (size_t i = 0; i < elems.size(); ++i) {
        if (elems[i].depth + 1 != n.depth) throw DefectError("mixed depths in signature set");
        n.text += (i ? ", " : "") + elems[i].text;
    }
    n.text += "}";
    n.elems = std::move(elems);
    return n;
}

namespace {

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    return out;
}

std::vector<std::string> split_names(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

struct SigParser {
    const std::string& t;
    size_t p;
    std::map<std::string, int> index;
    const std::vector<F>& family;

    [[noreturn]] void fail(const std::string& msg) const {
        throw InputError("signature syntax error at offset " + std::to_string(p) + ": " + msg);
    }
    SigNode node() {
        if (p >= t.size()) fail("unexpected end");
        if (t[p] == '<') {
            size_t close = t.find('>', p);
            if (close == std::string::npos) fail("unterminated type");
            std::string body = t.substr(p + 1, close - p - 1);
            p = close + 1;
            std::vector<int> atoms;
            size_t start = 0;
            while (start < body.size()) {
                size_t end = body.find("; ", start);
                std::string a = body.substr(start, end == std::string::npos ? std::string::npos : end - start);
                auto it = index.find(a);
                if (it == index.end()) fail("unknown atom '" + a + "'");
                atoms.push_back(it->second);
                if (end == std::string::npos) break;
                start = end + 2;
            }
            return make_type(atoms, family);
        }
        if (t[p] != '{') fail("expected '{' or '<'");
        ++p;
        std::vector<SigNode> elems;
        if (p < t.size() && t[p] == '}') {
            ++p;
            return make_set(elems);
        }
        while (true) {
            elems.push_back(node());
            if (p < t.size() && t[p] == '}') {
                ++p;
                break;
            }
            if (t.compare(p, 2, ", ") != 0) fail("expected ', ' or '}'");
            p += 2;
        }
        return make_set(elems);
    }
};

}  // namespace

std::string serialize_signature(const Signature& s) {
    std::ostringstream o;
    o << "signature r=" << s.shape.r << " cap=" << s.shape.dp_cap << " colors=" << join(s.shape.voc.colors)
      << " pcolors=" << join(s.shape.voc.pcolors) << " constants=" << join(s.shape.voc.constants) << "\n"
      << s.root.text << "\n";
    return o.str();
}

Signature parse_signature(const std::string& text) {
    std::istringstream in(text);
    std::string header, body;
    std::getline(in, header);
    std::getline(in, body);
    std::istringstream hs(header);
    std::string word;
    hs >> word;
    if (word != "signature") throw InputError("signature header must start with 'signature'");
    Signature sig;
    bool have_r = false, have_cap = false;
    while (hs >> word) {
        auto eqpos = word.find('=');
        if (eqpos == std::string::npos) throw InputError("malformed signature header field '" + word + "'");
        std::string key = word.substr(0, eqpos), val = word.substr(eqpos + 1);
        try {
            if (key == "r") {
                sig.shape.r = std::stoi(val);
                have_r = true;
            } else if (key == "cap") {
                sig.shape.dp_cap = std::stoi(val);
                have_cap = true;
            } else if (key == "colors")
                sig.shape.voc.colors = split_names(val);
            else if (key == "pcolors")
                sig.shape.voc.pcolors = split_names(val);
            else if (key == "constants")
                sig.shape.voc.constants = split_names(val);
            else
                throw InputError("unknown signature header field '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw InputError("malformed number in signature header field '" + key + "'");
        }
    }
    if (!have_r || !have_cap) throw InputError("signature header needs r= and cap=");
    auto family = sig.shape.family();
    SigParser ps{body, 0, {}, family};
    for (size_t i = 0; i < family.size(); ++i) ps.index[to_string(family[i])] = static_cast<int>(i);
    sig.root = ps.node();
    if (ps.p != body.size()) ps.fail("trailing input");
    int want = sig.shape.r;
    if (sig.root.depth != want && !(want == 0 && sig.root.depth == 0)) throw InputError("signature depth does not match r");
    return sig;
}

bool signature_equal(const Signature& a, const Signature& b) {
    if (!(a.shape == b.shape))
        throw InputError("signatures built with different shapes (r, vocabulary or dp_cap) cannot be compared");
    return a.root == b.root;
}

namespace {

struct TypeEvaluator {
    const Model& m;
    std::vector<F> family;
    std::vector<CompiledFormula> atoms;

    TypeEvaluator(const Model& model, const TypeShape& shape) : m(model), family(shape.family()) {
        auto vars = shape.vars();
        for (const auto& f : family) atoms.emplace_back(f, m, vars);
    }
    std::vector<int> type(const std::vector<int>& tuple) const {
        std::vector<int> out;
        for (size_t i = 0; i < atoms.size(); ++i)
            if (atoms[i].eval(tuple)) out.push_back(static_cast<int>(i));
        return out;
    }
};

AssignmentNode build_node(const TypeEvaluator& te, const std::vector<std::vector<int>>& ranges, std::vector<int>& tuple,
                          size_t level) {
    AssignmentNode node;
    if (level == ranges.size()) {
        node.sig = make_type(te.type(tuple), te.family);
        return node;
    }
    std::vector<int> choices = ranges[level];
    choices.push_back(BOT);
    std::set<std::string> seen;
    std::vector<SigNode> sigs;
    for (int v : choices) {
        tuple[level] = v;
        AssignmentNode child = build_node(te, ranges, tuple, level + 1);
        child.label = v;
        if (!seen.insert(child.sig.text).second) continue;
        sigs.push_back(child.sig);
        node.kids.push_back(std::move(child));
    }
    tuple[level] = BOT;
    node.sig = make_set(std::move(sigs));
    return node;
}

void check_ranges(const ColoredStructure& s, std::vector<std::vector<int>>& ranges) {
    for (auto& r : ranges) {
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        for (int v : r)
            if (v < 0 || v >= s.n) throw InputError("annotation range entry out of range: " + std::to_string(v));
    }
}

}  // namespace

std::vector<int> atomic_type(const Model& m, const TypeShape& shape, const std::vector<int>& tuple) {
    if (static_cast<int>(tuple.size()) != shape.r) throw InputError("tuple length does not match r");
    return TypeEvaluator(m, shape).type(tuple);
}

std::vector<std::vector<int>> full_ranges(const ColoredStructure& s, int r) {
    std::vector<int> all(s.n);
    for (int i = 0; i < s.n; ++i) all[i] = i;
    return std::vector<std::vector<int>>(r, all);
}

AssignmentNode build_assignment(const ColoredStructure& s, const std::vector<std::vector<int>>& ranges0, int dp_cap) {
    auto ranges = ranges0;
    check_ranges(s, ranges);
    Model m(s);
    TypeShape shape = type_shape(s, static_cast<int>(ranges.size()), dp_cap);
    TypeEvaluator te(m, shape);
    std::vector<int> tuple(ranges.size(), BOT);
    return build_node(te, ranges, tuple, 0);
}

Signature signature(const ColoredStructure& s, const std::vector<std::vector<int>>& ranges, int dp_cap) {
    Signature sig;
    sig.shape = type_shape(s, static_cast<int>(ranges.size()), dp_cap);
    sig.root = build_assignment(s, ranges, sig.shape.dp_cap).sig;
    return sig;
}

Signature signature(const ColoredStructure& s, int r, int dp_cap) { return signature(s, full_ranges(s, r), dp_cap); }

Pattern pattern_coloring(const ColoredStructure& s, const std::vector<int>& leaf_labels, int dp_cap) {
    return pattern_of(BoundariedColoredGraph{s, constant_tuple(s), leaf_labels}, dp_cap);
}

SpanningResult check_via_spanning_tree(const ColoredStructure& s, const PrenexSentence& p, int dp_cap) {
    int r = static_cast<int>(p.prefix.size());
    if (dp_cap < 0) dp_cap = default_dp_cap(r);
    std::vector<std::vector<int>> ranges;
    std::vector<std::string> vars;
    for (const auto& q : p.prefix) {
        if (q.annot) {
            if (q.annot > static_cast<int>(s.annotations.size()))
                throw InputError("unknown annotation index " + std::to_string(q.annot));
            ranges.push_back(s.annotations[q.annot - 1]);
        } else {
            ranges.push_back(full_ranges(s, 1)[0]);
        }
        vars.push_back(q.var);
    }
    std::set<std::string> distinct(vars.begin(), vars.end());
    if (distinct.size() != vars.size()) throw InputError("prefix variables must be distinct");
    AssignmentNode root = build_assignment(s, ranges, dp_cap);

    Model m(s);
    CompiledFormula matrix(p.matrix, m, vars);
    DnfShape shape{vars, vocabulary_of(s), dp_cap};
    auto hpsi = ext_patterns(p.matrix, shape);
    std::set<Pattern> hset(hpsi.begin(), hpsi.end());
    ApexTuple apex = constant_tuple(s);

    std::vector<int> tuple(r, BOT);
    std::function<bool(const AssignmentNode&, int, bool)> span = [&](const AssignmentNode& node, int level, bool patterns) {
        if (level == r) {
            if (patterns) return hset.count(pattern_of(m, apex, tuple, dp_cap)) > 0;
            return matrix.eval(tuple);
        }
        bool ex = p.prefix[level].exists;
        for (const auto& kid : node.kids) {
            if (kid.label == BOT) continue;
            tuple[level] = kid.label;
            bool ok = span(kid, level + 1, patterns);
            tuple[level] = BOT;
            if (ok == ex) return ex;
        }
        return !ex;
    };
    SpanningResult res;
    res.by_matrix = span(root, 0, false);
    res.by_patterns = span(root, 0, true);
    return res;
}

namespace {

// Variables (by index) mentioned by each family atom.
std::vector<std::set<int>> atom_vars(const TypeShape& shape, const std::vector<F>& family) {
    auto vars = shape.vars();
    std::vector<std::set<int>> out;
    for (const auto& f : family) {
        std::set<int> idx;
        for (const auto& v : free_vars(f))
            idx.insert(static_cast<int>(std::find(vars.begin(), vars.end(), v) - vars.begin()));
        out.push_back(idx);
    }
    return out;
}

// 1 if every leaf type has atom a, 0 if none has it, -1 if mixed.
int leaf_status(const SigNode& n, int a) {
    if (n.depth == 0) return std::binary_search(n.atoms.begin(), n.atoms.end(), a) ? 1 : 0;
    int st = -2;
    for (const auto& e : n.elems) {
        int s = leaf_status(e, a);
        if (s == -1) return -1;
        if (st == -2)
            st = s;
        else if (st != s)
            return -1;
    }
    return st == -2 ? 1 : st;
}

SigNode project(const SigNode& n, int k, const std::vector<std::set<int>>& mentions, const std::vector<F>& family) {
    if (n.depth == 0) {
        std::vector<int> keep;
        for (int a : n.atoms)
            if (!mentions[a].count(k)) keep.push_back(a);
        return make_type(keep, family);
    }
    std::vector<SigNode> elems;
    for (const auto& e : n.elems) elems.push_back(project(e, k, mentions, family));
    return make_set(elems);
}

F sentence_of(const SigNode& n, int bound, const TypeShape& shape, const std::vector<F>& family,
              const std::vector<std::set<int>>& mentions) {
    if (n.depth == 0) {
        std::vector<F> lits;
        for (size_t i = 0; i < family.size(); ++i)
            lits.push_back(std::binary_search(n.atoms.begin(), n.atoms.end(), static_cast<int>(i)) ? family[i]
                                                                                                 : neg(family[i]));
        return conj(lits);
    }
    const SigNode* bot = nullptr;
    std::vector<const SigNode*> real;
    for (const auto& e : n.elems) {
        int st = leaf_status(e, bound);
        if (st == -1) return f_false();
        if (st == 1)
            real.push_back(&e);
        else if (bot)
            return f_false();
        else
            bot = &e;
    }
    if (!bot || real.empty()) return f_false();
    for (const auto* e : real)
        if (!(project(*e, bound, mentions, family) == *bot)) return f_false();
    std::string x = "x" + std::to_string(bound + 1);
    std::vector<F> parts, options;
    for (const auto* e : real) {
        F sub = sentence_of(*e, bound + 1, shape, family, mentions);
        parts.push_back(exists(x, sub));
        options.push_back(sub);
    }
    parts.push_back(forall(x, disj(options)));
    return conj(parts);
}

}  // namespace

F signature_to_sentence(const Signature& beta) {
    auto family = beta.shape.family();
    auto mentions = atom_vars(beta.shape, family);
    if (beta.shape.r == 0) return f_true();
    return sentence_of(beta.root, 0, beta.shape, family, mentions);
}

std::vector<std::vector<int>> reduce_annotation(const ColoredStructure& s, std::vector<std::vector<int>> ranges,
                                                int dp_cap) {
    check_ranges(s, ranges);
    Signature target = signature(s, ranges, dp_cap);
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& level : ranges) {
            std::vector<int> snapshot = level;
            for (int v : snapshot) {
                auto it = std::find(level.begin(), level.end(), v);
                level.erase(it);
                if (signature(s, ranges, dp_cap) == target) {
                    changed = true;
                } else {
                    level.insert(std::lower_bound(level.begin(), level.end(), v), v);
                }
            }
        }
    }
    return ranges;
}

AgreementReport check_sentence_agreement(const ColoredStructure& s1, const ColoredStructure& s2, int r, int dp_cap,
                          const std::vector<F>& corpus) {
    AgreementReport rep;
    rep.equal_signatures = signature_equal(signature(s1, r, dp_cap), signature(s2, r, dp_cap));
    if (!rep.equal_signatures) return rep;
    Model m1(s1), m2(s2);
    for (const auto& f : corpus) {
        if (quantifier_rank(f) > r) continue;
        ++rep.checked;
        if (evaluate(m1, f) != evaluate(m2, f)) rep.counterexamples.push_back(to_string(f));
    }
    return rep;
}

}  // namespace dplk
