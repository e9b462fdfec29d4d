#include "dplk/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "dplk/error.hpp"

namespace dplk {

int default_dp_cap(int r) { return r * (r + 1) / 2; }

DpAtom canonical_dp(std::vector<IndexPair> pairs) {
    for (auto& [a, b] : pairs)
        if (a > b) std::swap(a, b);
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

bool is_proper(const DpAtom& a) {
    std::set<int> seen;
    for (auto [u, v] : a) {
        if (!seen.insert(u).second) return false;
        if (u != v && !seen.insert(v).second) return false;
    }
    return true;
}

bool has_nonloop(const DpAtom& a) {
    return std::any_of(a.begin(), a.end(), [](const IndexPair& p) { return p.first != p.second; });
}

std::vector<DpAtom> proper_dp_atoms(int r, int cap) {
    std::vector<IndexPair> all;
    for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j) all.push_back({i, j});
    std::vector<DpAtom> out;
    DpAtom cur;
    std::vector<bool> used(r, false);
    std::function<void(size_t)> rec = [&](size_t from) {
        if (!cur.empty() && has_nonloop(cur)) out.push_back(cur);
        if (static_cast<int>(cur.size()) >= cap) return;
        for (size_t k = from; k < all.size(); ++k) {
            auto [i, j] = all[k];
            if (used[i] || used[j]) continue;
            used[i] = used[j] = true;
            cur.push_back(all[k]);
            rec(k + 1);
            cur.pop_back();
            used[i] = used[j] = false;
        }
    };
    rec(0);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

int var_index(const DnfShape& shape, const Term& t) {
    if (t.constant) return -1;
    auto it = std::find(shape.vars.begin(), shape.vars.end(), t.name);
    if (it == shape.vars.end()) throw InputError("variable '" + t.name + "' is not among the free variables");
    return static_cast<int>(it - shape.vars.begin());
}

int const_pos(const DnfShape& shape, const Term& t) {
    auto it = std::find(shape.voc.constants.begin(), shape.voc.constants.end(), t.name);
    if (it == shape.voc.constants.end()) throw InputError("unknown constant '@" + t.name + "'");
    return static_cast<int>(it - shape.voc.constants.begin());
}

void no_constants(const Formula& f) {
    for (const auto& t : f.terms)
        if (t.constant) throw InputError("constants may only appear in atoms of the form x = @c");
}

// Number of canonical dp multisets of arity 1..cap over r(r+1)/2 pairs.
double nominal_dp_atoms(int r, int cap) {
    double p = r * (r + 1) / 2.0;
    if (p == 0) return 0;
    return std::exp(std::lgamma(p + cap + 1) - std::lgamma(cap + 1) - std::lgamma(p + 1)) - 1;
}

std::vector<std::vector<int>> set_partitions(int r) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(r, 0);
    std::function<void(int, int)> rec = [&](int i, int mx) {
        if (i == r) {
            out.push_back(cur);
            return;
        }
        for (int b = 0; b <= mx + 1; ++b) {
            cur[i] = b;
            rec(i + 1, std::max(mx, b));
        }
    };
    if (r == 0)
        out.push_back({});
    else
        rec(0, -1);
    return out;
}

// Down-closed families of block atoms: removing a pair keeps truth as long
// as a non-loop pair remains.
std::vector<std::vector<DpAtom>> down_closed(const std::vector<DpAtom>& atoms) {
    if (atoms.size() > 24) throw GuardError("dnf-dp-atoms", "too many dp atoms per clause: " + std::to_string(atoms.size()));
    std::map<DpAtom, int> pos;
    for (size_t i = 0; i < atoms.size(); ++i) pos[atoms[i]] = static_cast<int>(i);
    std::vector<unsigned> below(atoms.size(), 0);
    for (size_t i = 0; i < atoms.size(); ++i)
        for (size_t k = 0; k < atoms[i].size(); ++k) {
            DpAtom sub = atoms[i];
            sub.erase(sub.begin() + static_cast<long>(k));
            auto it = pos.find(sub);
            if (it != pos.end()) below[i] |= 1u << it->second;
        }
    std::vector<std::vector<DpAtom>> out;
    for (unsigned mask = 0; mask < (1u << atoms.size()); ++mask) {
        bool ok = true;
        for (size_t i = 0; i < atoms.size() && ok; ++i)
            if ((mask >> i & 1u) && (below[i] & ~mask)) ok = false;
        if (!ok) continue;
        std::vector<DpAtom> fam;
        for (size_t i = 0; i < atoms.size(); ++i)
            if (mask >> i & 1u) fam.push_back(atoms[i]);
        out.push_back(std::move(fam));
    }
    return out;
}

}  // namespace

std::vector<F> atom_family(const DnfShape& shape) {
    int r = shape.r();
    std::vector<F> out;
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) out.push_back(eq(var(shape.vars[i]), var(shape.vars[j])));
    for (int i = 0; i < r; ++i)
        for (const auto& c : shape.voc.constants) out.push_back(eq(var(shape.vars[i]), cst(c)));
    for (int i = 0; i < r; ++i)
        for (const auto& u : shape.voc.unary()) out.push_back(mem(var(shape.vars[i]), u));
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) out.push_back(edge(var(shape.vars[i]), var(shape.vars[j])));
    for (const auto& a : proper_dp_atoms(r, shape.dp_cap)) {
        std::vector<std::pair<Term, Term>> pairs;
        for (auto [i, j] : a) pairs.push_back({var(shape.vars[i]), var(shape.vars[j])});
        out.push_back(dp(pairs));
    }
    return out;
}

bool decide(const FullAssignment& a, const Formula& atom, const DnfShape& shape) {
    switch (atom.op) {
        case Op::True:
            return true;
        case Op::False:
            return false;
        case Op::Eq: {
            const Term &s = atom.terms[0], &t = atom.terms[1];
            if (s.constant && t.constant) throw InputError("constants may only appear in atoms of the form x = @c");
            if (s.constant || t.constant) {
                const Term& v = s.constant ? t : s;
                const Term& c = s.constant ? s : t;
                return a.const_block[const_pos(shape, c)] == a.block[var_index(shape, v)];
            }
            return a.block[var_index(shape, s)] == a.block[var_index(shape, t)];
        }
        case Op::Mem: {
            no_constants(atom);
            int b = a.block[var_index(shape, atom.terms[0])];
            const auto& colors = shape.voc.colors;
            const auto& pcolors = shape.voc.pcolors;
            auto c = std::find(colors.begin(), colors.end(), atom.name);
            if (c != colors.end()) return a.color[b] == c - colors.begin();
            auto p = std::find(pcolors.begin(), pcolors.end(), atom.name);
            if (p != pcolors.end()) return a.pcolor[b] >> (p - pcolors.begin()) & 1u;
            throw InputError("unknown color '" + atom.name + "'");
        }
        case Op::Edge: {
            no_constants(atom);
            int u = a.block[var_index(shape, atom.terms[0])], v = a.block[var_index(shape, atom.terms[1])];
            if (u == v) return false;
            return std::binary_search(a.edges.begin(), a.edges.end(), IndexPair{std::min(u, v), std::max(u, v)});
        }
        case Op::Dp: {
            no_constants(atom);
            std::vector<IndexPair> pairs;
            for (const auto& [s, t] : term_pairs(atom))
                pairs.push_back({a.block[var_index(shape, s)], a.block[var_index(shape, t)]});
            DpAtom d = canonical_dp(pairs);
            if (!is_proper(d)) return false;
            if (!has_nonloop(d)) return true;
            if (static_cast<int>(d.size()) > shape.dp_cap)
                throw InputError("dp arity " + std::to_string(d.size()) + " exceeds dp_cap " + std::to_string(shape.dp_cap));
            return std::binary_search(a.dp.begin(), a.dp.end(), d);
        }
        case Op::Sdp:
            throw InputError("sdp atoms are not supported by full-DNF expansion");
        case Op::InAnnot:
            throw InputError("annotation membership is not supported by full-DNF expansion");
        default:
            throw DefectError("decide called on a non-atom");
    }
}

std::vector<FullAssignment> all_assignments(const DnfShape& shape, long long budget) {
    int r = shape.r();
    int h = static_cast<int>(shape.voc.colors.size());
    int pc = static_cast<int>(shape.voc.pcolors.size());
    int l = static_cast<int>(shape.voc.constants.size());
    if (pc > 16) throw GuardError("dnf-clauses", "too many projected colors: " + std::to_string(pc));
    double nominal = nominal_dp_atoms(r, shape.dp_cap);
    if (nominal > static_cast<double>(budget))
        throw GuardError("dnf-atom-family", "r=" + std::to_string(r) + " dp_cap=" + std::to_string(shape.dp_cap) +
                                                " gives about " + std::to_string(static_cast<long long>(std::min(nominal, 1e18))) +
                                                " dp atoms, budget " + std::to_string(budget));
    auto partitions = set_partitions(r);
    std::map<int, std::vector<std::vector<DpAtom>>> dp_choices;
    double total = 0;
    for (const auto& part : partitions) {
        int b = part.empty() ? 0 : *std::max_element(part.begin(), part.end()) + 1;
        if (!dp_choices.count(b)) dp_choices[b] = down_closed(proper_dp_atoms(b, shape.dp_cap));
        double count = std::pow(b + 1.0, l) * std::pow((h + 1.0) * std::pow(2.0, pc), b) *
                       std::pow(2.0, b * (b - 1) / 2.0) * static_cast<double>(dp_choices[b].size());
        total += count;
    }
    if (total > static_cast<double>(budget))
        throw GuardError("dnf-clauses", "r=" + std::to_string(r) + " dp_cap=" + std::to_string(shape.dp_cap) +
                                            " needs " + std::to_string(static_cast<long long>(std::min(total, 1e18))) +
                                            " clauses, budget " + std::to_string(budget));
    std::vector<FullAssignment> out;
    for (const auto& part : partitions) {
        int b = part.empty() ? 0 : *std::max_element(part.begin(), part.end()) + 1;
        std::vector<IndexPair> bpairs;
        for (int i = 0; i < b; ++i)
            for (int j = i + 1; j < b; ++j) bpairs.push_back({i, j});
        FullAssignment a;
        a.block = part;
        a.const_block.assign(l, -1);
        a.color.assign(b, -1);
        a.pcolor.assign(b, 0);
        std::function<void(int)> consts, colors, pcolors;
        auto finish = [&] {
            for (unsigned em = 0; em < (1u << bpairs.size()); ++em) {
                a.edges.clear();
                for (size_t k = 0; k < bpairs.size(); ++k)
                    if (em >> k & 1u) a.edges.push_back(bpairs[k]);
                for (const auto& fam : dp_choices[b]) {
                    a.dp = fam;
                    out.push_back(a);
                }
            }
        };
        pcolors = [&](int blk) {
            if (blk == b) return finish();
            for (unsigned m = 0; m < (1u << pc); ++m) {
                a.pcolor[blk] = m;
                pcolors(blk + 1);
            }
        };
        colors = [&](int blk) {
            if (blk == b) return pcolors(0);
            for (int c = -1; c < h; ++c) {
                a.color[blk] = c;
                colors(blk + 1);
            }
        };
        consts = [&](int c) {
            if (c == l) return colors(0);
            for (int blk = -1; blk < b; ++blk) {
                a.const_block[c] = blk;
                consts(c + 1);
            }
        };
        consts(0);
    }
    return out;
}

namespace {

bool eval_under(const F& f, const FullAssignment& a, const DnfShape& shape) {
    switch (f->op) {
        case Op::Not:
            return !eval_under(f->kids[0], a, shape);
        case Op::And:
            for (const auto& k : f->kids)
                if (!eval_under(k, a, shape)) return false;
            return true;
        case Op::Or:
            for (const auto& k : f->kids)
                if (eval_under(k, a, shape)) return true;
            return false;
        case Op::Exists:
        case Op::Forall:
            throw InputError("full-DNF input must be quantifier-free");
        default:
            return decide(a, *f, shape);
    }
}

void check_input(const F& m, const DnfShape& shape) {
    if (has_op(m, Op::Exists) || has_op(m, Op::Forall)) throw InputError("full-DNF input must be quantifier-free");
    for (const auto& v : free_vars(m))
        if (std::find(shape.vars.begin(), shape.vars.end(), v) == shape.vars.end())
            throw InputError("variable '" + v + "' is not among the free variables");
    Vocabulary voc = shape.voc;
    check_vocabulary(m, voc);
    if (max_dp_arity(m) > shape.dp_cap)
        throw InputError("dp arity " + std::to_string(max_dp_arity(m)) + " exceeds dp_cap " + std::to_string(shape.dp_cap));
}

}  // namespace

Clause FullDnf::clause(size_t i) const {
    Clause c;
    for (const auto& atom : family) c.push_back({atom, decide(clauses[i], *atom, shape)});
    return c;
}

F FullDnf::to_formula() const {
    std::vector<F> ds;
    for (size_t i = 0; i < clauses.size(); ++i) {
        std::vector<F> lits;
        for (const auto& [atom, pos] : clause(i)) lits.push_back(pos ? atom : neg(atom));
        ds.push_back(conj(lits));
    }
    return disj(ds);
}

FullDnf to_full_dnf(const F& m, const DnfShape& shape, long long budget) {
    check_input(m, shape);
    FullDnf out;
    out.shape = shape;
    out.family = atom_family(shape);
    for (auto& a : all_assignments(shape, budget))
        if (eval_under(m, a, shape)) out.clauses.push_back(std::move(a));
    std::sort(out.clauses.begin(), out.clauses.end());
    return out;
}

Pattern assignment_pattern(const FullAssignment& a, const DnfShape& shape) {
    Pattern p;
    int r = shape.r();
    int h = static_cast<int>(shape.voc.colors.size());
    p.r = r;
    p.parts.assign(a.blocks(), {});
    for (int i = 0; i < r; ++i) p.parts[a.block[i]].push_back(i);
    for (int i = 0; i < r; ++i) {
        int b = a.block[i];
        for (size_t c = 0; c < a.const_block.size(); ++c)
            if (a.const_block[c] == b) p.kappa.push_back({i, static_cast<int>(c)});
        if (a.color[b] >= 0) p.delta.push_back({i, a.color[b]});
        for (size_t k = 0; k < shape.voc.pcolors.size(); ++k)
            if (a.pcolor[b] >> k & 1u) p.delta.push_back({i, h + static_cast<int>(k)});
        for (int j = i + 1; j < r; ++j) {
            int c = a.block[j];
            if (b != c && std::binary_search(a.edges.begin(), a.edges.end(), IndexPair{std::min(b, c), std::max(b, c)}))
                p.he.push_back({i, j});
        }
    }
    std::set<IndexGraph> hp{IndexGraph{}};
    for (const auto& m : a.dp) {
        IndexGraph g;
        for (int i = 0; i < r; ++i)
            for (int j = i; j < r; ++j) {
                IndexPair bp{std::min(a.block[i], a.block[j]), std::max(a.block[i], a.block[j])};
                if (std::binary_search(m.begin(), m.end(), bp)) g.push_back({i, j});
            }
        hp.insert(g);
    }
    p.hp.assign(hp.begin(), hp.end());
    return p;
}

namespace {

// Canonical text key of an atom over the shape's variables.
std::string atom_key(const Formula& f, const DnfShape& shape) {
    switch (f.op) {
        case Op::Eq: {
            Term s = f.terms[0], t = f.terms[1];
            if (s.constant && !t.constant) std::swap(s, t);
            if (!s.constant && !t.constant && var_index(shape, s) > var_index(shape, t)) std::swap(s, t);
            return to_string(eq(s, t));
        }
        case Op::Edge: {
            Term s = f.terms[0], t = f.terms[1];
            if (var_index(shape, s) > var_index(shape, t)) std::swap(s, t);
            return to_string(edge(s, t));
        }
        case Op::Dp: {
            std::vector<IndexPair> pairs;
            for (const auto& [s, t] : term_pairs(f)) pairs.push_back({var_index(shape, s), var_index(shape, t)});
            std::vector<std::pair<Term, Term>> terms;
            for (auto [i, j] : canonical_dp(pairs)) terms.push_back({var(shape.vars[i]), var(shape.vars[j])});
            return to_string(dp(terms));
        }
        default: {
            auto copy = std::make_shared<Formula>(f);
            return to_string(copy);
        }
    }
}

}  // namespace

Pattern clause_pattern(const Clause& c, const DnfShape& shape) {
    int r = shape.r();
    std::map<std::string, bool> sign;
    std::map<std::string, F> atoms;
    bool conflict = false;
    for (const auto& [atom, pos] : c) {
        std::string k = atom_key(*atom, shape);
        auto it = sign.find(k);
        if (it != sign.end() && it->second != pos) conflict = true;
        sign[k] = pos;
        atoms[k] = atom;
    }
    for (const auto& f : atom_family(shape))
        if (!sign.count(atom_key(*f, shape))) throw InputError("clause is not full: missing " + to_string(f));
    if (conflict) return Pattern::empty_pattern(r);

    std::vector<int> parent(r);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const auto& [k, pos] : sign) {
        const auto& f = *atoms[k];
        if (f.op == Op::Eq && pos && !f.terms[0].constant && !f.terms[1].constant)
            parent[find(var_index(shape, f.terms[0]))] = find(var_index(shape, f.terms[1]));
    }
    FullAssignment a;
    a.block.assign(r, -1);
    std::map<int, int> root_block;
    for (int i = 0; i < r; ++i) {
        int root = find(i);
        if (!root_block.count(root)) root_block[root] = static_cast<int>(root_block.size());
        a.block[i] = root_block[root];
    }
    int b = static_cast<int>(root_block.size());
    for (const auto& [k, pos] : sign) {
        const auto& f = *atoms[k];
        if (f.op == Op::Eq && !pos && !f.terms[0].constant && !f.terms[1].constant &&
            a.block[var_index(shape, f.terms[0])] == a.block[var_index(shape, f.terms[1])])
            return Pattern::empty_pattern(r);
    }

    int h = static_cast<int>(shape.voc.colors.size());
    a.const_block.assign(shape.voc.constants.size(), -1);
    a.color.assign(b, -1);
    a.pcolor.assign(b, 0);
    std::set<IndexPair> edges;
    std::set<DpAtom> dps;
    for (const auto& [k, pos] : sign) {
        if (!pos) continue;
        const auto& f = *atoms[k];
        if (f.op == Op::Eq && (f.terms[0].constant || f.terms[1].constant)) {
            const Term& v = f.terms[0].constant ? f.terms[1] : f.terms[0];
            const Term& cc = f.terms[0].constant ? f.terms[0] : f.terms[1];
            a.const_block[const_pos(shape, cc)] = a.block[var_index(shape, v)];
        } else if (f.op == Op::Mem) {
            int blk = a.block[var_index(shape, f.terms[0])];
            auto unary = shape.voc.unary();
            int u = static_cast<int>(std::find(unary.begin(), unary.end(), f.name) - unary.begin());
            if (u < h)
                a.color[blk] = u;
            else
                a.pcolor[blk] |= 1u << (u - h);
        } else if (f.op == Op::Edge) {
            int u = a.block[var_index(shape, f.terms[0])], v = a.block[var_index(shape, f.terms[1])];
            if (u != v) edges.insert({std::min(u, v), std::max(u, v)});
        } else if (f.op == Op::Dp) {
            std::vector<IndexPair> pairs;
            for (const auto& [s, t] : term_pairs(f))
                pairs.push_back({a.block[var_index(shape, s)], a.block[var_index(shape, t)]});
            DpAtom d = canonical_dp(pairs);
            if (is_proper(d) && has_nonloop(d) && static_cast<int>(d.size()) <= shape.dp_cap) dps.insert(d);
        }
    }
    a.edges.assign(edges.begin(), edges.end());
    a.dp.assign(dps.begin(), dps.end());
    for (const auto& d : a.dp)
        for (size_t k = 0; k < d.size(); ++k) {
            DpAtom sub = d;
            sub.erase(sub.begin() + static_cast<long>(k));
            if (has_nonloop(sub) && !dps.count(sub)) return Pattern::empty_pattern(r);
        }
    for (const auto& [k, pos] : sign)
        if (decide(a, *atoms[k], shape) != pos) return Pattern::empty_pattern(r);
    return assignment_pattern(a, shape);
}

std::vector<Pattern> ext_patterns(const F& m, const DnfShape& shape, long long budget) {
    FullDnf d = to_full_dnf(m, shape, budget);
    std::set<Pattern> out;
    for (const auto& a : d.clauses) out.insert(assignment_pattern(a, shape));
    return {out.begin(), out.end()};
}

}  // namespace dplk
