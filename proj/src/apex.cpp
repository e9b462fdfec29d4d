#include "dplk/apex.hpp"

#include <algorithm>
#include <set>

#include "dplk/error.hpp"
#include "dplk/semantics.hpp"

namespace dplk {

std::string apex_color_name(int i) { return "C" + std::to_string(i + 1); }
std::string apex_constant_name(int i) { return "a" + std::to_string(i + 1); }

ColoredStructure apex_project_structure(const ColoredStructure& s, const ApexTuple& a) {
    std::set<int> apex;
    for (int v : a) {
        if (v == BOT) continue;
        if (v < 0 || v >= s.n) throw InputError("invalid apex entry " + std::to_string(v));
        if (!apex.insert(v).second) throw InputError("apex entries not distinct: " + std::to_string(v));
    }
    ColoredStructure out = s;
    out.edges.clear();
    for (auto [u, v] : s.edges)
        if (apex.count(u) == apex.count(v)) out.edges.push_back({u, v});
    auto adj = s.adjacency();
    for (size_t i = 0; i < a.size(); ++i) {
        std::string cname = apex_color_name(static_cast<int>(i)), kname = apex_constant_name(static_cast<int>(i));
        if (s.find_unary(cname)) throw InputError("color name '" + cname + "' already used");
        if (s.constant_index(kname) >= 0) throw InputError("constant name '" + kname + "' already used");
        NamedSet c{cname, {}};
        if (a[i] != BOT)
            for (int w : adj[a[i]])
                if (!apex.count(w)) c.members.push_back(w);
        out.pcolors.push_back(c);
        out.constants.push_back({kname, a[i]});
    }
    out.normalize();
    return out;
}

ApexContext projection_context(int l) {
    ApexContext ctx;
    for (int i = 0; i < l; ++i) ctx.apex.push_back(cst(apex_constant_name(i)));
    ctx.same = [](const Term& a, const Term& b) { return eq(a, b); };
    ctx.adjacent = [](const Term& a, const Term& b) { return edge(a, b); };
    ctx.adjacent_to_apex = [](int i, const Term& y) { return mem(y, apex_color_name(i)); };
    ctx.present = [](int i) {
        Term c = cst(apex_constant_name(i));
        return eq(c, c);
    };
    for (int i = 0; i < l; ++i) ctx.group.push_back(i);
    return ctx;
}

struct ZetaBuilder::Active {
    int pair = 0;
    std::vector<int> order;   // apex indices along the path
    std::vector<Term> x;      // variables bound to those apices
    unsigned shifting = 0;    // bit j: a non-apex stretch follows apex j
    std::vector<Term> y, z;   // per j, valid when shifting
    std::vector<int> kind;    // per j: 0 single vertex, 1 edge, 2 longer
};

namespace {

std::vector<std::vector<std::vector<int>>> partitions_into(const std::vector<int>& items, int d) {
    std::vector<std::vector<std::vector<int>>> out;
    int n = static_cast<int>(items.size());
    std::vector<int> rgs(n, 0);
    std::function<void(int, int)> rec = [&](int i, int mx) {
        if (i == n) {
            if (mx + 1 != d) return;
            std::vector<std::vector<int>> blocks(d);
            for (int k = 0; k < n; ++k) blocks[rgs[k]].push_back(items[k]);
            out.push_back(blocks);
            return;
        }
        for (int b = 0; b <= std::min(mx + 1, d - 1); ++b) {
            rgs[i] = b;
            rec(i + 1, std::max(mx, b));
        }
    };
    rec(0, -1);
    return out;
}

std::vector<std::vector<int>> injections(int d, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::vector<bool> used(k, false);
    std::function<void()> rec = [&] {
        if (static_cast<int>(cur.size()) == d) {
            out.push_back(cur);
            return;
        }
        for (int j = 0; j < k; ++j) {
            if (used[j]) continue;
            used[j] = true;
            cur.push_back(j);
            rec();
            cur.pop_back();
            used[j] = false;
        }
    };
    rec();
    return out;
}

}  // namespace

ZetaBuilder::ZetaBuilder(ApexContext ctx, NameSupply& names, long long budget)
    : ctx_(std::move(ctx)), names_(names), budget_(budget) {
    if (ctx_.group.empty())
        for (size_t i = 0; i < ctx_.apex.size(); ++i) ctx_.group.push_back(static_cast<int>(i));
}

void ZetaBuilder::charge(long long n) {
    nodes_ += n;
    if (nodes_ > budget_)
        throw GuardError("apex-projection", "l=" + std::to_string(ctx_.apex.size()) + " needs more than " +
                                                std::to_string(budget_) + " formula nodes");
}

F ZetaBuilder::build(const std::vector<std::pair<Term, Term>>& pairs) {
    int l = static_cast<int>(ctx_.apex.size());
    if (l > 16) throw GuardError("apex-projection", "l=" + std::to_string(l) + " apices");
    unsigned all = (1u << l) - 1;
    if (!ctx_.present) return core(all, pairs);
    std::vector<F> ds;
    for (unsigned p = 0; p <= all; ++p) {
        std::vector<F> parts;
        for (int i = 0; i < l; ++i) parts.push_back((p >> i & 1u) ? ctx_.present(i) : neg(ctx_.present(i)));
        parts.push_back(core(p, pairs));
        ds.push_back(conj(parts));
    }
    return disj(ds);
}

F ZetaBuilder::core(unsigned present, const std::vector<std::pair<Term, Term>>& pairs) {
    int l = static_cast<int>(ctx_.apex.size());
    int k = static_cast<int>(pairs.size());
    std::vector<F> ds;
    for (unsigned b = 0; b <= present; ++b) {
        if ((b & present) != b) continue;
        std::vector<int> items;
        std::set<int> groups;
        bool ok = true;
        for (int i = 0; i < l; ++i)
            if (b >> i & 1u) {
                items.push_back(i);
                if (!groups.insert(ctx_.group[i]).second) ok = false;
            }
        if (!ok) continue;
        if (items.empty()) {
            std::vector<Active> none;
            ds.push_back(routed(present, pairs, none));
            continue;
        }
        for (int d = 1; d <= std::min(static_cast<int>(items.size()), k); ++d)
            for (const auto& blocks : partitions_into(items, d))
                for (const auto& rho : injections(d, k)) {
                    // Every ordering of every block.
                    std::vector<std::vector<int>> orders = blocks;
                    for (auto& o : orders) std::sort(o.begin(), o.end());
                    std::function<void(size_t)> each = [&](size_t bi) {
                        if (bi < orders.size()) {
                            std::vector<int> start = orders[bi];
                            do {
                                each(bi + 1);
                            } while (std::next_permutation(orders[bi].begin(), orders[bi].end()));
                            orders[bi] = start;
                            return;
                        }
                        std::vector<Active> act(d);
                        std::vector<std::string> xs;
                        std::vector<F> cons;
                        for (int i = 0; i < d; ++i) {
                            act[i].pair = rho[i];
                            act[i].order = orders[i];
                            for (int ai : orders[i]) {
                                std::string v = names_.fresh("x");
                                xs.push_back(v);
                                act[i].x.push_back(var(v));
                                cons.push_back(ctx_.same(var(v), ctx_.apex[ai]));
                            }
                        }
                        for (size_t p = 0; p < xs.size(); ++p)
                            for (size_t q = p + 1; q < xs.size(); ++q) cons.push_back(neq(var(xs[p]), var(xs[q])));
                        for (int i = 0; i < d; ++i)
                            for (int i2 = 0; i2 < d; ++i2) {
                                if (i == i2) continue;
                                const auto& [s2, t2] = pairs[act[i2].pair];
                                for (size_t j = 1; j + 1 < act[i].x.size(); ++j) {
                                    cons.push_back(neq(act[i].x[j], s2));
                                    cons.push_back(neq(act[i].x[j], t2));
                                }
                            }
                        ds.push_back(exists_block(xs, cons, routed(present, pairs, act)));
                    };
                    each(0);
                }
    }
    return disj(ds);
}

F ZetaBuilder::routed(unsigned present, const std::vector<std::pair<Term, Term>>& pairs, std::vector<Active>& act) {
    if (act.empty()) {
        std::vector<std::pair<Term, Term>> extra;
        return ends(present, pairs, act, 0, extra);
    }
    std::vector<F> ds;
    std::function<void(size_t)> choose = [&](size_t i) {
        if (i < act.size()) {
            unsigned gaps = static_cast<unsigned>(act[i].order.size()) - 1;
            for (unsigned j = 0; j < (1u << gaps); ++j) {
                act[i].shifting = j;
                choose(i + 1);
            }
            return;
        }
        std::vector<F> cons;
        std::vector<std::string> vars;
        std::vector<Term> ys, zs;
        std::vector<std::pair<size_t, size_t>> owner_y;  // (path, gap) of each y
        for (size_t p = 0; p < act.size(); ++p) {
            auto& a = act[p];
            size_t gaps = a.order.size() - 1;
            a.y.assign(gaps, Term{});
            a.z.assign(gaps, Term{});
            a.kind.assign(gaps, 0);
            for (size_t j = 0; j < gaps; ++j) {
                if (!(a.shifting >> j & 1u)) {
                    cons.push_back(ctx_.adjacent(a.x[j], a.x[j + 1]));
                    continue;
                }
                std::string yv = names_.fresh("y"), zv = names_.fresh("z");
                vars.push_back(yv);
                vars.push_back(zv);
                a.y[j] = var(yv);
                a.z[j] = var(zv);
                cons.push_back(ctx_.adjacent_to_apex(a.order[j], a.y[j]));
                cons.push_back(ctx_.adjacent_to_apex(a.order[j + 1], a.z[j]));
                ys.push_back(a.y[j]);
                zs.push_back(a.z[j]);
                owner_y.push_back({p, j});
            }
        }
        std::vector<Term> endpoints;
        for (const auto& [s, t] : pairs) {
            endpoints.push_back(s);
            endpoints.push_back(t);
        }
        for (const auto* list : {&ys, &zs}) {
            for (size_t p = 0; p < list->size(); ++p) {
                for (size_t q = p + 1; q < list->size(); ++q) cons.push_back(neq((*list)[p], (*list)[q]));
                for (const auto& e : endpoints) cons.push_back(neq((*list)[p], e));
            }
        }
        for (size_t p = 0; p < ys.size(); ++p)
            for (size_t q = 0; q < zs.size(); ++q)
                if (p != q) cons.push_back(neq(ys[p], zs[q]));
        ds.push_back(exists_block(vars, cons, segments(present, pairs, act, 0)));
    };
    choose(0);
    return disj(ds);
}

F ZetaBuilder::segments(unsigned present, const std::vector<std::pair<Term, Term>>& pairs, std::vector<Active>& act,
                        size_t i) {
    if (i == act.size()) {
        std::vector<std::pair<Term, Term>> extra;
        return ends(present, pairs, act, 0, extra);
    }
    auto& a = act[i];
    std::vector<size_t> gaps;
    for (size_t j = 0; j + 1 < a.order.size(); ++j)
        if (a.shifting >> j & 1u) gaps.push_back(j);
    size_t combos = 1;
    for (size_t g = 0; g < gaps.size(); ++g) combos *= 3;
    std::vector<F> ds;
    for (size_t c = 0; c < combos; ++c) {
        size_t code = c;
        std::vector<F> cons;
        for (size_t j : gaps) {
            a.kind[j] = static_cast<int>(code % 3);
            code /= 3;
            if (a.kind[j] == 0) cons.push_back(ctx_.same(a.y[j], a.z[j]));
            if (a.kind[j] == 1) cons.push_back(ctx_.adjacent(a.y[j], a.z[j]));
        }
        cons.push_back(segments(present, pairs, act, i + 1));
        ds.push_back(conj(cons));
    }
    return disj(ds);
}

// End types: 0 the endpoint is the apex, 1 the endpoint is adjacent to the
// apex, 2 one vertex lies between them, 3 a longer stretch lies between them.
F ZetaBuilder::ends(unsigned present, const std::vector<std::pair<Term, Term>>& pairs, std::vector<Active>& act,
                    size_t i, std::vector<std::pair<Term, Term>>& extra) {
    if (i == act.size()) {
        std::vector<std::pair<Term, Term>> all;
        std::set<int> active_pairs;
        for (const auto& a : act) active_pairs.insert(a.pair);
        for (size_t p = 0; p < pairs.size(); ++p)
            if (!active_pairs.count(static_cast<int>(p))) all.push_back(pairs[p]);
        all.insert(all.end(), extra.begin(), extra.end());
        for (const auto& a : act)
            for (size_t j = 0; j < a.kind.size(); ++j) {
                if (!(a.shifting >> j & 1u)) continue;
                if (a.kind[j] == 0) all.push_back({a.y[j], a.y[j]});
                if (a.kind[j] == 1) {
                    all.push_back({a.y[j], a.y[j]});
                    all.push_back({a.z[j], a.z[j]});
                }
                if (a.kind[j] == 2) all.push_back({a.y[j], a.z[j]});
            }
        for (size_t ai = 0; ai < ctx_.apex.size(); ++ai)
            if (present >> ai & 1u) all.push_back({ctx_.apex[ai], ctx_.apex[ai]});
        charge(static_cast<long long>(all.size()) * 3 + 8);
        if (all.empty()) return f_true();
        return dp(all);
    }
    const auto& a = act[i];
    const auto& [s, t] = pairs[a.pair];
    size_t q = a.order.size();
    bool direct_run = q == 2 && a.shifting == 0;
    std::vector<Term> others_s, others_t;
    for (size_t p = 0; p < pairs.size(); ++p)
        if (static_cast<int>(p) != a.pair) {
            others_s.push_back(pairs[p].first);
            others_s.push_back(pairs[p].second);
        }
    std::vector<F> ds;
    for (int pre = 0; pre < 4; ++pre)
        for (int suf = 0; suf < 4; ++suf) {
            // Reject configurations that give a single edge between distinct ends.
            if (q == 1 && ((pre == 0 && suf == 1) || (pre == 1 && suf == 0))) continue;
            if (direct_run && pre == 0 && suf == 0) continue;
            std::vector<F> cons;
            std::vector<std::string> vars;
            size_t mark = extra.size();
            auto side = [&](int type, const Term& end, const Term& apex_var, int apex_index, const char* hint) {
                if (type == 0) {
                    cons.push_back(ctx_.same(end, apex_var));
                    return;
                }
                cons.push_back(neq(end, apex_var));
                if (type == 1) {
                    cons.push_back(ctx_.adjacent_to_apex(apex_index, end));
                    extra.push_back({end, end});
                    return;
                }
                std::string v = names_.fresh(hint);
                vars.push_back(v);
                Term w = var(v);
                cons.push_back(ctx_.adjacent_to_apex(apex_index, w));
                for (const auto& o : others_s) cons.push_back(neq(w, o));
                if (type == 2) {
                    cons.push_back(ctx_.adjacent(end, w));
                    extra.push_back({end, end});
                    extra.push_back({w, w});
                } else {
                    cons.push_back(neq(w, end));
                    extra.push_back({end, w});
                }
            };
            side(pre, s, a.x.front(), a.order.front(), "s");
            side(suf, t, a.x.back(), a.order.back(), "t");
            F inner = ends(present, pairs, act, i + 1, extra);
            extra.resize(mark);
            ds.push_back(exists_block(vars, cons, inner));
        }
    return disj(ds);
}

F apex_project_sentence(const F& phi, int l, long long budget) {
    if (l < 0) throw InputError("apex count must be non-negative");
    if (has_op(phi, Op::Sdp)) throw InputError("apex projection is defined for dp atoms only, not sdp");
    for (const auto& c : constant_names(phi))
        for (int i = 0; i < l; ++i)
            if (c == apex_constant_name(i)) throw InputError("constant name '@" + c + "' clashes with an apex constant");
    NameSupply names(all_vars(phi));
    ZetaBuilder zb(projection_context(l), names, budget);
    return map_atoms(phi, [&](const Formula& f) -> F {
        if (f.op == Op::Edge) {
            const Term &x = f.terms[0], &y = f.terms[1];
            std::vector<F> ds{edge(x, y)};
            for (int i = 0; i < l; ++i) {
                Term c = cst(apex_constant_name(i));
                ds.push_back(disj2(conj2(eq(x, c), mem(y, apex_color_name(i))), conj2(eq(y, c), mem(x, apex_color_name(i)))));
            }
            return disj(ds);
        }
        if (f.op == Op::Dp) return zb.build(term_pairs(f));
        return nullptr;
    });
}

ProjectionCheck check_projection(const ColoredStructure& s, const ApexTuple& a, const F& phi, long long budget) {
    ProjectionCheck r;
    r.original = evaluate(s, phi);
    r.projected = evaluate(apex_project_structure(s, a), apex_project_sentence(phi, static_cast<int>(a.size()), budget));
    return r;
}

}  // namespace dplk
