#include "suites.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

#include "dplk/apex.hpp"
#include "dplk/error.hpp"
#include "dplk/gadgets.hpp"
#include "dplk/normal_form.hpp"
#include "dplk/paths.hpp"
#include "dplk/problems.hpp"
#include "dplk/semantics.hpp"
#include "dplk/signature.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace dplk::check {

void SuiteResult::fail(const std::string& what) {
    ++failures;
    if (samples.size() < 5) samples.push_back(what);
}

namespace {

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ';');
    return s;
}

std::string show(const std::vector<int>& v) {
    std::string out = "(";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += v[i] == BOT ? "_" : std::to_string(v[i]);
    }
    return out + ")";
}

std::string show(const PlainGraph& g) {
    std::string out = "n=" + std::to_string(g.n) + " {";
    for (size_t i = 0; i < g.edges.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(g.edges[i].first) + "-" + std::to_string(g.edges[i].second);
    }
    return out + "}";
}

template <class T>
void shuffle(Rng& rng, std::vector<T>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) std::swap(v[i], v[rng.below(i + 1)]);
}

std::string root_text(const Signature& s) { return s.root.text; }

std::vector<int> iota_vec(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return v;
}

// One representative per isomorphism class.
std::vector<PlainGraph> unlabeled_graphs(int n) {
    std::set<std::vector<std::pair<int, int>>> seen;
    std::vector<PlainGraph> out;
    for (const auto& g : all_graphs(n)) {
        std::vector<int> perm = iota_vec(n);
        std::vector<std::pair<int, int>> best;
        bool first = true;
        do {
            std::vector<std::pair<int, int>> e;
            for (auto [u, v] : g.edges) e.push_back(std::minmax(perm[u], perm[v]));
            std::sort(e.begin(), e.end());
            if (first || e < best) best = e;
            first = false;
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (seen.insert(best).second) out.push_back(g);
    }
    return out;
}

// Every structure on 1..max_n vertices with the optional color R and the
// optional constant c.
std::vector<ColoredStructure> all_small_structures(int max_n, bool color, bool constant) {
    std::vector<ColoredStructure> out;
    for (int n = 1; n <= max_n; ++n)
        for (const auto& g : all_graphs(n))
            for (unsigned mask = 0; mask < (color ? 1u << n : 1u); ++mask)
                for (int c = BOT; c < (constant ? n : BOT + 1); ++c) {
                    ColoredStructure s = structure_from_graph(g);
                    if (color) {
                        NamedSet r{"R", {}};
                        for (int v = 0; v < n; ++v)
                            if (mask >> v & 1u) r.members.push_back(v);
                        s.colors.push_back(r);
                    }
                    if (constant) s.constants.push_back({"c", c});
                    s.normalize();
                    out.push_back(s);
                }
    return out;
}

ApexTuple random_apex(Rng& rng, int n, int l) {
    std::vector<int> perm = iota_vec(n);
    shuffle(rng, perm);
    ApexTuple a;
    for (int i = 0; i < l; ++i) a.push_back(i < n && !rng.chance(15) ? perm[i] : BOT);
    return a;
}

std::vector<std::pair<int, int>> random_pairs(Rng& rng, int n, int k) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < k; ++i) pairs.push_back({rng.below(n), rng.below(n)});
    return pairs;
}

}  // namespace

SuiteResult suite_apex_projection(std::uint64_t seed) {
    SuiteResult res{1, "apex projection preserves truth", 0, 0, 500, {}, {}};
    Rng rng(seed);
    StructureOptions so;
    so.max_n = 5;
    so.colors = {"R"};
    SentenceOptions fo;
    fo.max_rank = 2;
    fo.max_dp_pairs = 2;
    fo.colors = {"R"};
    fo.max_size = 8;
    for (int i = 0; i < 600; ++i) {
        ColoredStructure s = random_structure(rng, so);
        int l = rng.chance(10) ? 0 : rng.between(1, 2);
        ApexTuple a = random_apex(rng, s.n, l);
        F phi = random_sentence(rng, fo);
        ++res.cases;
        try {
            auto r = check_projection(s, a, phi);
            if (!r.agree())
                res.fail("apex " + show(a) + " phi " + to_string(phi) + " on " + one_line(serialize_structure(s)));
        } catch (const std::exception& e) {
            res.fail(std::string("error ") + e.what() + " phi " + to_string(phi));
        }
    }
    return res;
}

SuiteResult suite_signature_agreement(std::uint64_t seed) {
    SuiteResult res{2, "equal signatures agree on sentences", 0, 0, 60, {}, {}};
    Rng rng(seed);
    for (int r = 1; r <= 2; ++r) {
        int cap = default_dp_cap(r);
        for (int colored = 0; colored <= 1; ++colored) {
            std::vector<std::string> colors;
            if (colored) colors = {"R"};
            StructureOptions so;
            so.max_n = 4;
            so.colors = colors;
            std::vector<ColoredStructure> pool;
            for (int i = 0; i < 90; ++i) {
                ColoredStructure s = random_structure(rng, so);
                pool.push_back(s);
                if (i % 3 == 0) {
                    std::vector<int> perm = iota_vec(s.n);
                    shuffle(rng, perm);
                    pool.push_back(relabel(s, perm));
                }
            }
            SentenceOptions fo;
            fo.max_rank = r;
            fo.max_dp_pairs = cap;
            fo.colors = colors;
            fo.max_size = 10;
            std::vector<F> corpus;
            for (int i = 0; i < 1000; ++i) corpus.push_back(random_sentence(rng, fo));

            std::map<std::string, std::vector<int>> groups;
            for (int i = 0; i < static_cast<int>(pool.size()); ++i)
                groups[root_text(signature(pool[i], r, cap))].push_back(i);
            long long pairs = 0;
            for (const auto& [text, members] : groups)
                for (size_t j = 1; j < members.size() && j <= 12; ++j) {
                    const auto& a = pool[members[0]];
                    const auto& b = pool[members[j]];
                    auto rep = check_sentence_agreement(a, b, r, cap, corpus);
                    ++res.cases;
                    ++pairs;
                    if (!rep.equal_signatures)
                        res.fail("grouped structures have different signatures");
                    else if (rep.checked != static_cast<int>(corpus.size()))
                        res.fail("corpus sentences skipped");
                    else if (!rep.counterexamples.empty())
                        res.fail("r=" + std::to_string(r) + " " + rep.counterexamples[0] + " separates " +
                                 one_line(serialize_structure(a)) + " and " + one_line(serialize_structure(b)));
                }
            res.details.push_back("r=" + std::to_string(r) + (colored ? " colored" : " plain") +
                                  ": classes=" + std::to_string(groups.size()) + " pairs=" + std::to_string(pairs));
        }
    }
    return res;
}

SuiteResult suite_spanning_tree(std::uint64_t seed) {
    SuiteResult res{3, "spanning subtree check matches evaluation", 0, 0, 1000, {}, {}};
    Rng rng(seed);
    StructureOptions so;
    so.max_n = 4;
    so.colors = {"R"};
    so.constants = {"c"};
    SentenceOptions fo;
    fo.max_rank = 2;
    fo.max_dp_pairs = 2;
    fo.colors = {"R"};
    fo.constants = {"c"};
    fo.free_constants = false;
    fo.annotation_atoms = false;
    fo.max_size = 9;
    long long skipped = 0, relativized = 0;
    for (int i = 0; res.cases < 1100 && i < 5000; ++i) {
        bool annotated = rng.chance(40);
        so.annotations = annotated ? 1 : 0;
        fo.annotations = annotated ? 1 : 0;
        ColoredStructure s = random_structure(rng, so);
        F phi = random_sentence(rng, fo);
        PrenexSentence p = to_prenex(phi);
        if (p.prefix.size() > 3) {
            ++skipped;
            continue;
        }
        if (has_op(p.matrix, Op::InAnnot)) {
            ++relativized;
            continue;
        }
        int r = static_cast<int>(p.prefix.size());
        int cap = std::max(default_dp_cap(r), max_dp_arity(p.matrix));
        ++res.cases;
        try {
            bool truth = evaluate(s, phi);
            auto sp = check_via_spanning_tree(s, p, cap);
            if (sp.by_matrix != truth || sp.by_patterns != truth)
                res.fail("phi " + to_string(phi) + " truth=" + std::to_string(truth) + " matrix=" +
                         std::to_string(sp.by_matrix) + " patterns=" + std::to_string(sp.by_patterns) + " on " +
                         one_line(serialize_structure(s)));
        } catch (const std::exception& e) {
            res.fail(std::string("error ") + e.what() + " phi " + to_string(phi));
        }
    }
    res.details.push_back("skipped for prefix > 3: " + std::to_string(skipped));
    res.details.push_back("skipped for relativized matrix: " + std::to_string(relativized));
    return res;
}

SuiteResult suite_compression(std::uint64_t seed) {
    SuiteResult res{4, "compression equals pattern", 0, 0, 1000, {}, {}};
    Rng rng(seed);
    std::vector<PlainGraph> graphs;
    for (int n = 1; n <= 4; ++n)
        for (const auto& g : all_graphs(n)) graphs.push_back(g);
    for (int i = 0; i < 250; ++i) graphs.push_back(random_graph(rng, 5, 40));
    const int cap = default_dp_cap(3);
    long long nontrivial = 0;
    for (const auto& g : graphs) {
        for (int rep = 0; rep < 4; ++rep) {
            BoundariedColoredGraph bg;
            bg.base = structure_from_graph(g);
            int ncolors = rng.below(3);
            for (int c = 0; c < ncolors; ++c) bg.base.colors.push_back({c == 0 ? "R" : "Q", {}});
            for (int v = 0; v < g.n && ncolors > 0; ++v) {
                int c = rng.below(ncolors + 1);
                if (c > 0) bg.base.colors[c - 1].members.push_back(v);
            }
            bg.base.normalize();
            int len = rng.below(4);
            for (int i = 0; i < len; ++i) bg.boundary.push_back(rng.chance(15) ? BOT : rng.below(g.n));
            if (rng.chance(35)) bg.apex.push_back(rng.chance(20) ? BOT : rng.below(g.n));
            ++res.cases;
            try {
                Pattern direct = pattern_of(bg, cap);
                Pattern compressed = compression(bg);
                if (direct.hp.size() > 1) ++nontrivial;
                if (!(direct == compressed))
                    res.fail("boundary " + show(bg.boundary) + " apex " + show(bg.apex) + " on " +
                             one_line(serialize_structure(bg.base)) + ": " + pattern_to_string(direct) + " vs " +
                             pattern_to_string(compressed));
            } catch (const std::exception& e) {
                res.fail(std::string("error ") + e.what());
            }
        }
    }
    res.details.push_back("patterns with a nonempty linkage=" + std::to_string(nontrivial));
    return res;
}

SuiteResult suite_full_dnf(std::uint64_t seed) {
    SuiteResult res{5, "full DNF equivalence and unique patterns", 0, 0, 200, {}, {}};
    Rng rng(seed);
    auto structures = all_small_structures(3, true, true);
    std::vector<Model> models;
    models.reserve(structures.size());
    for (const auto& s : structures) models.emplace_back(s);
    Vocabulary voc;
    voc.colors = {"R"};
    voc.constants = {"c"};
    SentenceOptions fo;
    fo.colors = {"R"};
    fo.constants = {"c"};
    fo.max_size = 8;

    auto tuples_of = [](int n, int r) {
        std::vector<std::vector<int>> out;
        int total = 1;
        for (int i = 0; i < r; ++i) total *= n;
        for (int code = 0; code < total; ++code) {
            std::vector<int> t(r);
            for (int i = 0, c = code; i < r; ++i, c /= n) t[i] = c % n;
            out.push_back(t);
        }
        return out;
    };
    // Atom truth vectors and patterns depend only on (r, cap), so they are
    // computed once per shape.
    struct ShapeData {
        std::vector<F> family;
        std::vector<std::vector<std::vector<bool>>> atoms;  // [structure][tuple]
        std::vector<std::vector<Pattern>> patterns;         // [structure][tuple]
    };
    std::map<std::pair<int, int>, ShapeData> shapes;
    auto shape_data = [&](const DnfShape& shape) -> const ShapeData& {
        auto key = std::make_pair(shape.r(), shape.dp_cap);
        auto it = shapes.find(key);
        if (it != shapes.end()) return it->second;
        ShapeData d;
        d.family = atom_family(shape);
        for (size_t si = 0; si < structures.size(); ++si) {
            std::vector<CompiledFormula> atoms;
            for (const auto& a : d.family) atoms.emplace_back(a, models[si], shape.vars);
            auto& av = d.atoms.emplace_back();
            auto& pv = d.patterns.emplace_back();
            for (const auto& t : tuples_of(models[si].n(), shape.r())) {
                std::vector<bool> bits;
                for (const auto& a : atoms) bits.push_back(a.eval(t));
                av.push_back(bits);
                pv.push_back(pattern_of(models[si], constant_tuple(structures[si]), t, shape.dp_cap));
            }
        }
        return shapes.emplace(key, std::move(d)).first->second;
    };

    long long tuples = 0;
    for (int f = 0; f < 200; ++f) {
        int r = rng.between(1, 3);
        int cap = rng.between(1, 3);
        F m = random_matrix(rng, r, std::min(cap, 2), fo);
        DnfShape shape;
        for (int i = 1; i <= r; ++i) shape.vars.push_back("x" + std::to_string(i));
        shape.voc = voc;
        shape.dp_cap = cap;
        ++res.cases;
        try {
            const ShapeData& sd = shape_data(shape);
            FullDnf dnf = to_full_dnf(m, shape);
            auto patterns = ext_patterns(m, shape);
            std::set<Pattern> pattern_set(patterns.begin(), patterns.end());
            if (pattern_set.size() != patterns.size()) {
                res.fail("duplicate patterns for " + to_string(m));
                continue;
            }
            std::map<std::string, size_t> position;
            for (size_t a = 0; a < sd.family.size(); ++a) position[to_string(sd.family[a])] = a;
            // Each full clause fixes every family atom, so it is a sign vector.
            std::map<std::vector<bool>, int> clause_count;
            bool full = true;
            for (size_t i = 0; i < dnf.clauses.size(); ++i) {
                std::vector<int> signs(sd.family.size(), -1);
                for (const auto& [atom, sign] : dnf.clause(i)) {
                    auto it = position.find(to_string(atom));
                    if (it == position.end()) continue;
                    signs[it->second] = sign;
                }
                std::vector<bool> v;
                for (int x : signs) {
                    full = full && x >= 0;
                    v.push_back(x == 1);
                }
                ++clause_count[v];
            }
            if (!full) {
                res.fail("clause leaves an atom undecided for " + to_string(m));
                continue;
            }
            F whole = dnf.to_formula();
            bool bad = false;
            for (size_t si = 0; si < structures.size() && !bad; ++si) {
                const Model& model = models[si];
                CompiledFormula cm(m, model, shape.vars);
                std::optional<CompiledFormula> cw;
                if (r <= 2) cw.emplace(whole, model, shape.vars);
                auto all = tuples_of(model.n(), r);
                for (size_t ti = 0; ti < all.size() && !bad; ++ti) {
                    const auto& tuple = all[ti];
                    ++tuples;
                    bool truth = cm.eval(tuple);
                    auto it = clause_count.find(sd.atoms[si][ti]);
                    int matching = it == clause_count.end() ? 0 : it->second;
                    bool in_patterns = pattern_set.count(sd.patterns[si][ti]) > 0;
                    std::string where = " for " + to_string(m) + " at " + show(tuple) + " on " +
                                        one_line(serialize_structure(structures[si]));
                    if (matching > 1) {
                        res.fail("clauses overlap" + where);
                        bad = true;
                    } else if ((matching == 1) != truth) {
                        res.fail("clauses disagree" + where);
                        bad = true;
                    } else if (cw && cw->eval(tuple) != truth) {
                        res.fail("rebuilt formula disagrees" + where);
                        bad = true;
                    } else if (in_patterns != truth) {
                        res.fail("pattern membership disagrees" + where);
                        bad = true;
                    }
                }
            }
        } catch (const std::exception& e) {
            res.fail(std::string("error ") + e.what() + " for " + to_string(m));
        }
    }
    res.details.push_back("structures=" + std::to_string(structures.size()) + " tuples=" + std::to_string(tuples));
    return res;
}

SuiteResult suite_signature_sentence(std::uint64_t) {
    SuiteResult res{6, "signature sentence round trip", 0, 0, 1000, {}, {}};
    for (int colored = 0; colored <= 1; ++colored) {
        auto structures = all_small_structures(3, colored, false);
        for (int r = 1; r <= 2; ++r) {
            int cap = default_dp_cap(r);
            std::vector<std::string> sig_text;
            std::map<std::string, Signature> distinct;
            for (const auto& s : structures) {
                Signature sg = signature(s, r, cap);
                sig_text.push_back(root_text(sg));
                distinct.emplace(sig_text.back(), sg);
            }
            for (const auto& [text, beta] : distinct) {
                F phi = signature_to_sentence(beta);
                for (size_t i = 0; i < structures.size(); ++i) {
                    ++res.cases;
                    bool expect = sig_text[i] == text;
                    if (evaluate(structures[i], phi) != expect)
                        res.fail("r=" + std::to_string(r) + " expect " + std::to_string(expect) + " on " +
                                 one_line(serialize_structure(structures[i])));
                }
            }
            res.details.push_back(std::string(colored ? "colored" : "plain") + " r=" + std::to_string(r) +
                                  ": structures=" + std::to_string(structures.size()) +
                                  " signatures=" + std::to_string(distinct.size()));
        }
    }
    return res;
}

SuiteResult suite_sdp_radius_zero(std::uint64_t seed) {
    SuiteResult res{7, "sdp at radius 0 equals dp", 0, 0, 2000, {}, {}};
    Rng rng(seed);
    for (int i = 0; i < 2200; ++i) {
        int n = rng.between(1, 7);
        ColoredStructure s = structure_from_graph(random_graph(rng, n, rng.between(20, 70)));
        auto pairs = random_pairs(rng, n, rng.between(1, 3));
        ++res.cases;
        if (eval_sdp(s, 0, pairs) != eval_dp(s, pairs)) res.fail("on " + one_line(serialize_structure(s)));
    }
    return res;
}

SuiteResult suite_dp_oracle(std::uint64_t seed) {
    SuiteResult res{8, "disjoint paths match exhaustive enumeration", 0, 0, 300, {}, {}};
    Rng rng(seed);
    long long sdp_cases = 0, yes = 0;
    for (int n = 1; n <= 7; ++n)
        for (int density : {25, 45, 65})
            for (int k = 1; k <= 3; ++k)
                for (int rep = 0; rep < 5; ++rep) {
                    PlainGraph g = random_graph(rng, n, density);
                    ColoredStructure s = structure_from_graph(g);
                    auto pairs = random_pairs(rng, n, k);
                    ++res.cases;
                    bool want = exhaustive_paths(g, pairs);
                    yes += want;
                    if (eval_dp(s, pairs) != want) res.fail("dp on " + show(g));
                    int radius = rng.between(1, 2);
                    ++sdp_cases;
                    if (eval_sdp(s, radius, pairs) != exhaustive_paths(g, pairs, radius))
                        res.fail("sdp radius " + std::to_string(radius) + " on " + show(g));
                }
    res.details.push_back("dp yes-instances=" + std::to_string(yes) + " sdp cross-checks=" + std::to_string(sdp_cases));
    return res;
}

namespace {

struct KindTally {
    long long cases = 0, failures = 0, yes = 0;
};

void cross_check(SuiteResult& res, KindTally& t, const ProblemInstance& inst, int expect = -1) {
    ++res.cases;
    ++t.cases;
    try {
        validate_instance(inst);
        Encoding enc = encode(inst);
        bool via_logic = evaluate(build_structure(inst), enc.sentence);
        bool direct = oracle(inst);
        t.yes += direct;
        std::string what = kind_name(inst.kind) + " on " + show(inst.host);
        if (inst.phi) what += " phi " + to_string(inst.phi);
        if (via_logic != direct) {
            ++t.failures;
            res.fail(what + ": encoding " + std::to_string(via_logic) + " oracle " + std::to_string(direct));
        } else if (expect >= 0 && direct != static_cast<bool>(expect)) {
            ++t.failures;
            res.fail(what + ": expected " + std::to_string(expect));
        }
    } catch (const std::exception& e) {
        ++t.failures;
        res.fail(kind_name(inst.kind) + " error " + e.what());
    }
}

ProblemInstance make(ProblemKind kind, PlainGraph host) {
    ProblemInstance p;
    p.kind = kind;
    p.host = std::move(host);
    return p;
}

}  // namespace

SuiteResult suite_encodings(std::uint64_t seed) {
    SuiteResult res{9, "encodings match direct oracles", 0, 0, 1500, {}, {}};
    Rng rng(seed);
    std::map<ProblemKind, KindTally> tally;

    {
        auto& t = tally[ProblemKind::DisjointPaths];
        for (int i = 0; i < 150; ++i) {
            auto p = make(ProblemKind::DisjointPaths, random_graph(rng, rng.between(2, 6), 45));
            p.terminals = random_pairs(rng, p.host.n, rng.between(1, 2));
            if (rng.chance(30)) {
                p.induced = true;
                p.radius = rng.between(0, 1);
            }
            cross_check(res, t, p);
        }
    }

    std::vector<PlainGraph> small_patterns = {{1, {}}, {2, {}}, {2, {{0, 1}}}, {3, {}}, {3, {{0, 1}}},
                                              {3, {{0, 1}, {1, 2}}}, {3, {{0, 1}, {1, 2}, {0, 2}}}};
    std::vector<PlainGraph> hosts;
    for (int n = 1; n <= 5; ++n)
        for (const auto& g : unlabeled_graphs(n)) hosts.push_back(g);
    for (auto kind : {ProblemKind::Minor, ProblemKind::TopologicalMinor}) {
        auto& t = tally[kind];
        for (const auto& h : small_patterns)
            for (const auto& g : hosts) {
                auto p = make(kind, g);
                p.pattern = h;
                cross_check(res, t, p);
            }
        auto k3 = make(kind, make_cycle(3));
        k3.pattern = make_complete(3);
        cross_check(res, t, k3, 1);
        auto p4 = make(kind, make_path(4));
        p4.pattern = make_complete(3);
        cross_check(res, t, p4, 0);
    }

    std::vector<PlainGraph> link_patterns = {{2, {{0, 1}}}, {3, {{0, 1}, {1, 2}}}, {4, {{0, 1}, {2, 3}}}, {3, {{0, 1}}}};
    for (auto kind : {ProblemKind::OrderedLinkability, ProblemKind::UnorderedLinkability}) {
        auto& t = tally[kind];
        for (int i = 0; i < 140; ++i) {
            auto p = make(kind, random_graph(rng, rng.between(2, 6), 55));
            p.pattern = link_patterns[rng.below(static_cast<int>(link_patterns.size()))];
            for (int v = 0; v < p.host.n; ++v)
                if (!rng.chance(30)) p.roots.push_back(v);
            if (p.pattern.n == 4 && rng.chance(40)) {
                p.induced = true;
                p.radius = rng.between(0, 1);
            }
            cross_check(res, t, p);
        }
        auto c4 = make(kind, make_cycle(4));
        c4.pattern = {2, {{0, 1}}};
        c4.roots = iota_vec(4);
        cross_check(res, t, c4, 1);
    }
    {
        auto p = make(ProblemKind::UnorderedLinkability, make_complete(4));
        p.pattern = make_cycle(3);
        p.roots = iota_vec(4);
        cross_check(res, tally[ProblemKind::UnorderedLinkability], p, 1);
    }

    SentenceOptions plain;
    plain.max_rank = 2;
    plain.max_dp_pairs = 2;
    plain.max_size = 7;
    {
        auto& t = tally[ProblemKind::Deletion];
        for (int i = 0; i < 150; ++i) {
            auto p = make(ProblemKind::Deletion, random_graph(rng, rng.between(1, 5), 50));
            p.k = rng.below(std::min(3, p.host.n));
            p.phi = random_sentence(rng, plain);
            cross_check(res, t, p);
        }
    }
    {
        auto& t = tally[ProblemKind::Amalgamation];
        SentenceOptions opt = plain;
        opt.max_dp_pairs = 1;
        for (int i = 0; i < 80; ++i) {
            int n1 = rng.between(1, 3);
            int n2 = rng.between(1, 5 - n1);
            auto p = make(ProblemKind::Amalgamation, random_graph(rng, n1, 50));
            p.host2 = random_graph(rng, n2, 50);
            p.k = rng.between(1, 2);
            p.phi = random_sentence(rng, opt);
            cross_check(res, t, p);
        }
        auto ex = make(ProblemKind::Amalgamation, PlainGraph{1, {}});
        ex.host2 = PlainGraph{1, {}};
        ex.k = 1;
        ex.phi = parse_sentence("exists x. exists y. E(x,y)");
        cross_check(res, t, ex, 0);
    }
    {
        auto& t = tally[ProblemKind::Replacement];
        const char* builtins[] = {"identity", "complement", "delete-all", "clique"};
        for (int i = 0; i < 100; ++i) {
            auto p = make(ProblemKind::Replacement, random_graph(rng, rng.between(2, 5), 50));
            p.k = rng.between(1, 2);
            if (rng.chance(70)) {
                p.action = builtin_action(builtins[rng.below(4)], p.k);
            } else {
                int graphs = 1 << (p.k * (p.k - 1) / 2);
                p.action.k = p.k;
                for (int g = 0; g < graphs; ++g) p.action.table.push_back(static_cast<NumberedGraph>(rng.below(graphs)));
            }
            p.phi = random_sentence(rng, plain);
            cross_check(res, t, p);
        }
        auto ex = make(ProblemKind::Replacement, PlainGraph{2, {}});
        ex.k = 2;
        ex.action = builtin_action("complement", 2);
        ex.phi = parse_sentence("exists x. exists y. E(x,y)");
        cross_check(res, t, ex, 1);
    }
    {
        auto& t = tally[ProblemKind::Reconfiguration];
        SentenceOptions opt = plain;
        opt.colors = {"S"};
        opt.max_dp_pairs = 1;
        for (int i = 0; i < 120; ++i) {
            auto p = make(ProblemKind::Reconfiguration, random_graph(rng, rng.between(2, 5), 50));
            for (int v = 0; v < p.host.n; ++v) {
                if (rng.chance(50)) p.source.push_back(v);
                if (rng.chance(50)) p.target.push_back(v);
            }
            p.length = rng.between(0, 3);
            p.phi = random_sentence(rng, opt);
            cross_check(res, t, p);
        }
        auto ex = make(ProblemKind::Reconfiguration, make_path(3));
        ex.phi = parse_sentence("forall x. forall y. !(x in S & y in S) | !E(x,y)");
        ex.source = {0};
        ex.target = {2};
        ex.length = 1;
        cross_check(res, t, ex, 1);
        ex.target = {0};
        ex.length = 0;
        cross_check(res, t, ex, 1);
    }

    for (auto kind : all_kinds()) {
        const auto& t = tally[kind];
        res.details.push_back(kind_name(kind) + ": cases=" + std::to_string(t.cases) + " yes=" + std::to_string(t.yes) +
                              " failures=" + std::to_string(t.failures));
        if (t.cases == 0) res.fail("no cases for " + kind_name(kind));
    }
    return res;
}

SuiteResult suite_gadgets(std::uint64_t seed) {
    SuiteResult res{10, "reduction gadgets", 0, 0, 60, {}, {}};
    Rng rng(seed);
    for (int r = 1; r <= 3; ++r) {
        ++res.cases;
        auto bad = check_edge_pairing(r, pair_clique_edges(r));
        if (!bad.empty()) res.fail("pairing r=" + std::to_string(r) + ": " + bad[0]);
    }

    std::vector<PlainGraph> hosts = {make_complete(3)};
    for (int i = 0; i < 24; ++i) hosts.push_back(random_graph(rng, rng.between(1, 6), 50));
    for (const auto& g : hosts)
        for (int k : {9, 13}) {
            ++res.cases;
            auto gad = build_linkability_gadget(g, k);
            auto bad = check_linkability_gadget(g, gad);
            if (!bad.empty()) res.fail("linkability gadget k=" + std::to_string(k) + " on " + show(g) + ": " + bad[0]);
        }
    {
        ++res.cases;
        auto gad = build_linkability_gadget(make_complete(3), 9);
        size_t s_total = 0;
        for (const auto& s : gad.s_sets) s_total += s.size();
        auto adj = gad.structure.adjacency();
        if (s_total != 12 || gad.w.size() != 3 || gad.l.size() != 3 || adj[gad.w[0]].size() != 4)
            res.fail("triangle gadget counts differ from 12/3/3/4");
    }

    auto grid = [](std::vector<std::vector<std::pair<int, int>>> cells) { return GridTilingInstance{2, 2, std::move(cells)}; };
    std::vector<std::pair<int, int>> all_pairs = {{1, 1}, {1, 2}, {2, 1}, {2, 2}};
    {
        ++res.cases;
        auto gad = build_gridtiling_gadget(grid({all_pairs, all_pairs, all_pairs, all_pairs}));
        int side = 4;
        int expect = side * side + 2 * side * (side - 1);
        std::vector<int> bc = gad.b;
        bc.insert(bc.end(), gad.c.begin(), gad.c.end());
        std::sort(bc.begin(), bc.end());
        bool lambda_ok = gad.lambda.size() == 4;
        for (const auto& [u, v] : gad.pattern.edges) lambda_ok = lambda_ok && gad.lambda[u] != gad.lambda[v];
        if (gad.structure.n != expect) res.fail("grid gadget vertex count");
        if (bc != iota_vec(side * side)) res.fail("full M must select every crossing");
        if (!lambda_ok) res.fail("lambda is not a proper coloring");
    }
    std::vector<std::pair<GridTilingInstance, int>> crafted = {
        {grid({{{1, 1}}, {{1, 1}}, {{1, 1}}, {{1, 1}}}), 1},
        {grid({{}, all_pairs, all_pairs, all_pairs}), 0},
        {grid({{{1, 2}}, {{1, 1}}, {{2, 2}}, {{2, 1}}}), -1},
    };
    int sampled = 0;
    for (int i = 0; i < 30; ++i) {
        std::vector<std::vector<std::pair<int, int>>> cells(4);
        for (auto& c : cells)
            for (auto p : all_pairs)
                if (rng.chance(55)) c.push_back(p);
        crafted.push_back({grid(cells), -1});
        ++sampled;
    }
    int yes = 0;
    for (const auto& [inst, expect] : crafted) {
        ++res.cases;
        auto chk = verify_gadget_iff(inst);
        yes += chk.tiling;
        if (!chk.agree())
            res.fail("grid tiling " + one_line(serialize_grid_tiling(inst)) + " tiling=" + std::to_string(chk.tiling));
        else if (expect >= 0 && chk.tiling != static_cast<bool>(expect))
            res.fail("grid tiling expected " + std::to_string(expect));
    }
    res.details.push_back("grid tiling maps=" + std::to_string(crafted.size()) + " (sampled " +
                          std::to_string(sampled) + ") yes=" + std::to_string(yes));
    return res;
}

SuiteResult suite_annotation_reduction(std::uint64_t seed) {
    SuiteResult res{11, "annotation reduction postconditions", 0, 0, 200, {}, {}};
    Rng rng(seed);
    StructureOptions so;
    so.max_n = 5;
    so.colors = {"R"};
    long long removed = 0;
    for (int i = 0; i < 220; ++i) {
        int r = rng.between(1, 2);
        so.annotations = r;
        ColoredStructure s = random_structure(rng, so);
        int cap = default_dp_cap(r);
        auto ranges = s.annotations;
        ++res.cases;
        auto reduced = reduce_annotation(s, ranges, cap);
        std::string where = " on " + one_line(serialize_structure(s));
        if (reduced.size() != ranges.size()) {
            res.fail("level count changed" + where);
            continue;
        }
        bool subset = true;
        for (size_t l = 0; l < ranges.size(); ++l) {
            subset = subset && std::includes(ranges[l].begin(), ranges[l].end(), reduced[l].begin(), reduced[l].end());
            removed += static_cast<long long>(ranges[l].size() - reduced[l].size());
        }
        if (!subset) {
            res.fail("not a subset" + where);
            continue;
        }
        Signature target = signature(s, ranges, cap);
        if (!(signature(s, reduced, cap) == target)) {
            res.fail("signature changed" + where);
            continue;
        }
        bool minimal = true;
        for (size_t l = 0; l < reduced.size() && minimal; ++l)
            for (size_t j = 0; j < reduced[l].size() && minimal; ++j) {
                auto smaller = reduced;
                smaller[l].erase(smaller[l].begin() + static_cast<long>(j));
                if (signature(s, smaller, cap) == target) minimal = false;
            }
        if (!minimal) res.fail("not locally minimal" + where);
    }
    res.details.push_back("vertices removed=" + std::to_string(removed));
    return res;
}

const std::vector<SuiteInfo>& suite_list() {
    static const std::vector<SuiteInfo> list = {
        {1, "apex projection preserves truth"},
        {2, "equal signatures agree on sentences"},
        {3, "spanning subtree check matches evaluation"},
        {4, "compression equals pattern"},
        {5, "full DNF equivalence and unique patterns"},
        {6, "signature sentence round trip"},
        {7, "sdp at radius 0 equals dp"},
        {8, "disjoint paths match exhaustive enumeration"},
        {9, "encodings match direct oracles"},
        {10, "reduction gadgets"},
        {11, "annotation reduction postconditions"},
    };
    return list;
}

SuiteResult run_suite(int id, std::uint64_t base_seed) {
    std::uint64_t seed = base_seed * 1000003ULL + static_cast<std::uint64_t>(id);
    switch (id) {
        case 1: return suite_apex_projection(seed);
        case 2: return suite_signature_agreement(seed);
        case 3: return suite_spanning_tree(seed);
        case 4: return suite_compression(seed);
        case 5: return suite_full_dnf(seed);
        case 6: return suite_signature_sentence(seed);
        case 7: return suite_sdp_radius_zero(seed);
        case 8: return suite_dp_oracle(seed);
        case 9: return suite_encodings(seed);
        case 10: return suite_gadgets(seed);
        case 11: return suite_annotation_reduction(seed);
        default: throw InputError("unknown suite " + std::to_string(id));
    }
}

std::string format_result(const SuiteResult& r) {
    std::ostringstream o;
    o << (r.pass() ? "PASS" : "FAIL") << " " << r.id << " " << r.name << ": cases=" << r.cases
      << " required=" << r.required << " failures=" << r.failures;
    for (const auto& d : r.details) o << "\n  " << d;
    for (const auto& s : r.samples) o << "\n  failure: " << s;
    return o.str();
}

}  // namespace dplk::check
