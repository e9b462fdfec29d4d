#include <doctest.h>

#include <set>

#include "dplk/error.hpp"
#include "dplk/formula.hpp"
#include "dplk/normal_form.hpp"
#include "dplk/semantics.hpp"

using namespace dplk;

TEST_CASE("parse nested quantifiers") {
    F f = parse_sentence("exists x. forall y. (E(x,y) | x=y)");
    REQUIRE(f->op == Op::Exists);
    CHECK(f->name == "x");
    REQUIRE(f->kids[0]->op == Op::Forall);
    CHECK(f->kids[0]->kids[0]->op == Op::Or);
}

TEST_CASE("parse an annotated quantifier over a loop pair") {
    F f = parse_sentence("exists x in 1. dp(x,x)");
    CHECK(f->op == Op::Exists);
    CHECK(f->num == 1);
    CHECK(f->kids[0]->op == Op::Dp);
    CHECK(f->kids[0]->terms.size() == 2);
}

TEST_CASE("unbound variables are rejected in sentences") {
    CHECK_THROWS_AS(parse_sentence("E(x,y)"), InputError);
    CHECK_NOTHROW(parse_formula("E(x,y)"));
}

TEST_CASE("printing round trips") {
    for (const char* text : {"exists x. forall y. E(x,y) | x = y", "forall x in 2. !x in R & dp(x, x)",
                             "exists a. exists b. sdp[1](a, b, a, a)", "exists x. x = @c"}) {
        F f = parse_formula(text);
        CHECK(same(parse_formula(to_string(f)), f));
    }
}

TEST_CASE("prenex of a prenex sentence") {
    auto p = to_prenex(parse_sentence("exists x. E(x,x)"));
    REQUIRE(p.prefix.size() == 1);
    CHECK(p.prefix[0].exists);
    CHECK(p.matrix->op == Op::Edge);
}

TEST_CASE("prenex dualizes under negation") {
    auto p = to_prenex(parse_sentence("!(exists x. x in P)"));
    REQUIRE(p.prefix.size() == 1);
    CHECK_FALSE(p.prefix[0].exists);
    CHECK(p.matrix->op == Op::Not);
}

TEST_CASE("prenex renames colliding variables and keeps meaning") {
    F f = parse_sentence("(exists x. x in A) & (forall x. x in B)");
    auto p = to_prenex(f);
    REQUIRE(p.prefix.size() == 2);
    CHECK(p.prefix[0].var != p.prefix[1].var);
    for (int n = 1; n <= 3; ++n)
        for (unsigned a = 0; a < (1u << n); ++a)
            for (unsigned b = 0; b < (1u << n); ++b) {
                if (a & b) continue;
                ColoredStructure s = structure_from_graph({n, {}});
                s.colors = {{"A", {}}, {"B", {}}};
                for (int v = 0; v < n; ++v) {
                    if (a >> v & 1u) s.colors[0].members.push_back(v);
                    if (b >> v & 1u) s.colors[1].members.push_back(v);
                }
                CHECK(evaluate(s, p) == evaluate(s, f));
            }
}

TEST_CASE("quantifier rank") {
    CHECK(quantifier_rank(parse_formula("E(x,y) & x = y")) == 0);
    CHECK(quantifier_rank(parse_sentence("exists x. forall y. exists z. dp(x,y,z,z)")) == 3);
    CHECK(quantifier_rank(parse_sentence("exists x. (x in A & forall y. E(x,y))")) == 2);
}

namespace {
DnfShape shape(int r, int cap, Vocabulary voc = {}) {
    DnfShape s;
    for (int i = 1; i <= r; ++i) s.vars.push_back("x" + std::to_string(i));
    s.voc = voc;
    s.dp_cap = cap;
    return s;
}

Clause signed_clause(const DnfShape& sh, const std::vector<bool>& signs) {
    auto fam = atom_family(sh);
    REQUIRE(fam.size() == signs.size());
    Clause c;
    for (size_t i = 0; i < fam.size(); ++i) c.push_back({fam[i], signs[i]});
    return c;
}
}  // namespace

TEST_CASE("full DNF of an equality keeps only satisfiable clauses") {
    auto d = to_full_dnf(parse_formula("x1 = x2"), shape(2, 0));
    CHECK(d.family.size() == 2);
    // E(x1,x1) is false in every structure, so one clause survives.
    CHECK(d.clauses.size() == 1);
}

TEST_CASE("full DNF of true splits on a color") {
    Vocabulary v;
    v.colors = {"Y"};
    auto d = to_full_dnf(f_true(), shape(1, 0, v));
    CHECK(d.clauses.size() == 2);
}

TEST_CASE("full DNF of a contradiction is empty") {
    Vocabulary v;
    v.colors = {"A"};
    auto d = to_full_dnf(parse_formula("x1 in A & !x1 in A"), shape(1, 0, v));
    CHECK(d.clauses.empty());
    CHECK(ext_patterns(parse_formula("x1 in A & !x1 in A"), shape(1, 0, v)).empty());
}

TEST_CASE("clause pattern of a merged pair") {
    auto sh = shape(2, 0);
    auto p = clause_pattern(signed_clause(sh, {true, false}), sh);
    CHECK_FALSE(p.empty);
    CHECK(p.parts == std::vector<std::vector<int>>{{0, 1}});
    CHECK(p.he.empty());
}

TEST_CASE("clause with a literal of both signs has the empty pattern") {
    auto sh = shape(2, 0);
    Clause c = signed_clause(sh, {true, false});
    c.push_back({c[0].first, false});
    CHECK(clause_pattern(c, sh).empty);
}

TEST_CASE("positive dp literal enters the path graphs") {
    auto sh = shape(2, 1);
    auto p = clause_pattern(signed_clause(sh, {false, false, true}), sh);
    bool found = false;
    for (const auto& g : p.hp) found = found || g == IndexGraph{{0, 1}};
    CHECK(found);
}

TEST_CASE("patterns of false and of an edge") {
    CHECK(ext_patterns(f_false(), shape(2, 1)).empty());
    CHECK(ext_patterns(f_true(), shape(1, 1)).size() == 1);
    auto ps = ext_patterns(parse_formula("E(x1,x2)"), shape(2, 1));
    CHECK_FALSE(ps.empty());
    for (const auto& p : ps) {
        CHECK(p.he == IndexGraph{{0, 1}});
        CHECK(p.parts.size() == 2);
    }
}

TEST_CASE("dp atoms are canonical") {
    CHECK(canonical_dp({{1, 0}, {0, 0}}) == DpAtom{{0, 0}, {0, 1}});
    CHECK_FALSE(is_proper(DpAtom{{0, 1}, {1, 2}}));
    CHECK(default_dp_cap(3) == 6);
}
