#include <doctest.h>

#include <algorithm>

#include "dplk/error.hpp"
#include "dplk/gadgets.hpp"

using namespace dplk;

TEST_CASE("clique edge pairings") {
    for (int r = 1; r <= 3; ++r) {
        auto p = pair_clique_edges(r);
        int n = 4 * r + 1;
        CHECK(p.size() == static_cast<size_t>(n * (n - 1) / 4));
        CHECK(check_edge_pairing(r, p).empty());
    }
    EdgePairing broken = pair_clique_edges(1);
    broken[0].second = broken[0].first;
    CHECK_FALSE(check_edge_pairing(1, broken).empty());
}

TEST_CASE("linkability gadget on a triangle") {
    auto g = make_complete(3);
    auto gad = build_linkability_gadget(g, 9);
    size_t s_total = 0;
    for (const auto& s : gad.s_sets) s_total += s.size();
    CHECK(s_total == 12);
    CHECK(gad.w.size() == 3);
    CHECK(gad.l.size() == 3);
    CHECK(gad.structure.adjacency()[gad.w[0]].size() == 4);
    CHECK(gad.k_prime == 19);
    CHECK(check_linkability_gadget(g, gad).empty());
    CHECK_THROWS_AS(build_linkability_gadget(g, 8), InputError);
}

TEST_CASE("grid tiling gadget shape") {
    GridTilingInstance full{2, 2, std::vector<std::vector<std::pair<int, int>>>(4, {{1, 1}, {1, 2}, {2, 1}, {2, 2}})};
    auto gad = build_gridtiling_gadget(full);
    CHECK(gad.side == 4);
    CHECK(gad.structure.n == 16 + 2 * 4 * 3);
    std::vector<int> bc = gad.b;
    bc.insert(bc.end(), gad.c.begin(), gad.c.end());
    std::sort(bc.begin(), bc.end());
    CHECK(bc.size() == 16);
    for (const auto& [u, v] : gad.pattern.edges) CHECK(gad.lambda[u] != gad.lambda[v]);
}

TEST_CASE("grid tiling equivalence on crafted instances") {
    GridTilingInstance easy{2, 2, std::vector<std::vector<std::pair<int, int>>>(4, {{1, 1}})};
    auto yes = verify_gadget_iff(easy);
    CHECK(yes.tiling);
    CHECK(yes.minor);
    GridTilingInstance hole = easy;
    hole.cells[0].clear();
    auto no = verify_gadget_iff(hole);
    CHECK_FALSE(no.tiling);
    CHECK_FALSE(no.minor);
    GridTilingInstance big{2, 3, std::vector<std::vector<std::pair<int, int>>>(9, {{1, 1}})};
    CHECK_THROWS_AS(verify_gadget_iff(big), GuardError);
}

TEST_CASE("grid tiling text round trips") {
    GridTilingInstance inst{3, 2, {{{1, 2}}, {}, {{1, 1}, {3, 3}}, {{2, 2}}}};
    auto back = parse_grid_tiling(serialize_grid_tiling(inst));
    CHECK(back.k == 2);
    CHECK(back.d == 3);
    CHECK(back.cells == inst.cells);
}

TEST_CASE("grid tiling oracle") {
    GridTilingInstance consistent{2, 2, {{{1, 1}}, {{1, 2}}, {{2, 1}}, {{2, 2}}}};
    CHECK(oracle_grid_tiling(consistent));
    GridTilingInstance clash{2, 2, {{{1, 1}}, {{2, 2}}, {{1, 1}}, {{1, 1}}}};
    CHECK_FALSE(oracle_grid_tiling(clash));
    GridTilingInstance ok{2, 2, {{{1, 1}, {2, 2}}, {{2, 2}}, {{2, 2}}, {{2, 2}}}};
    CHECK(oracle_grid_tiling(ok));
}
