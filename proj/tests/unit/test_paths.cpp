#include <doctest.h>

#include "dplk/error.hpp"
#include "dplk/paths.hpp"
#include "dplk/semantics.hpp"
#include "oracles.hpp"

using namespace dplk;

TEST_CASE("disjoint paths on small graphs") {
    auto p3 = structure_from_graph(make_path(3));
    CHECK(eval_dp(p3, {{0, 2}}));
    CHECK_FALSE(eval_dp(structure_from_graph(make_path(2)), {{0, 1}}));
    CHECK_FALSE(eval_dp(structure_from_graph(make_complete(4)), {{0, 1}, {2, 3}}));
    CHECK(eval_dp(structure_from_graph({3, {}}), {{0, 0}, {2, 2}}));
    CHECK_FALSE(eval_dp(p3, {{0, 2}, {1, 1}}));
}

TEST_CASE("scattered paths") {
    auto p5 = structure_from_graph(make_path(5));
    CHECK(eval_sdp(p5, 1, {{0, 2}}));
    PlainGraph ladder{8, {{0, 1}, {1, 2}, {2, 3}, {4, 5}, {5, 6}, {6, 7}, {0, 4}, {1, 5}, {2, 6}, {3, 7}}};
    auto g = structure_from_graph(ladder);
    CHECK(eval_dp(g, {{0, 3}, {4, 7}}));
    CHECK_FALSE(eval_sdp(g, 1, {{0, 3}, {4, 7}}));
    CHECK(eval_sdp(g, 1, {{0, 3}, {4, 7}}) == check::exhaustive_paths(ladder, {{0, 3}, {4, 7}}, 1));
    CHECK(eval_sdp(g, 0, {{0, 3}, {4, 7}}) == eval_dp(g, {{0, 3}, {4, 7}}));
}

namespace {
BoundariedColoredGraph boundaried(PlainGraph g, std::vector<int> boundary) {
    BoundariedColoredGraph b;
    b.base = structure_from_graph(g);
    b.boundary = std::move(boundary);
    return b;
}
}  // namespace

TEST_CASE("pairings of an edgeless graph") {
    auto ps = enumerate_pairings(boundaried({3, {}}, {0, 2}));
    REQUIRE(ps.size() == 1);
    CHECK(ps[0].paths.empty());
}

TEST_CASE("pairings of a path between its ends") {
    PairingOptions opt;
    opt.min_length = 2;
    auto ps = enumerate_pairings(boundaried(make_path(3), {0, 2}), opt);
    REQUIRE(ps.size() == 2);
    CHECK(ps[0].paths.empty());
    CHECK(ps[1].paths == std::vector<std::vector<int>>{{0, 1, 2}});
}

TEST_CASE("triangle pairings depend on the minimum length") {
    PairingOptions longer;
    longer.min_length = 2;
    auto ps2 = enumerate_pairings(boundaried(make_complete(3), {0, 1}), longer);
    auto ps1 = enumerate_pairings(boundaried(make_complete(3), {0, 1}));
    auto has = [](const std::vector<Pairing>& ps, std::vector<int> path) {
        for (const auto& p : ps)
            if (p.paths == std::vector<std::vector<int>>{path}) return true;
        return false;
    };
    CHECK(has(ps2, {0, 2, 1}));
    CHECK_FALSE(has(ps2, {0, 1}));
    CHECK(has(ps1, {0, 2, 1}));
    CHECK(has(ps1, {0, 1}));
}

TEST_CASE("imprints") {
    CHECK(imprint(Pairing{{}, {0, 1, 2}}).empty());
    CHECK(imprint(Pairing{{{0, 5, 2}}, {0, 1, 2}}) == IndexGraph{{0, 2}});
    CHECK(imprint(Pairing{{{0, 1}, {2, 3}}, {0, 1, 2, 3}}) == IndexGraph{{0, 1}, {2, 3}});
}

TEST_CASE("compression of tiny graphs") {
    auto single = compression(boundaried({1, {}}, {0}));
    CHECK(single.parts == std::vector<std::vector<int>>{{0}});
    CHECK(single.hp == std::vector<IndexGraph>{IndexGraph{}});
    auto path = compression(boundaried(make_path(3), {0, 2}));
    CHECK(path.hp == std::vector<IndexGraph>{IndexGraph{}, IndexGraph{{0, 1}}});
    CHECK(path == pattern_of(boundaried(make_path(3), {0, 2}), 3));
}

TEST_CASE("gluing two paths at a shared vertex") {
    Pairing a{{{0, 1}}, {0, BOT, 1}};
    Pairing b{{{0, 1}}, {BOT, 0, 1}};
    auto g = glue_pairings(a, b, 1);
    REQUIRE(g.paths.size() == 1);
    CHECK(g.paths[0].size() == 3);
}

TEST_CASE("gluing requires complementary boundaries") {
    Pairing a{{}, {BOT, 1}};
    CHECK_THROWS_AS(glue_pairings(a, a, 0), InputError);
}

TEST_CASE("gluing without a shared suffix is a disjoint union") {
    Pairing a{{{0, 1, 2}}, {0, 2, BOT, BOT}};
    Pairing b{{{0, 1, 2}}, {BOT, BOT, 0, 2}};
    auto g = glue_pairings(a, b, 0);
    CHECK(g.paths.size() == 2);
}
