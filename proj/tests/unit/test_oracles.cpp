#include <doctest.h>

#include "generators.hpp"
#include "oracles.hpp"

using namespace dplk;
using namespace dplk::check;

TEST_CASE("candidate paths") {
    CHECK(candidate_paths(make_path(3), 0, 2) == std::vector<std::vector<int>>{{0, 1, 2}});
    CHECK(candidate_paths(make_path(2), 0, 1).empty());
    CHECK(candidate_paths(make_path(2), 1, 1) == std::vector<std::vector<int>>{{1}});
    CHECK(candidate_paths(make_complete(4), 0, 1).size() == 4);
}

TEST_CASE("exhaustive path systems with frozen answers") {
    CHECK_FALSE(exhaustive_paths(make_complete(4), {{0, 1}, {2, 3}}));
    CHECK_FALSE(exhaustive_paths(make_complete(5), {{0, 1}, {2, 3}}));
    CHECK(exhaustive_paths(make_complete(6), {{0, 1}, {2, 3}}));
    CHECK(exhaustive_paths(make_cycle(6), {{0, 2}, {3, 5}}));
    CHECK_FALSE(exhaustive_paths(make_cycle(6), {{0, 2}, {3, 5}}, 1));
    CHECK_FALSE(exhaustive_paths(make_path(3), {{0, 2}, {1, 1}}));
}

TEST_CASE("distances") {
    auto d = all_distances({4, {{0, 1}, {1, 2}}});
    CHECK(d[0][2] == 2);
    CHECK(d[0][3] == -1);
}

TEST_CASE("generators are deterministic") {
    Rng a(5), b(5);
    CHECK(serialize_structure(random_structure(a, {})) == serialize_structure(random_structure(b, {})));
    SentenceOptions o;
    CHECK(to_string(random_sentence(a, o)) == to_string(random_sentence(b, o)));
    CHECK(all_graphs(3).size() == 8);
}
