#pragma once

#include <compare>
#include <string>
#include <utility>
#include <vector>

namespace dplk {

using IndexPair = std::pair<int, int>;
using IndexGraph = std::vector<IndexPair>;  // sorted pairs (i, j) with i <= j

// Pattern quintuple (V, kappa, delta, H^e, H^P) over boundary indices
// 0..r-1. kappa pairs (index, apex position), delta pairs (index, unary
// position). H^P members may contain loops (i, i): a trivial path pinned at
// that boundary vertex.
struct Pattern {
    bool empty = false;
    int r = 0;
    std::vector<std::vector<int>> parts;
    std::vector<IndexPair> kappa;
    std::vector<IndexPair> delta;
    IndexGraph he;
    std::vector<IndexGraph> hp;

    auto operator<=>(const Pattern&) const = default;
    bool operator==(const Pattern&) const = default;

    static Pattern empty_pattern(int r) {
        Pattern p;
        p.empty = true;
        p.r = r;
        return p;
    }
};

std::string pattern_to_string(const Pattern& p);

// Every index pair {i, j}, i <= j, whose boundary vertices form a pair of m.
// Pairs in m are (u, w) vertex pairs, u == w for a trivial path.
IndexGraph lift_linkage(const std::vector<int>& boundary, const std::vector<IndexPair>& m);

}  // namespace dplk
