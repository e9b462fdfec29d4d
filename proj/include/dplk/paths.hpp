#pragma once

#include <utility>
#include <vector>

#include "dplk/pattern.hpp"
#include "dplk/structure.hpp"

namespace dplk {

using VertexPair = std::pair<int, int>;

// Disjoint-paths search over a fixed graph. Reusable across many queries.
class DpSolver {
public:
    explicit DpSolver(const ColoredStructure& s);
    explicit DpSolver(const PlainGraph& g);

    bool dp(const std::vector<VertexPair>& pairs) const;
    bool sdp(int radius, const std::vector<VertexPair>& pairs) const;
    // Witness paths for dp; empty optional-like result signalled by return.
    bool dp_witness(const std::vector<VertexPair>& pairs, std::vector<std::vector<int>>& paths) const;

    int n() const { return n_; }
    const std::vector<std::vector<int>>& adj() const { return adj_; }
    int distance(int u, int v) const;

private:
    void init();
    bool search(int radius, const std::vector<VertexPair>& pairs, std::vector<std::vector<int>>* out) const;

    int n_;
    std::vector<std::vector<int>> adj_;
    mutable std::vector<std::vector<int>> dist_;
};

bool eval_dp(const ColoredStructure& s, const std::vector<VertexPair>& pairs);
bool eval_sdp(const ColoredStructure& s, int radius, const std::vector<VertexPair>& pairs);

struct Pairing {
    std::vector<std::vector<int>> paths;  // each oriented front <= back, sorted
    std::vector<int> boundary;

    bool operator==(const Pairing&) const = default;
    auto operator<=>(const Pairing&) const = default;
};

struct PairingOptions {
    int min_length = 1;           // 1 or 2 edges for paths with distinct ends
    bool trivial_paths = false;   // admit single-vertex paths at boundary vertices
    int max_n = 8;
};

std::vector<Pairing> enumerate_pairings(const BoundariedColoredGraph& g, const PairingOptions& opt = {});
IndexGraph imprint(const Pairing& p);
// Pattern computed from the imprints of all pairings.
Pattern compression(const BoundariedColoredGraph& g, int max_n = 8);
Pairing glue_pairings(const Pairing& p1, const Pairing& p2, int shared);

// V, kappa, delta, H^e of a boundaried graph (shared by pattern_of and compression).
Pattern boundary_skeleton(const BoundariedColoredGraph& g);

}  // namespace dplk
