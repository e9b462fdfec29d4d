#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "dplk/structure.hpp"

namespace dplk {

using Edge = std::pair<int, int>;
using EdgePairing = std::vector<std::pair<Edge, Edge>>;

// Partition of E(K_{4r+1}) into pairs of endpoint-disjoint edges.
EdgePairing pair_clique_edges(int r);
// Lists every violated invariant; empty when the pairing is valid.
std::vector<std::string> check_edge_pairing(int r, const EdgePairing& p);

struct LinkabilityGadget {
    ColoredStructure structure;  // annotation 1 is R = W u L
    int k = 0;                   // clique size asked for
    int k_prime = 0;             // number of terminal pairs
    std::vector<std::vector<int>> s_sets;  // S_x per host vertex
    std::vector<int> w;                    // w_x per host vertex
    std::vector<int> l;                    // e_xy per host edge, in host edge order
};

// Requires k = 4r + 1 with r >= 2.
LinkabilityGadget build_linkability_gadget(const PlainGraph& g, int k);
std::vector<std::string> check_linkability_gadget(const PlainGraph& g, const LinkabilityGadget& gad);

struct GridTilingInstance {
    int d = 0;
    int k = 0;
    // cells[i * k + j] lists the allowed pairs (x, y), 1-based.
    std::vector<std::vector<std::pair<int, int>>> cells;
};

struct GridTilingGadget {
    ColoredStructure structure;  // colors split into O, T, OT, OTB, OTC
    std::vector<int> b, c, o, t; // the overlapping color sets before splitting
    PlainGraph pattern;          // k x k grid, vertex i * k + j
    std::vector<int> lambda;     // 0 = black (B), 1 = green (C)
    int side = 0;                // kD
};

GridTilingGadget build_gridtiling_gadget(const GridTilingInstance& inst);

bool oracle_grid_tiling(const GridTilingInstance& inst);

// Topological minor of h in g with branch vertex x inside classes[lambda[x]]
// and every path inside one of the classes.
bool oracle_mono_path_tm(const PlainGraph& g, const std::vector<std::vector<int>>& classes, const PlainGraph& h,
                         const std::vector<int>& lambda);

struct GadgetCheck {
    bool tiling = false;
    bool minor = false;
    bool agree() const { return tiling == minor; }
};

// Both sides of the grid tiling reduction on a tiny instance.
GadgetCheck verify_gadget_iff(const GridTilingInstance& inst);

std::string serialize_grid_tiling(const GridTilingInstance& inst);
GridTilingInstance parse_grid_tiling(const std::string& text);

}  // namespace dplk
