#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dplk/formula.hpp"
#include "dplk/structure.hpp"

namespace dplk {

enum class ProblemKind {
    DisjointPaths,
    Minor,
    TopologicalMinor,
    UnorderedLinkability,
    OrderedLinkability,
    Deletion,
    Amalgamation,
    Replacement,
    Reconfiguration,
};

std::string kind_name(ProblemKind k);
ProblemKind parse_kind(const std::string& name);
const std::vector<ProblemKind>& all_kinds();

// A graph on [k] stored as a bitmask over the pairs (i, j), i < j, in
// lexicographic order.
using NumberedGraph = unsigned;

int numbered_pair_index(int k, int i, int j);
NumberedGraph numbered_graph_of(int k, const std::vector<std::pair<int, int>>& edges);
std::string numbered_graph_to_string(int k, NumberedGraph g);

// Total, size-preserving map on k-numbered graphs.
struct ReplacementAction {
    int k = 0;
    std::vector<NumberedGraph> table;  // indexed by the source graph

    NumberedGraph apply(NumberedGraph g) const { return table.at(g); }
    bool operator==(const ReplacementAction&) const = default;
};

// Builtins: identity, complement, delete-all, clique.
ReplacementAction builtin_action(const std::string& name, int k);
// Text form: a line "k K", then lines "{1-2,2-3} -> {1-3}". Graphs that are
// not listed map to themselves.
ReplacementAction parse_action(const std::string& text);
std::string serialize_action(const ReplacementAction& a);

struct ProblemInstance {
    ProblemKind kind = ProblemKind::DisjointPaths;
    PlainGraph host;                                 // G, or G_1 for amalgamation
    PlainGraph host2;                                // G_2 for amalgamation
    PlainGraph pattern;                              // H for containment and linkability
    std::vector<std::pair<int, int>> terminals;      // disjoint paths
    std::vector<int> roots;                          // R for linkability
    int k = 0;                                       // deletion, amalgamation, replacement
    F phi;                                           // inner sentence
    ReplacementAction action;
    std::vector<int> source, target;                 // reconfiguration S and T
    int length = 0;                                  // reconfiguration bound
    bool induced = false;                            // sdp variant
    int radius = 0;
};

// Throws InputError when the payload does not fit the kind.
void validate_instance(const ProblemInstance& inst);

// JSON parameters; see the README for field names.
ProblemInstance parse_instance(ProblemKind kind, const std::string& json_text);

struct Encoding {
    F sentence;
    Vocabulary vocabulary;
    int rank = 0;
};

Encoding encode(const ProblemInstance& inst, long long budget = 10000000);

// The structure the encoded sentence is evaluated on.
ColoredStructure build_structure(const ProblemInstance& inst);

// Direct combinatorial decision procedure.
bool oracle(const ProblemInstance& inst, long long budget = 100000000);

// Helpers shared with the gadgets module.
bool has_minor(const PlainGraph& g, const PlainGraph& h);
bool has_topological_minor(const PlainGraph& g, const PlainGraph& h);
// Paths between the given pairs, length >= 1, internally disjoint, avoiding
// every terminal except their own ends; allowed[v] restricts inner vertices.
bool route_pairs(const PlainGraph& g, const std::vector<std::pair<int, int>>& pairs, const std::vector<bool>& allowed);

}  // namespace dplk
