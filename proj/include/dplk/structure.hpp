#pragma once

#include <string>
#include <utility>
#include <vector>

namespace dplk {

constexpr int BOT = -1;

struct NamedSet {
    std::string name;
    std::vector<int> members;  // sorted, unique

    bool operator==(const NamedSet&) const = default;
};

struct Constant {
    std::string name;
    int value = BOT;

    bool operator==(const Constant&) const = default;
};

// Finite colored graph with constants and annotation sets. Colors are
// pairwise disjoint; pcolors may overlap anything.
struct ColoredStructure {
    int n = 1;
    std::vector<std::pair<int, int>> edges;  // u < v, sorted, unique
    std::vector<NamedSet> colors;
    std::vector<NamedSet> pcolors;
    std::vector<Constant> constants;
    std::vector<std::vector<int>> annotations;

    bool operator==(const ColoredStructure&) const = default;

    // Sorts and deduplicates every list. Does not validate.
    void normalize();
    bool has_edge(int u, int v) const;
    int constant_index(const std::string& name) const;
    int constant_value(const std::string& name) const;
    const NamedSet* find_unary(const std::string& name) const;
    std::vector<std::vector<int>> adjacency() const;
};

using ApexTuple = std::vector<int>;

struct BoundariedColoredGraph {
    ColoredStructure base;
    ApexTuple apex;
    std::vector<int> boundary;
};

struct PlainGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;

    bool operator==(const PlainGraph&) const = default;
};

ColoredStructure parse_structure(const std::string& text);
std::string serialize_structure(const ColoredStructure& s);
std::vector<std::string> validate(const ColoredStructure& s, bool constants_as_apex = false);
void require_valid(const ColoredStructure& s, bool constants_as_apex = false);
ColoredStructure disjoint_union(const ColoredStructure& a, const ColoredStructure& b);
PlainGraph gaifman_graph(const ColoredStructure& s);

// Structure with vertices relabeled by perm (old id -> new id).
ColoredStructure relabel(const ColoredStructure& s, const std::vector<int>& perm);
// Substructure induced on keep (ascending order defines new ids). Constants
// on dropped vertices become absent.
ColoredStructure induced_substructure(const ColoredStructure& s, const std::vector<int>& keep);

ColoredStructure structure_from_graph(const PlainGraph& g);
PlainGraph make_path(int n);
PlainGraph make_cycle(int n);
PlainGraph make_complete(int n);

}  // namespace dplk
