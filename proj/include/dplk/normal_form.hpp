#pragma once

#include <compare>
#include <string>
#include <utility>
#include <vector>

#include "dplk/formula.hpp"
#include "dplk/pattern.hpp"

namespace dplk {

// Variables x_1..x_r (by name, in index order), the vocabulary, and the
// largest dp arity a full clause must decide.
struct DnfShape {
    std::vector<std::string> vars;
    Vocabulary voc;
    int dp_cap = 0;

    int r() const { return static_cast<int>(vars.size()); }
};

int default_dp_cap(int r);

// Canonical dp atom over indices: sorted list of sorted pairs.
using DpAtom = std::vector<IndexPair>;

DpAtom canonical_dp(std::vector<IndexPair> pairs);
// Pairs of a proper atom touch pairwise disjoint index sets.
bool is_proper(const DpAtom& a);
bool has_nonloop(const DpAtom& a);

// Every proper dp atom over [r] with a non-loop pair and arity <= cap.
std::vector<DpAtom> proper_dp_atoms(int r, int cap);

// One complete decision of every atom family, stored at block level.
struct FullAssignment {
    std::vector<int> block;        // index -> block, blocks numbered by first index
    std::vector<int> const_block;  // constant -> block or -1
    std::vector<int> color;        // block -> color position or -1
    std::vector<unsigned> pcolor;  // block -> bitmask over pcolors
    std::vector<IndexPair> edges;  // block pairs a < b
    std::vector<DpAtom> dp;        // true block-level proper atoms with a non-loop pair

    int blocks() const { return static_cast<int>(color.size()); }
    auto operator<=>(const FullAssignment&) const = default;
    bool operator==(const FullAssignment&) const = default;
};

using Literal = std::pair<F, bool>;
using Clause = std::vector<Literal>;

// Atoms every full clause decides: x_i = x_j (i<j), x_i = @c, x_i in U,
// E(x_i,x_j) (i<j) and the proper dp atoms up to the cap.
std::vector<F> atom_family(const DnfShape& shape);

// Truth of an atom under an assignment. Constants may appear only as x = @c.
bool decide(const FullAssignment& a, const Formula& atom, const DnfShape& shape);

std::vector<FullAssignment> all_assignments(const DnfShape& shape, long long budget);

struct FullDnf {
    DnfShape shape;
    std::vector<F> family;
    std::vector<FullAssignment> clauses;  // sorted

    Clause clause(size_t i) const;
    F to_formula() const;
};

FullDnf to_full_dnf(const F& m, const DnfShape& shape, long long budget = 1000000);

Pattern assignment_pattern(const FullAssignment& a, const DnfShape& shape);
// Pattern of a full clause, or the empty pattern when its equalities are
// inconsistent or a literal occurs with both signs. Throws if not full.
Pattern clause_pattern(const Clause& c, const DnfShape& shape);
std::vector<Pattern> ext_patterns(const F& m, const DnfShape& shape, long long budget = 1000000);

}  // namespace dplk
