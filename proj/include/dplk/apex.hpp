#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dplk/formula.hpp"
#include "dplk/structure.hpp"

namespace dplk {

// Names of the projected colors and apex constants.
std::string apex_color_name(int i);     // C1, C2, ...
std::string apex_constant_name(int i);  // a1, a2, ...

ColoredStructure apex_project_structure(const ColoredStructure& s, const ApexTuple& a);

// Describes a set of special vertices through which paths may be rerouted.
// The disjoint-paths rewrite expresses dp in a graph whose edges at the
// special vertices differ from the evaluated structure.
struct ApexContext {
    std::vector<Term> apex;
    std::function<F(const Term&, const Term&)> same;        // equality in the target graph
    std::function<F(const Term&, const Term&)> adjacent;    // edge in the target graph
    std::function<F(int, const Term&)> adjacent_to_apex;    // apex i adjacent to a non-apex vertex
    std::function<F(int)> present;                          // empty: every apex exists
    std::vector<int> group;                                 // at most one active apex per group
};

ApexContext projection_context(int l);

class ZetaBuilder {
public:
    ZetaBuilder(ApexContext ctx, NameSupply& names, long long budget);
    F build(const std::vector<std::pair<Term, Term>>& pairs);
    long long nodes() const { return nodes_; }

private:
    struct Active;
    F core(unsigned present, const std::vector<std::pair<Term, Term>>& pairs);
    F routed(unsigned present, const std::vector<std::pair<Term, Term>>& pairs, std::vector<Active>& act);
    F segments(unsigned present, const std::vector<std::pair<Term, Term>>& pairs, std::vector<Active>& act, size_t i);
    F ends(unsigned present, const std::vector<std::pair<Term, Term>>& pairs, std::vector<Active>& act, size_t i,
           std::vector<std::pair<Term, Term>>& extra);
    F neq(const Term& a, const Term& b) { return neg(ctx_.same(a, b)); }
    void charge(long long n);

    ApexContext ctx_;
    NameSupply& names_;
    long long budget_;
    long long nodes_ = 0;
};

// Rewrites E atoms and dp atoms for the projected vocabulary with l apices.
F apex_project_sentence(const F& phi, int l, long long budget = 10000000);

struct ProjectionCheck {
    bool original = false;
    bool projected = false;
    bool agree() const { return original == projected; }
};

ProjectionCheck check_projection(const ColoredStructure& s, const ApexTuple& a, const F& phi, long long budget = 10000000);

}  // namespace dplk
