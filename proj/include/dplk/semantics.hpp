#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dplk/formula.hpp"
#include "dplk/paths.hpp"
#include "dplk/pattern.hpp"
#include "dplk/structure.hpp"

namespace dplk {

// Structure-derived lookup tables plus a memo of dp/sdp answers.
class Model {
public:
    explicit Model(ColoredStructure s);

    const ColoredStructure& structure() const { return s_; }
    int n() const { return s_.n; }
    bool edge(int u, int v) const { return u != BOT && v != BOT && adj_[u * s_.n + v]; }
    // Position among colors then pcolors, or -1.
    int unary_position(const std::string& name) const;
    bool in_unary(int pos, int v) const { return v != BOT && unary_[pos][v]; }
    bool in_annotation(int i, int v) const { return v != BOT && annot_[i][v]; }
    const std::vector<int>& annotation(int i) const { return s_.annotations[i]; }
    int annotations() const { return static_cast<int>(s_.annotations.size()); }
    int constant(const std::string& name) const;
    bool dp(std::vector<VertexPair> pairs) const;
    bool sdp(int radius, std::vector<VertexPair> pairs) const;
    const DpSolver& solver() const { return solver_; }

private:
    ColoredStructure s_;
    std::vector<char> adj_;
    std::vector<std::vector<char>> unary_;
    std::vector<std::vector<char>> annot_;
    DpSolver solver_;
    mutable std::map<std::vector<int>, bool> memo_;
};

// A formula compiled against a model: variables become slots.
class CompiledFormula {
public:
    CompiledFormula(const F& f, const Model& m, const std::vector<std::string>& free = {});
    // Values of the free variables, in order; BOT allowed.
    bool eval(const std::vector<int>& free_values = {}) const;

    struct Node;

private:
    bool run(const Node& nd, std::vector<int>& env) const;

    const Model& m_;
    std::shared_ptr<Node> root_;
    int slots_ = 0;
    int free_ = 0;
};

bool evaluate(const Model& m, const F& sentence);
bool evaluate(const ColoredStructure& s, const F& sentence);
bool evaluate(const ColoredStructure& s, const PrenexSentence& p);

// Constant values in vocabulary order, used as the apex tuple.
ApexTuple constant_tuple(const ColoredStructure& s);

Pattern pattern_of(const BoundariedColoredGraph& g, int dp_cap);
Pattern pattern_of(const Model& m, const ApexTuple& apex, const std::vector<int>& boundary, int dp_cap);
bool realizes(const ColoredStructure& s, const std::vector<int>& tuple, const Pattern& h, int dp_cap);

}  // namespace dplk
