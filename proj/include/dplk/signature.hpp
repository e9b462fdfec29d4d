#pragma once

#include <string>
#include <vector>

#include "dplk/formula.hpp"
#include "dplk/normal_form.hpp"
#include "dplk/pattern.hpp"
#include "dplk/semantics.hpp"

namespace dplk {

// Atoms an atomic type decides over x1..xr: x_i = x_i, then the full-DNF
// family. Atoms touching an absent entry are false.
struct TypeShape {
    int r = 0;
    Vocabulary voc;
    int dp_cap = 0;

    bool operator==(const TypeShape&) const = default;
    std::vector<std::string> vars() const;
    std::vector<F> family() const;
    DnfShape dnf() const { return {vars(), voc, dp_cap}; }
};

TypeShape type_shape(const ColoredStructure& s, int r, int dp_cap);

// Node of a canonical nested set. Depth 0 holds the sorted indices of the
// true family atoms; depth i > 0 holds sorted, distinct depth i-1 nodes.
struct SigNode {
    int depth = 0;
    std::vector<int> atoms;
    std::vector<SigNode> elems;
    std::string text;

    bool operator==(const SigNode& o) const { return text == o.text; }
    bool operator<(const SigNode& o) const { return text < o.text; }
};

SigNode make_type(std::vector<int> atoms, const std::vector<F>& family);
SigNode make_set(std::vector<SigNode> elems);

struct Signature {
    TypeShape shape;
    SigNode root;

    bool operator==(const Signature& o) const { return shape == o.shape && root == o.root; }
};

std::string serialize_signature(const Signature& s);
Signature parse_signature(const std::string& text);
// Throws InputError when the shapes differ (for example different caps).
bool signature_equal(const Signature& a, const Signature& b);

std::vector<int> atomic_type(const Model& m, const TypeShape& shape, const std::vector<int>& tuple);

// R_i = V for i = 1..r.
std::vector<std::vector<int>> full_ranges(const ColoredStructure& s, int r);

Signature signature(const ColoredStructure& s, const std::vector<std::vector<int>>& ranges, int dp_cap);
Signature signature(const ColoredStructure& s, int r, int dp_cap);

struct AssignmentNode {
    int label = BOT;
    SigNode sig;
    std::vector<AssignmentNode> kids;
};

AssignmentNode build_assignment(const ColoredStructure& s, const std::vector<std::vector<int>>& ranges, int dp_cap);
Pattern pattern_coloring(const ColoredStructure& s, const std::vector<int>& leaf_labels, int dp_cap);

struct SpanningResult {
    bool by_matrix = false;    // leaves satisfy the matrix
    bool by_patterns = false;  // leaf pattern-colorings lie in the pattern set
};

SpanningResult check_via_spanning_tree(const ColoredStructure& s, const PrenexSentence& p, int dp_cap);

// Sentence true exactly on structures with this (unannotated) signature.
F signature_to_sentence(const Signature& beta);

std::vector<std::vector<int>> reduce_annotation(const ColoredStructure& s, std::vector<std::vector<int>> ranges,
                                                int dp_cap);

struct AgreementReport {
    bool equal_signatures = false;
    int checked = 0;
    std::vector<std::string> counterexamples;
};

AgreementReport check_sentence_agreement(const ColoredStructure& s1, const ColoredStructure& s2, int r, int dp_cap,
                          const std::vector<F>& corpus);

}  // namespace dplk
