#pragma once

#include <compare>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dplk/structure.hpp"

namespace dplk {

enum class Op { True, False, Eq, Mem, Edge, Dp, Sdp, InAnnot, Not, And, Or, Exists, Forall };

struct Term {
    bool constant = false;
    std::string name;

    auto operator<=>(const Term&) const = default;
    bool operator==(const Term&) const = default;
};

inline Term var(std::string n) { return Term{false, std::move(n)}; }
inline Term cst(std::string n) { return Term{true, std::move(n)}; }

struct Formula;
using F = std::shared_ptr<const Formula>;

// Atoms keep their terms in `terms`. Mem keeps the unary name in `name`.
// Quantifiers keep the bound variable in `name` and the optional annotation
// index (1-based, 0 = none) in `num`. Sdp keeps its radius in `num`.
// InAnnot keeps the annotation index in `num`.
struct Formula {
    Op op = Op::True;
    std::vector<Term> terms;
    std::string name;
    int num = 0;
    std::vector<F> kids;
};

bool same(const F& a, const F& b);

F f_true();
F f_false();
F eq(Term a, Term b);
F neq(Term a, Term b);
F mem(Term t, std::string unary);
F edge(Term a, Term b);
F dp(std::vector<std::pair<Term, Term>> pairs);
F sdp(int radius, std::vector<std::pair<Term, Term>> pairs);
F in_annot(Term t, int index);
F neg(F f);
F conj(std::vector<F> kids);
F disj(std::vector<F> kids);
F conj2(F a, F b);
F disj2(F a, F b);
F implies(F a, F b);
F exists(std::string v, F body, int annot = 0);
F forall(std::string v, F body, int annot = 0);
// Existentially binds vars in order, placing each constraint directly under
// the innermost quantifier it mentions.
F exists_block(const std::vector<std::string>& vars, const std::vector<F>& constraints, const F& inner);

bool is_atom(const Formula& f);
bool is_quantifier(const Formula& f);
std::vector<std::pair<Term, Term>> term_pairs(const Formula& f);

struct Vocabulary {
    std::vector<std::string> colors;
    std::vector<std::string> pcolors;
    std::vector<std::string> constants;
    int annotations = 0;

    bool operator==(const Vocabulary&) const = default;
    std::vector<std::string> unary() const;
};

Vocabulary vocabulary_of(const ColoredStructure& s);

F parse_formula(const std::string& text);
// Parses and requires a closed formula.
F parse_sentence(const std::string& text);
std::string to_string(const F& f);

// Throws InputError naming the first unknown color, constant or annotation.
void check_vocabulary(const F& f, const Vocabulary& v);

std::set<std::string> free_vars(const F& f);
std::set<std::string> all_vars(const F& f);
std::set<std::string> constant_names(const F& f);
std::set<std::string> unary_names(const F& f);
int quantifier_rank(const F& f);
size_t node_count(const F& f);
bool has_op(const F& f, Op op);
int max_dp_arity(const F& f);

// Bottom-up rewrite of atoms. The callback returns nullptr to keep an atom.
F map_atoms(const F& f, const std::function<F(const Formula&)>& fn);
// Replaces free occurrences of variable `from` by term `to`.
F substitute(const F& f, const std::string& from, const Term& to);
// Constant-folds true/false and flattens nested and/or.
F simplify(const F& f);

struct Quantifier {
    bool exists = true;
    std::string var;
    int annot = 0;

    bool operator==(const Quantifier&) const = default;
};

struct PrenexSentence {
    std::vector<Quantifier> prefix;
    F matrix;
};

PrenexSentence to_prenex(const F& f);
F from_prenex(const PrenexSentence& p);
std::string to_string(const PrenexSentence& p);

// Fresh variable names avoiding a reserved set.
class NameSupply {
public:
    explicit NameSupply(std::set<std::string> taken, std::string stem = "v") : taken_(std::move(taken)), stem_(std::move(stem)) {}
    std::string fresh();
    std::string fresh(const std::string& hint);
    void reserve(const std::string& n) { taken_.insert(n); }

private:
    std::set<std::string> taken_;
    std::string stem_;
    int next_ = 1;
};

}  // namespace dplk
