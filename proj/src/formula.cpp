#include "dplk/formula.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>

#include "dplk/error.hpp"

namespace dplk {

namespace {

F make(Op op, std::vector<Term> terms = {}, std::string name = {}, int num = 0, std::vector<F> kids = {}) {
    auto f = std::make_shared<Formula>();
    f->op = op;
    f->terms = std::move(terms);
    f->name = std::move(name);
    f->num = num;
    f->kids = std::move(kids);
    return f;
}

std::vector<Term> flatten_pairs(const std::vector<std::pair<Term, Term>>& pairs) {
    if (pairs.empty()) throw InputError("dp/sdp needs at least one pair");
    std::vector<Term> t;
    for (const auto& [a, b] : pairs) {
        t.push_back(a);
        t.push_back(b);
    }
    return t;
}

}  // namespace

bool same(const F& a, const F& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->op != b->op || a->terms != b->terms || a->name != b->name || a->num != b->num ||
        a->kids.size() != b->kids.size())
        return false;
    for (size_t i = 0; i < a->kids.size(); ++i)
        if (!same(a->kids[i], b->kids[i])) return false;
    return true;
}

F f_true() {
    static const F t = make(Op::True);
    return t;
}
F f_false() {
    static const F t = make(Op::False);
    return t;
}
F eq(Term a, Term b) { return make(Op::Eq, {std::move(a), std::move(b)}); }
F neq(Term a, Term b) { return neg(eq(std::move(a), std::move(b))); }
F mem(Term t, std::string unary) { return make(Op::Mem, {std::move(t)}, std::move(unary)); }
F edge(Term a, Term b) { return make(Op::Edge, {std::move(a), std::move(b)}); }
F dp(std::vector<std::pair<Term, Term>> pairs) { return make(Op::Dp, flatten_pairs(pairs)); }
F sdp(int radius, std::vector<std::pair<Term, Term>> pairs) {
    if (radius < 0) throw InputError("sdp radius must be non-negative");
    return make(Op::Sdp, flatten_pairs(pairs), {}, radius);
}
F in_annot(Term t, int index) {
    if (index < 1) throw InputError("annotation index must be >= 1");
    return make(Op::InAnnot, {std::move(t)}, {}, index);
}
F neg(F f) { return make(Op::Not, {}, {}, 0, {std::move(f)}); }
F conj(std::vector<F> kids) {
    if (kids.empty()) return f_true();
    if (kids.size() == 1) return kids[0];
    return make(Op::And, {}, {}, 0, std::move(kids));
}
F disj(std::vector<F> kids) {
    if (kids.empty()) return f_false();
    if (kids.size() == 1) return kids[0];
    return make(Op::Or, {}, {}, 0, std::move(kids));
}
F conj2(F a, F b) { return conj({std::move(a), std::move(b)}); }
F disj2(F a, F b) { return disj({std::move(a), std::move(b)}); }
F implies(F a, F b) { return disj({neg(std::move(a)), std::move(b)}); }
F exists(std::string v, F body, int annot) { return make(Op::Exists, {}, std::move(v), annot, {std::move(body)}); }
F forall(std::string v, F body, int annot) { return make(Op::Forall, {}, std::move(v), annot, {std::move(body)}); }

bool is_atom(const Formula& f) {
    switch (f.op) {
        case Op::True:
        case Op::False:
        case Op::Eq:
        case Op::Mem:
        case Op::Edge:
        case Op::Dp:
        case Op::Sdp:
        case Op::InAnnot:
            return true;
        default:
            return false;
    }
}

bool is_quantifier(const Formula& f) { return f.op == Op::Exists || f.op == Op::Forall; }

std::vector<std::pair<Term, Term>> term_pairs(const Formula& f) {
    std::vector<std::pair<Term, Term>> out;
    for (size_t i = 0; i + 1 < f.terms.size(); i += 2) out.push_back({f.terms[i], f.terms[i + 1]});
    return out;
}

std::vector<std::string> Vocabulary::unary() const {
    std::vector<std::string> u = colors;
    u.insert(u.end(), pcolors.begin(), pcolors.end());
    return u;
}

Vocabulary vocabulary_of(const ColoredStructure& s) {
    Vocabulary v;
    for (const auto& c : s.colors) v.colors.push_back(c.name);
    for (const auto& c : s.pcolors) v.pcolors.push_back(c.name);
    for (const auto& c : s.constants) v.constants.push_back(c.name);
    v.annotations = static_cast<int>(s.annotations.size());
    return v;
}

// ---------------------------------------------------------------- parsing

namespace {

enum class Tok { Ident, Int, Sym, End };

struct Token {
    Tok kind;
    std::string text;
    size_t pos;
};

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            out.push_back({Tok::Ident, s.substr(i, j - i), i});
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back({Tok::Int, s.substr(i, j - i), i});
            i = j;
            continue;
        }
        if (c == '!' && i + 1 < s.size() && s[i + 1] == '=') {
            out.push_back({Tok::Sym, "!=", i});
            i += 2;
            continue;
        }
        if (std::string("()[],.&|!=@#").find(c) != std::string::npos) {
            out.push_back({Tok::Sym, std::string(1, c), i});
            ++i;
            continue;
        }
        throw InputError("formula syntax error at offset " + std::to_string(i) + ": unexpected character '" +
                         std::string(1, c) + "'");
    }
    out.push_back({Tok::End, "", s.size()});
    return out;
}

const std::set<std::string>& keywords() {
    static const std::set<std::string> k{"exists", "forall", "in", "true", "false", "E", "dp", "sdp"};
    return k;
}

struct Parser {
    std::vector<Token> toks;
    size_t p = 0;

    const Token& peek(size_t k = 0) const { return toks[std::min(p + k, toks.size() - 1)]; }
    [[noreturn]] void fail(const std::string& msg) const {
        throw InputError("formula syntax error at offset " + std::to_string(peek().pos) + ": " + msg);
    }
    bool is_sym(const std::string& s, size_t k = 0) const { return peek(k).kind == Tok::Sym && peek(k).text == s; }
    bool is_kw(const std::string& s, size_t k = 0) const { return peek(k).kind == Tok::Ident && peek(k).text == s; }
    void expect(const std::string& s) {
        if (!is_sym(s)) fail("expected '" + s + "'");
        ++p;
    }
    int integer() {
        if (peek().kind != Tok::Int) fail("expected integer");
        int v = std::stoi(peek().text);
        ++p;
        return v;
    }
    std::string ident() {
        if (peek().kind != Tok::Ident) fail("expected name");
        return toks[p++].text;
    }
    std::string variable() {
        if (peek().kind != Tok::Ident || keywords().count(peek().text)) fail("expected variable");
        return toks[p++].text;
    }

    F matrix() {
        std::vector<F> kids{conjunction()};
        while (is_sym("|")) {
            ++p;
            kids.push_back(conjunction());
        }
        return disj(kids);
    }
    F conjunction() {
        std::vector<F> kids{unit()};
        while (is_sym("&")) {
            ++p;
            kids.push_back(unit());
        }
        return conj(kids);
    }
    F unit() {
        if (is_sym("!")) {
            ++p;
            return neg(unit());
        }
        if (is_sym("(")) {
            ++p;
            F f = matrix();
            expect(")");
            return f;
        }
        if (is_kw("exists") || is_kw("forall")) {
            bool ex = peek().text == "exists";
            ++p;
            std::string v = variable();
            int annot = 0;
            if (is_kw("in")) {
                ++p;
                annot = integer();
                if (annot < 1) fail("annotation index must be >= 1");
            }
            expect(".");
            F body = matrix();
            return ex ? exists(v, body, annot) : forall(v, body, annot);
        }
        return atom();
    }
    Term term() {
        if (is_sym("@")) {
            ++p;
            return cst(ident());
        }
        return var(variable());
    }
    std::vector<std::pair<Term, Term>> pair_list() {
        std::vector<Term> ts{term()};
        while (is_sym(",")) {
            ++p;
            ts.push_back(term());
        }
        expect(")");
        if (ts.size() % 2 != 0) fail("dp/sdp argument list must have even length");
        std::vector<std::pair<Term, Term>> out;
        for (size_t i = 0; i < ts.size(); i += 2) out.push_back({ts[i], ts[i + 1]});
        return out;
    }
    F atom() {
        if (is_kw("true")) {
            ++p;
            return f_true();
        }
        if (is_kw("false")) {
            ++p;
            return f_false();
        }
        if (is_kw("E") && is_sym("(", 1)) {
            p += 2;
            Term a = term();
            expect(",");
            Term b = term();
            expect(")");
            return edge(a, b);
        }
        if (is_kw("dp") && is_sym("(", 1)) {
            p += 2;
            return dp(pair_list());
        }
        if (is_kw("sdp") && is_sym("[", 1)) {
            p += 2;
            int r = integer();
            expect("]");
            expect("(");
            return sdp(r, pair_list());
        }
        Term a = term();
        if (is_sym("=")) {
            ++p;
            return eq(a, term());
        }
        if (is_sym("!=")) {
            ++p;
            return neq(a, term());
        }
        if (is_kw("in")) {
            ++p;
            if (is_sym("#")) {
                ++p;
                int i = integer();
                if (i < 1) fail("annotation index must be >= 1");
                return in_annot(a, i);
            }
            return mem(a, ident());
        }
        fail("expected atom");
    }
};

}  // namespace

F parse_formula(const std::string& text) {
    Parser ps{lex(text)};
    if (ps.peek().kind == Tok::End) ps.fail("empty formula");
    F f = ps.matrix();
    if (ps.peek().kind != Tok::End) ps.fail("unexpected trailing input '" + ps.peek().text + "'");
    return f;
}

F parse_sentence(const std::string& text) {
    F f = parse_formula(text);
    auto fv = free_vars(f);
    if (!fv.empty()) {
        std::string names;
        for (const auto& v : fv) names += (names.empty() ? "" : ", ") + v;
        throw InputError("unbound variables in sentence: " + names);
    }
    return f;
}

// ---------------------------------------------------------------- printing

namespace {

std::string term_str(const Term& t) { return t.constant ? "@" + t.name : t.name; }

void print(std::ostringstream& o, const F& f, int ctx);

// ctx: 0 top/quantifier body, 1 inside or, 2 inside and, 3 inside not
void print_list(std::ostringstream& o, const F& f, const char* sep, int self) {
    for (size_t i = 0; i < f->kids.size(); ++i) {
        if (i) o << sep;
        const auto& k = f->kids[i];
        bool paren = (k->op == Op::Or) || (self == 2 && k->op == Op::And) || (self == 1 && k->op == Op::Or) ||
                     is_quantifier(*k);
        if (self == 1 && k->op == Op::And) paren = false;
        if (paren) o << "(";
        print(o, k, paren ? 0 : self);
        if (paren) o << ")";
    }
}

void print(std::ostringstream& o, const F& f, int ctx) {
    switch (f->op) {
        case Op::True:
            o << "true";
            return;
        case Op::False:
            o << "false";
            return;
        case Op::Eq:
            o << term_str(f->terms[0]) << " = " << term_str(f->terms[1]);
            return;
        case Op::Mem:
            o << term_str(f->terms[0]) << " in " << f->name;
            return;
        case Op::InAnnot:
            o << term_str(f->terms[0]) << " in #" << f->num;
            return;
        case Op::Edge:
            o << "E(" << term_str(f->terms[0]) << ", " << term_str(f->terms[1]) << ")";
            return;
        case Op::Dp:
        case Op::Sdp: {
            if (f->op == Op::Dp)
                o << "dp(";
            else
                o << "sdp[" << f->num << "](";
            for (size_t i = 0; i < f->terms.size(); ++i) o << (i ? ", " : "") << term_str(f->terms[i]);
            o << ")";
            return;
        }
        case Op::Not: {
            const auto& k = f->kids[0];
            if (k->op == Op::Eq) {
                o << term_str(k->terms[0]) << " != " << term_str(k->terms[1]);
                return;
            }
            o << "!";
            bool paren = !(is_atom(*k) || k->op == Op::Not);
            if (paren) o << "(";
            print(o, k, paren ? 0 : 3);
            if (paren) o << ")";
            return;
        }
        case Op::And:
            print_list(o, f, " & ", 2);
            return;
        case Op::Or:
            print_list(o, f, " | ", 1);
            return;
        case Op::Exists:
        case Op::Forall: {
            o << (f->op == Op::Exists ? "exists " : "forall ") << f->name;
            if (f->num) o << " in " << f->num;
            o << ". ";
            print(o, f->kids[0], 0);
            return;
        }
    }
    (void)ctx;
}

}  // namespace

std::string to_string(const F& f) {
    std::ostringstream o;
    print(o, f, 0);
    return o.str();
}

// ---------------------------------------------------------------- queries

void check_vocabulary(const F& f, const Vocabulary& v) {
    auto unary = v.unary();
    std::function<void(const F&)> walk = [&](const F& g) {
        for (const auto& t : g->terms)
            if (t.constant && std::find(v.constants.begin(), v.constants.end(), t.name) == v.constants.end())
                throw InputError("unknown constant '@" + t.name + "'");
        if (g->op == Op::Mem && std::find(unary.begin(), unary.end(), g->name) == unary.end())
            throw InputError("unknown color '" + g->name + "'");
        if ((g->op == Op::InAnnot || is_quantifier(*g)) && g->num > v.annotations)
            throw InputError("unknown annotation index " + std::to_string(g->num));
        for (const auto& k : g->kids) walk(k);
    };
    walk(f);
}

namespace {

void collect_free(const F& f, std::set<std::string>& bound, std::set<std::string>& out) {
    for (const auto& t : f->terms)
        if (!t.constant && !bound.count(t.name)) out.insert(t.name);
    if (is_quantifier(*f)) {
        bool added = bound.insert(f->name).second;
        collect_free(f->kids[0], bound, out);
        if (added) bound.erase(f->name);
        return;
    }
    for (const auto& k : f->kids) collect_free(k, bound, out);
}

}  // namespace

std::set<std::string> free_vars(const F& f) {
    std::set<std::string> bound, out;
    collect_free(f, bound, out);
    return out;
}

std::set<std::string> all_vars(const F& f) {
    std::set<std::string> out;
    std::function<void(const F&)> walk = [&](const F& g) {
        for (const auto& t : g->terms)
            if (!t.constant) out.insert(t.name);
        if (is_quantifier(*g)) out.insert(g->name);
        for (const auto& k : g->kids) walk(k);
    };
    walk(f);
    return out;
}

std::set<std::string> constant_names(const F& f) {
    std::set<std::string> out;
    std::function<void(const F&)> walk = [&](const F& g) {
        for (const auto& t : g->terms)
            if (t.constant) out.insert(t.name);
        for (const auto& k : g->kids) walk(k);
    };
    walk(f);
    return out;
}

std::set<std::string> unary_names(const F& f) {
    std::set<std::string> out;
    std::function<void(const F&)> walk = [&](const F& g) {
        if (g->op == Op::Mem) out.insert(g->name);
        for (const auto& k : g->kids) walk(k);
    };
    walk(f);
    return out;
}

int quantifier_rank(const F& f) {
    int best = 0;
    for (const auto& k : f->kids) best = std::max(best, quantifier_rank(k));
    return best + (is_quantifier(*f) ? 1 : 0);
}

size_t node_count(const F& f) {
    size_t c = 1;
    for (const auto& k : f->kids) c += node_count(k);
    return c;
}

bool has_op(const F& f, Op op) {
    if (f->op == op) return true;
    for (const auto& k : f->kids)
        if (has_op(k, op)) return true;
    return false;
}

int max_dp_arity(const F& f) {
    int best = (f->op == Op::Dp || f->op == Op::Sdp) ? static_cast<int>(f->terms.size() / 2) : 0;
    for (const auto& k : f->kids) best = std::max(best, max_dp_arity(k));
    return best;
}

F map_atoms(const F& f, const std::function<F(const Formula&)>& fn) {
    if (is_atom(*f)) {
        F r = fn(*f);
        return r ? r : f;
    }
    std::vector<F> kids;
    bool changed = false;
    for (const auto& k : f->kids) {
        kids.push_back(map_atoms(k, fn));
        changed = changed || kids.back() != k;
    }
    if (!changed) return f;
    return make(f->op, f->terms, f->name, f->num, std::move(kids));
}

F substitute(const F& f, const std::string& from, const Term& to) {
    if (is_quantifier(*f) && f->name == from) return f;
    bool touch = false;
    std::vector<Term> terms = f->terms;
    for (auto& t : terms)
        if (!t.constant && t.name == from) {
            t = to;
            touch = true;
        }
    std::vector<F> kids;
    for (const auto& k : f->kids) {
        kids.push_back(substitute(k, from, to));
        touch = touch || kids.back() != k;
    }
    if (!touch) return f;
    return make(f->op, std::move(terms), f->name, f->num, std::move(kids));
}

F simplify(const F& f) {
    switch (f->op) {
        case Op::Not: {
            F k = simplify(f->kids[0]);
            if (k->op == Op::True) return f_false();
            if (k->op == Op::False) return f_true();
            if (k->op == Op::Not) return k->kids[0];
            return k == f->kids[0] ? f : neg(k);
        }
        case Op::And:
        case Op::Or: {
            bool is_and = f->op == Op::And;
            std::vector<F> kids;
            for (const auto& k0 : f->kids) {
                F k = simplify(k0);
                if (k->op == (is_and ? Op::True : Op::False)) continue;
                if (k->op == (is_and ? Op::False : Op::True)) return k;
                if (k->op == f->op)
                    kids.insert(kids.end(), k->kids.begin(), k->kids.end());
                else
                    kids.push_back(k);
            }
            return is_and ? conj(kids) : disj(kids);
        }
        case Op::Exists:
        case Op::Forall: {
            F b = simplify(f->kids[0]);
            // The universe is non-empty, so a constant body is unaffected
            // by an unannotated quantifier.
            if (f->num == 0 && (b->op == Op::True || b->op == Op::False)) return b;
            if (f->num != 0 && f->op == Op::Exists && b->op == Op::False) return b;
            if (f->num != 0 && f->op == Op::Forall && b->op == Op::True) return b;
            return b == f->kids[0] ? f : make(f->op, {}, f->name, f->num, {b});
        }
        default:
            return f;
    }
}

// ---------------------------------------------------------------- prenex

F exists_block(const std::vector<std::string>& vars, const std::vector<F>& constraints, const F& inner) {
    int m = static_cast<int>(vars.size());
    std::vector<std::vector<F>> bucket(m + 1);
    for (const auto& c : constraints) {
        auto fv = free_vars(c);
        int h = -1;
        for (int p = 0; p < m; ++p)
            if (fv.count(vars[p])) h = p;
        bucket[h + 1].push_back(c);
    }
    F body = inner;
    for (int p = m - 1; p >= 0; --p) {
        auto parts = bucket[p + 1];
        parts.push_back(body);
        body = exists(vars[p], conj(parts));
    }
    auto parts = bucket[0];
    parts.push_back(body);
    return conj(parts);
}

std::string NameSupply::fresh() {
    while (true) {
        std::string n = stem_ + std::to_string(next_++);
        if (taken_.insert(n).second) return n;
    }
}

std::string NameSupply::fresh(const std::string& hint) {
    if (taken_.insert(hint).second) return hint;
    for (int i = 1;; ++i) {
        std::string n = hint + "_" + std::to_string(i);
        if (taken_.insert(n).second) return n;
    }
}

namespace {

F rename_apart(const F& f, NameSupply& names, std::map<std::string, std::string>& env) {
    if (is_quantifier(*f)) {
        std::string nv = names.fresh(f->name);
        auto saved = env.find(f->name) != env.end() ? std::optional<std::string>(env[f->name]) : std::nullopt;
        env[f->name] = nv;
        F body = rename_apart(f->kids[0], names, env);
        if (saved)
            env[f->name] = *saved;
        else
            env.erase(f->name);
        return make(f->op, {}, nv, f->num, {body});
    }
    std::vector<Term> terms = f->terms;
    for (auto& t : terms)
        if (!t.constant) {
            auto it = env.find(t.name);
            if (it != env.end()) t.name = it->second;
        }
    std::vector<F> kids;
    for (const auto& k : f->kids) kids.push_back(rename_apart(k, names, env));
    return make(f->op, std::move(terms), f->name, f->num, std::move(kids));
}

F nnf(const F& f, bool negate) {
    switch (f->op) {
        case Op::Not:
            return nnf(f->kids[0], !negate);
        case Op::And:
        case Op::Or: {
            std::vector<F> kids;
            for (const auto& k : f->kids) kids.push_back(nnf(k, negate));
            bool is_and = (f->op == Op::And) != negate;
            return is_and ? conj(kids) : disj(kids);
        }
        case Op::Exists:
        case Op::Forall: {
            bool ex = (f->op == Op::Exists) != negate;
            F body = nnf(f->kids[0], negate);
            return ex ? exists(f->name, body, f->num) : forall(f->name, body, f->num);
        }
        case Op::True:
            return negate ? f_false() : f_true();
        case Op::False:
            return negate ? f_true() : f_false();
        default:
            return negate ? neg(f) : f;
    }
}

struct Pulled {
    std::vector<Quantifier> prefix;
    F matrix;
};

Pulled pull(const F& f) {
    if (is_quantifier(*f)) {
        Pulled inner = pull(f->kids[0]);
        inner.prefix.insert(inner.prefix.begin(), Quantifier{f->op == Op::Exists, f->name, f->num});
        return inner;
    }
    if (f->op != Op::And && f->op != Op::Or) return {{}, f};
    bool is_and = f->op == Op::And;
    Pulled out;
    std::vector<F> mats;
    for (const auto& k : f->kids) {
        Pulled p = pull(k);
        bool unsafe = false;
        for (const auto& q : p.prefix)
            if (q.annot && (is_and ? !q.exists : q.exists)) unsafe = true;
        if (unsafe) {
            // Relativize every annotated quantifier of this operand.
            F m = p.matrix;
            for (auto it = p.prefix.rbegin(); it != p.prefix.rend(); ++it) {
                if (!it->annot) continue;
                F g = in_annot(var(it->var), it->annot);
                m = it->exists ? conj2(g, m) : disj2(neg(g), m);
                it->annot = 0;
            }
            p.matrix = m;
        }
        out.prefix.insert(out.prefix.end(), p.prefix.begin(), p.prefix.end());
        mats.push_back(p.matrix);
    }
    out.matrix = is_and ? conj(mats) : disj(mats);
    return out;
}

}  // namespace

PrenexSentence to_prenex(const F& f) {
    NameSupply names(free_vars(f));
    std::map<std::string, std::string> env;
    F renamed = rename_apart(f, names, env);
    Pulled p = pull(nnf(renamed, false));
    return {p.prefix, simplify(p.matrix)};
}

F from_prenex(const PrenexSentence& p) {
    F f = p.matrix;
    for (auto it = p.prefix.rbegin(); it != p.prefix.rend(); ++it)
        f = it->exists ? exists(it->var, f, it->annot) : forall(it->var, f, it->annot);
    return f;
}

std::string to_string(const PrenexSentence& p) { return to_string(from_prenex(p)); }

}  // namespace dplk
