#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dplk/apex.hpp"
#include "dplk/error.hpp"
#include "dplk/gadgets.hpp"
#include "dplk/normal_form.hpp"
#include "dplk/problems.hpp"
#include "dplk/semantics.hpp"
#include "dplk/signature.hpp"
#include "suites.hpp"

using json = nlohmann::ordered_json;
using namespace dplk;

namespace {

constexpr long long kDefaultBudget = 10000000;

struct Options {
    std::string structure, formula, expr, a, b, signature, params, apex, out;
    int rank = 2;
    int dp_cap = -1;
    int radius = -1;
    int k = 0;
    int max_n = 64;
    std::uint64_t seed = 0;
    bool json = false;
    bool check = false;
    std::vector<int> suites;
    std::string kind;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream o;
    o << in.rdbuf();
    return o.str();
}

// --formula takes a path; text that names no file is read as the formula itself.
std::string formula_text(const Options& o) {
    if (!o.expr.empty()) return o.expr;
    if (o.formula.empty()) throw InputError("a formula is required (--formula PATH or --expr STR)");
    if (std::filesystem::is_regular_file(o.formula)) return read_file(o.formula);
    return o.formula;
}

ColoredStructure load_structure(const std::string& path, const Options& o) {
    if (path.empty()) throw InputError("a structure file is required");
    ColoredStructure s = parse_structure(read_file(path));
    if (s.n > o.max_n)
        throw GuardError("max-n", "structure has n=" + std::to_string(s.n) + " > --max-n " + std::to_string(o.max_n));
    return s;
}

int cap_for(const Options& o, int r) { return o.dp_cap >= 0 ? o.dp_cap : default_dp_cap(r); }

long long budget() { return budget_from_env(kDefaultBudget); }

json limits(const Options& o) {
    return json{{"max_n", o.max_n}, {"budget", budget()}, {"seed", o.seed}};
}

void emit(const Options& o, const std::string& command, json payload, const std::string& text) {
    if (o.json) {
        json out{{"schema", 1}, {"command", command}};
        for (auto& [key, value] : payload.items()) out[key] = value;
        out["limits"] = limits(o);
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
    }
}

ApexTuple parse_apex(const std::string& text) {
    ApexTuple a;
    if (text.empty()) return a;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item == "_" || item == "bot") {
            a.push_back(BOT);
            continue;
        }
        try {
            size_t used = 0;
            int v = std::stoi(item, &used);
            if (used != item.size()) throw InputError("");
            a.push_back(v);
        } catch (const std::exception&) {
            throw InputError("bad apex entry '" + item + "'");
        }
    }
    return a;
}

json ranges_json(const std::vector<std::vector<int>>& ranges) {
    json out = json::array();
    for (const auto& r : ranges) out.push_back(r);
    return out;
}

std::string ranges_text(const std::vector<std::vector<int>>& ranges) {
    std::ostringstream o;
    for (size_t i = 0; i < ranges.size(); ++i) {
        o << "R" << i + 1 << ":";
        for (int v : ranges[i]) o << " " << v;
        o << "\n";
    }
    return o.str();
}

int cmd_eval(const Options& o) {
    ColoredStructure s = load_structure(o.structure, o);
    require_valid(s);
    F phi = parse_sentence(formula_text(o));
    check_vocabulary(phi, vocabulary_of(s));
    bool value = evaluate(s, phi);
    emit(o, "eval", {{"result", value}, {"rank", quantifier_rank(phi)}}, value ? "true" : "false");
    return 0;
}

int cmd_sig(const Options& o) {
    ColoredStructure s = load_structure(o.structure, o);
    require_valid(s);
    int cap = cap_for(o, o.rank);
    Signature sg = signature(s, o.rank, cap);
    std::string text = serialize_signature(sg);
    emit(o, "sig", {{"rank", o.rank}, {"dp_cap", cap}, {"signature", text}}, text);
    return 0;
}

int cmd_sig_equal(const Options& o) {
    ColoredStructure a = load_structure(o.a, o);
    ColoredStructure b = load_structure(o.b, o);
    require_valid(a);
    require_valid(b);
    int cap = cap_for(o, o.rank);
    bool eq = signature_equal(signature(a, o.rank, cap), signature(b, o.rank, cap));
    emit(o, "sig-equal", {{"rank", o.rank}, {"dp_cap", cap}, {"result", eq}}, eq ? "equal" : "different");
    return 0;
}

int cmd_sig_to_formula(const Options& o) {
    Signature beta;
    if (!o.signature.empty()) {
        beta = parse_signature(read_file(o.signature));
    } else {
        ColoredStructure s = load_structure(o.structure, o);
        require_valid(s);
        beta = signature(s, o.rank, cap_for(o, o.rank));
    }
    F phi = signature_to_sentence(beta);
    std::string text = to_string(phi);
    emit(o, "sig-to-formula",
         {{"rank", beta.shape.r}, {"dp_cap", beta.shape.dp_cap}, {"formula", text}, {"size", node_count(phi)}}, text);
    return 0;
}

int cmd_dnf(const Options& o) {
    F m = parse_formula(formula_text(o));
    DnfShape shape;
    for (int i = 1; i <= o.rank; ++i) shape.vars.push_back("x" + std::to_string(i));
    for (const auto& v : free_vars(m))
        if (std::find(shape.vars.begin(), shape.vars.end(), v) == shape.vars.end())
            throw InputError("free variable " + v + " is not among x1..x" + std::to_string(o.rank));
    if (!o.structure.empty()) {
        shape.voc = vocabulary_of(load_structure(o.structure, o));
    } else {
        for (const auto& u : unary_names(m)) shape.voc.colors.push_back(u);
        for (const auto& c : constant_names(m)) shape.voc.constants.push_back(c);
    }
    shape.dp_cap = cap_for(o, o.rank);
    FullDnf dnf = to_full_dnf(m, shape, budget());
    auto patterns = ext_patterns(m, shape, budget());
    json clauses = json::array();
    std::ostringstream text;
    text << "clauses " << dnf.clauses.size() << "\npatterns " << patterns.size() << "\n";
    for (size_t i = 0; i < dnf.clauses.size(); ++i) {
        std::vector<F> lits;
        for (const auto& [atom, sign] : dnf.clause(i)) lits.push_back(sign ? atom : neg(atom));
        std::string c = to_string(conj(lits));
        clauses.push_back(c);
        text << c << "\n";
    }
    json pj = json::array();
    for (const auto& p : patterns) pj.push_back(pattern_to_string(p));
    emit(o, "dnf",
         {{"rank", o.rank}, {"dp_cap", shape.dp_cap}, {"family", dnf.family.size()}, {"clauses", clauses},
          {"patterns", pj}},
         text.str());
    return 0;
}

int cmd_apex_project(const Options& o) {
    ColoredStructure s = load_structure(o.structure, o);
    require_valid(s);
    ApexTuple a = parse_apex(o.apex);
    ColoredStructure projected = apex_project_structure(s, a);
    json payload{{"apex", a}, {"structure", serialize_structure(projected)}};
    std::string text = serialize_structure(projected);
    if (!o.formula.empty() || !o.expr.empty()) {
        F phi = parse_sentence(formula_text(o));
        check_vocabulary(phi, vocabulary_of(s));
        F proj = apex_project_sentence(phi, static_cast<int>(a.size()), budget());
        payload["formula"] = to_string(proj);
        text += "---\n" + to_string(proj) + "\n";
        if (o.check) {
            auto r = check_projection(s, a, phi, budget());
            payload["original"] = r.original;
            payload["projected"] = r.projected;
            text += "original " + std::string(r.original ? "true" : "false") + "\nprojected " +
                    std::string(r.projected ? "true" : "false") + "\n";
            if (!r.agree()) {
                emit(o, "apex-project", payload, text);
                throw DefectError("projection changed the truth value");
            }
        }
    }
    if (!o.out.empty()) {
        std::ofstream(o.out + ".structure") << serialize_structure(projected);
        if (payload.contains("formula")) std::ofstream(o.out + ".formula") << payload["formula"].get<std::string>() << "\n";
    }
    emit(o, "apex-project", payload, text);
    return 0;
}

ProblemInstance load_instance(const Options& o) {
    if (o.params.empty()) throw InputError("--params FILE is required");
    ProblemInstance inst = parse_instance(parse_kind(o.kind), read_file(o.params));
    if (o.radius >= 0) inst.radius = o.radius;
    if (inst.host.n > o.max_n)
        throw GuardError("max-n", "host has n=" + std::to_string(inst.host.n) + " > --max-n " + std::to_string(o.max_n));
    validate_instance(inst);
    return inst;
}

json vocabulary_json(const Vocabulary& v) {
    return json{{"colors", v.colors}, {"pcolors", v.pcolors}, {"constants", v.constants}, {"annotations", v.annotations}};
}

int cmd_encode(const Options& o) {
    ProblemInstance inst = load_instance(o);
    Encoding enc = encode(inst, budget());
    ColoredStructure s = build_structure(inst);
    json payload{{"kind", kind_name(inst.kind)},
                 {"sentence", to_string(enc.sentence)},
                 {"rank", enc.rank},
                 {"vocabulary", vocabulary_json(enc.vocabulary)},
                 {"structure", serialize_structure(s)}};
    std::string text = to_string(enc.sentence) + "\n";
    if (o.check) {
        bool value = evaluate(s, enc.sentence);
        payload["result"] = value;
        text += value ? "true\n" : "false\n";
    }
    emit(o, "encode", payload, text);
    return 0;
}

int cmd_oracle(const Options& o) {
    ProblemInstance inst = load_instance(o);
    bool value = oracle(inst, budget_from_env(100000000));
    emit(o, "oracle", {{"kind", kind_name(inst.kind)}, {"result", value}}, value ? "true" : "false");
    return 0;
}

int cmd_reduce(const Options& o) {
    ColoredStructure s = load_structure(o.structure, o);
    require_valid(s);
    auto ranges = s.annotations;
    if (ranges.empty()) throw InputError("the structure carries no annotation sets to reduce");
    int r = static_cast<int>(ranges.size());
    int cap = cap_for(o, r);
    auto reduced = reduce_annotation(s, ranges, cap);
    ColoredStructure out = s;
    out.annotations = reduced;
    emit(o, "reduce-annot",
         {{"rank", r}, {"dp_cap", cap}, {"before", ranges_json(ranges)}, {"after", ranges_json(reduced)},
          {"structure", serialize_structure(out)}},
         ranges_text(reduced));
    return 0;
}

int cmd_gadget(const Options& o) {
    if (o.params.empty()) throw InputError("--params FILE is required");
    std::string params = read_file(o.params);
    json sidecar;
    ColoredStructure s;
    if (o.kind == "linkability") {
        json p;
        try {
            p = json::parse(params);
        } catch (const json::exception& e) {
            throw InputError(std::string("bad gadget parameters: ") + e.what());
        }
        PlainGraph g{p.value("n", 0), {}};
        for (const auto& e : p.value("edges", json::array())) g.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
        int k = o.k > 0 ? o.k : p.value("k", 0);
        auto gad = build_linkability_gadget(g, k);
        s = gad.structure;
        auto bad = check_linkability_gadget(g, gad);
        size_t s_total = 0;
        for (const auto& x : gad.s_sets) s_total += x.size();
        sidecar = {{"kind", "linkability"}, {"k", gad.k},     {"k_prime", gad.k_prime}, {"n", s.n},
                   {"edges", s.edges.size()},   {"s", s_total}, {"w", gad.w.size()},      {"l", gad.l.size()},
                   {"violations", bad}};
    } else if (o.kind == "grid-tiling") {
        GridTilingInstance inst = parse_grid_tiling(params);
        auto gad = build_gridtiling_gadget(inst);
        s = gad.structure;
        json lambda = gad.lambda;
        sidecar = {{"kind", "grid-tiling"}, {"k", inst.k},     {"d", inst.d},         {"side", gad.side},
                   {"n", s.n},              {"edges", s.edges.size()}, {"b", gad.b.size()}, {"c", gad.c.size()},
                   {"lambda", lambda}};
        if (o.check) {
            auto chk = verify_gadget_iff(inst);
            sidecar["tiling"] = chk.tiling;
            sidecar["minor"] = chk.minor;
            if (!chk.agree()) throw DefectError("grid tiling and the gadget disagree");
        }
    } else {
        throw InputError("unknown gadget kind '" + o.kind + "' (linkability, grid-tiling)");
    }
    if (!o.out.empty()) {
        std::ofstream(o.out + ".structure") << serialize_structure(s);
        std::ofstream(o.out + ".json") << sidecar.dump(2) << "\n";
    }
    json payload = sidecar;
    payload["structure"] = serialize_structure(s);
    emit(o, "gadget", payload, serialize_structure(s) + "---\n" + sidecar.dump(2) + "\n");
    return 0;
}

int cmd_selftest(const Options& o) {
    std::vector<int> ids = o.suites;
    if (ids.empty())
        for (const auto& info : check::suite_list()) ids.push_back(info.id);
    json results = json::array();
    std::ostringstream text;
    bool ok = true;
    for (int id : ids) {
        auto r = check::run_suite(id, o.seed);
        ok = ok && r.pass();
        results.push_back({{"id", r.id},
                           {"name", r.name},
                           {"pass", r.pass()},
                           {"cases", r.cases},
                           {"required", r.required},
                           {"failures", r.failures},
                           {"details", r.details},
                           {"samples", r.samples}});
        text << check::format_result(r) << "\n";
    }
    emit(o, "selftest", {{"pass", ok}, {"suites", results}}, text.str());
    return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Model checking for first-order logic with disjoint-paths predicates"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_option("--rank", o.rank, "Quantifier rank / number of variables")->check(CLI::Range(0, 16));
        c->add_option("--dp-cap", o.dp_cap, "Largest dp arity decided (default r(r+1)/2)")->check(CLI::NonNegativeNumber);
        c->add_option("--radius", o.radius, "Scattering radius for sdp variants")->check(CLI::NonNegativeNumber);
        c->add_option("--seed", o.seed, "Seed for generated corpora");
        c->add_option("--max-n", o.max_n, "Largest accepted structure")->check(CLI::PositiveNumber);
        c->add_flag("--json", o.json, "Emit JSON");
    };
    auto with_structure = [&](CLI::App* c) { c->add_option("--structure", o.structure, "Structure file"); };
    auto with_formula = [&](CLI::App* c) {
        c->add_option("--formula", o.formula, "Formula file (or inline text)");
        c->add_option("--expr", o.expr, "Inline formula");
    };

    auto* eval = app.add_subcommand("eval", "Evaluate a sentence on a structure");
    common(eval), with_structure(eval), with_formula(eval);
    auto* sig = app.add_subcommand("sig", "Print the rank-r signature");
    common(sig), with_structure(sig);
    auto* sig_eq = app.add_subcommand("sig-equal", "Compare two signatures");
    common(sig_eq);
    sig_eq->add_option("--a", o.a, "First structure")->required();
    sig_eq->add_option("--b", o.b, "Second structure")->required();
    auto* sig_f = app.add_subcommand("sig-to-formula", "Sentence defining a signature");
    common(sig_f), with_structure(sig_f);
    sig_f->add_option("--signature", o.signature, "Serialized signature file");
    auto* dnf = app.add_subcommand("dnf", "Full disjunctive normal form over x1..xr");
    common(dnf), with_structure(dnf), with_formula(dnf);
    auto* apex = app.add_subcommand("apex-project", "Project apex vertices into colors");
    common(apex), with_structure(apex), with_formula(apex);
    apex->add_option("--apex", o.apex, "Comma separated apex tuple, _ for absent");
    apex->add_option("--out", o.out, "Write PREFIX.structure and PREFIX.formula");
    apex->add_flag("--check", o.check, "Evaluate both sides");
    auto* enc = app.add_subcommand("encode", "Encode a problem instance as a sentence");
    common(enc);
    enc->add_option("kind", o.kind, "Problem kind")->required();
    enc->add_option("--params", o.params, "Instance parameters (JSON)")->required();
    enc->add_flag("--check", o.check, "Also evaluate the sentence");
    auto* orc = app.add_subcommand("oracle", "Solve a problem instance directly");
    common(orc);
    orc->add_option("kind", o.kind, "Problem kind")->required();
    orc->add_option("--params", o.params, "Instance parameters (JSON)")->required();
    auto* red = app.add_subcommand("reduce-annot", "Shrink annotation sets keeping the signature");
    common(red), with_structure(red);
    auto* gad = app.add_subcommand("gadget", "Build a reduction gadget");
    common(gad);
    gad->add_option("kind", o.kind, "linkability or grid-tiling")->required();
    gad->add_option("--params", o.params, "Gadget parameters")->required();
    gad->add_option("--k", o.k, "Clique size for the linkability gadget");
    gad->add_option("--out", o.out, "Write PREFIX.structure and PREFIX.json");
    gad->add_flag("--check", o.check, "Run the grid tiling equivalence check");
    auto* self = app.add_subcommand("selftest", "Run the property suites");
    common(self);
    self->add_option("--suite", o.suites, "Suite ids (default: all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*eval) return cmd_eval(o);
        if (*sig) return cmd_sig(o);
        if (*sig_eq) return cmd_sig_equal(o);
        if (*sig_f) return cmd_sig_to_formula(o);
        if (*dnf) return cmd_dnf(o);
        if (*apex) return cmd_apex_project(o);
        if (*enc) return cmd_encode(o);
        if (*orc) return cmd_oracle(o);
        if (*red) return cmd_reduce(o);
        if (*gad) return cmd_gadget(o);
        if (*self) return cmd_selftest(o);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const GuardError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 2;
    } catch (const DefectError& e) {
        std::cerr << "defect: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "defect: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
