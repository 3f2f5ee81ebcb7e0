// msow: command-line front end. Every subcommand writes one JSON report
// (stdout, or --out) carrying the tool version and input fingerprints.
//
// Exit codes: 0 success / verified, 1 violation / rejection / counterexample,
// 2 usage or input error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "msow/falsifier.hpp"
#include "msow/fd.hpp"
#include "msow/lexmodel.hpp"
#include "msow/synthesis.hpp"
#include "msow/treeterm.hpp"

using namespace msow;

namespace {

constexpr const char* kVersion = "0.3.0";

struct UsageError : Error {
    using Error::Error;
};

struct Ctx {
    std::string out;
    bool force = false;
    json inputs = json::array();

    std::string read(const std::string& path) {
        auto text = read_text_file(path);
        inputs.push_back({{"path", path}, {"fingerprint", text_fingerprint(text)}});
        return text;
    }
    json read_json(const std::string& path) {
        auto text = read(path);
        try {
            return json::parse(text);
        } catch (const json::exception& e) {
            throw Error(path + ": " + e.what());
        }
    }
};

// Accept either a bare object or a report produced by this tool.
json unwrap(const json& j, const char* key) {
    if (j.is_object() && j.contains("tool") && j.contains("result")) {
        if (!j["result"].contains(key)) throw Error(std::string("report has no \"") + key + "\" result");
        return j["result"][key];
    }
    return j;
}

FinStructure load_struct(Ctx& ctx, const std::string& path) { return structure_from_json(unwrap(ctx.read_json(path), "structure")); }
Theory load_theory(Ctx& ctx, const std::string& path) { return theory_from_json(unwrap(ctx.read_json(path), "theory")); }

std::string trim(std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(i);
}

std::vector<std::string> split_ids(const std::string& list) {
    std::vector<std::string> out;
    if (list.empty() || list == "-") return out;
    std::size_t start = 0;
    while (true) {
        auto comma = list.find(',', start);
        auto id = trim(list.substr(start, comma - start));
        if (!id.empty()) out.push_back(id);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<Subset> params_of(const FinStructure& s, const std::vector<std::string>& specs) {
    std::vector<Subset> ps;
    for (std::size_t i = 0; i < specs.size(); ++i)
        ps.push_back(subset_from_ids(s, split_ids(specs[i]), "--param " + std::to_string(i + 1)));
    return ps;
}

// Enumeration limits: elements <= 7 up to depth 2, depth 3 only up to 4
// elements, nothing deeper.
void guard(const Ctx& ctx, std::size_t elements, std::size_t depth) {
    if (ctx.force) return;
    const bool ok = (depth <= 2 && elements <= 7) || (depth == 3 && elements <= 4);
    if (!ok)
        throw UsageError(std::to_string(elements) + " elements at depth " + std::to_string(depth) +
                         " exceed the enumeration limits (<= 7 elements up to depth 2, <= 4 at depth 3); use --force");
}

int emit(const Ctx& ctx, const std::string& command, json result, int code) {
    json report{{"tool", "msow"}, {"version", kVersion}, {"command", command}, {"inputs", ctx.inputs}, {"result", std::move(result)}};
    const auto text = report.dump(2) + "\n";
    if (ctx.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(ctx.out, std::ios::binary);
        if (!f) throw UsageError("cannot write " + ctx.out);
        f << text;
    }
    return code;
}

json theory_result(Theory t) { return {{"theory", theory_to_json(t)}, {"hash", t.hash_hex()}}; }

std::vector<std::string> ids_of(const FinStructure& s, const std::vector<std::size_t>& xs) {
    std::vector<std::string> out;
    for (auto x : xs) out.push_back(s.id(x));
    return out;
}

json thinning_json(const ThinningResult& r) {
    json kept = json::object(), marker = json::object(), ts = json::object();
    for (const auto& [eta, digits] : r.kept) kept[lex_id(r.model.nodes[eta])] = digits;
    for (const auto& [eta, k] : r.marker) marker[lex_id(r.model.nodes[eta])] = k;
    for (std::size_t k = 1; k < r.t.size(); ++k)
        if (r.t[k]) ts[std::to_string(k)] = r.t[k]->hash_hex();
    auto star = check_star(r);
    return {{"n", r.model.n},
            {"b", r.model.b},
            {"depth", r.depth},
            {"survivors", r.survivors().size()},
            {"kept", kept},
            {"marker", marker},
            {"level_theories", ts},
            {"star", star ? json(*star) : json("ok")}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monadic second-order theories, composition, scattered orders and definable choice"};
    app.require_subcommand(1);
    app.fallthrough();
    Ctx ctx;
    app.add_option("--out", ctx.out, "Write the report here instead of stdout");
    app.add_flag("--force", ctx.force, "Lift the enumeration guard rails");
    app.set_version_flag("--version", kVersion);

    std::string structure, theory_a, theory_b, file, presentation, cert;
    std::vector<std::string> params, free_vars, assigns;
    std::size_t depth = 1, arity = 0, size_bound = 3, n = 1, m = 1, b = 4, trials = 200, max_elements = 6, budget = 64,
                k = 1, l = 2, period = 0, min_keep = 3;
    std::uint64_t seed = 0;
    std::string kind = "chain", theorem;
    bool flip = false, starred = false, reverse = false, no_side_labels = false, no_trace = false;

    int code = 0;
    std::string command;
    auto on = [&](CLI::App* sub, std::string name, std::function<int()> body) {
        sub->callback([&code, &command, name = std::move(name), body = std::move(body)] {
            command = name;
            code = body();
        });
    };
    auto add_structure = [&](CLI::App* sub) { sub->add_option("-s,--structure", structure, "Structure JSON")->required(); };
    auto add_params = [&](CLI::App* sub) {
        sub->add_option("--param", params, "Parameter subset as comma-separated ids ('-' for empty); repeatable");
    };

    // theory
    auto* th = app.add_subcommand("theory", "Compute and combine n-theories");
    th->require_subcommand(1);
    auto* th_compute = th->add_subcommand("compute", "Th^n of a structure with its predicates and parameters");
    add_structure(th_compute);
    add_params(th_compute);
    th_compute->add_option("-n,--depth", depth, "Quantifier depth")->required();
    on(th_compute, "theory compute", [&] {
        auto s = load_struct(ctx, structure);
        guard(ctx, s.size(), depth);
        return emit(ctx, "theory compute", theory_result(compute_theory(s, params_of(s, params), depth)), 0);
    });
    auto* th_sum = th->add_subcommand("sum", "Theory of the concatenation of two chains");
    th_sum->add_option("left", theory_a, "Theory JSON")->required();
    th_sum->add_option("right", theory_b, "Theory JSON")->required();
    on(th_sum, "theory sum", [&] {
        auto a = load_theory(ctx, theory_a);
        auto c = load_theory(ctx, theory_b);
        return emit(ctx, "theory sum", theory_result(sum(a, c)), 0);
    });
    auto* th_reduce = th->add_subcommand("reduce", "Reduce a theory to a smaller depth");
    th_reduce->add_option("theory", theory_a, "Theory JSON")->required();
    th_reduce->add_option("-n,--depth", depth, "Target depth")->required();
    on(th_reduce, "theory reduce", [&] {
        auto t = load_theory(ctx, theory_a);
        if (depth > t.rank()) throw UsageError("target depth exceeds the theory's rank");
        return emit(ctx, "theory reduce", theory_result(reduce_depth(t, depth)), 0);
    });
    auto* th_real = th->add_subcommand("realized", "Theories realized by small structures");
    th_real->add_option("-n,--depth", depth)->required();
    th_real->add_option("--arity", arity);
    th_real->add_option("--size", size_bound, "Largest structure size");
    th_real->add_option("--kind", kind)->check(CLI::IsMember({"chain", "tree", "set"}));
    on(th_real, "theory realized", [&] {
        guard(ctx, size_bound, depth);
        auto ts = realized_theories(depth, arity, size_bound, parse_kind(kind));
        json hashes = json::array();
        for (auto t : ts) hashes.push_back(t.hash_hex());
        return emit(ctx, "theory realized",
                    {{"kind", kind},
                     {"depth", depth},
                     {"arity", arity},
                     {"size_bound", size_bound},
                     {"count", ts.size()},
                     {"count_is_lower_bound", true},
                     {"hashes", hashes}},
                    0);
    });

    // eval
    auto* ev = app.add_subcommand("eval", "Evaluate a formula on a structure or on a theory");
    ev->add_option("formula", file, "Formula file (s-expression)")->required();
    ev->add_option("--free", free_vars, "Free variables in argument order")->delimiter(',');
    auto* ev_s = ev->add_option("-s,--structure", structure, "Structure JSON");
    auto* ev_t = ev->add_option("-t,--theory", theory_a, "Theory JSON");
    ev_s->excludes(ev_t);
    ev->add_option("--assign", assigns, "Value of the next free variable as comma-separated ids; repeatable");
    on(ev, "eval", [&] {
        auto f = parse_formula(ctx.read(file), free_vars);
        json result{{"free", f.free}, {"depth", f.depth()}};
        bool value = false;
        if (!theory_a.empty()) {
            auto t = load_theory(ctx, theory_a);
            if (f.depth() > t.rank()) throw UsageError("formula depth exceeds the theory's rank");
            value = eval_on_theory(f, t);
        } else if (!structure.empty()) {
            auto s = load_struct(ctx, structure);
            if (assigns.size() != f.arity())
                throw UsageError("formula has " + std::to_string(f.arity()) + " free variables but " + std::to_string(assigns.size()) +
                                 " --assign values were given");
            guard(ctx, s.size(), f.depth());
            std::vector<Subset> a;
            for (std::size_t i = 0; i < assigns.size(); ++i) a.push_back(subset_from_ids(s, split_ids(assigns[i]), f.free[i]));
            value = eval_direct(f, s, a);
        } else {
            throw UsageError("eval needs --structure or --theory");
        }
        result["value"] = value;
        return emit(ctx, "eval", result, 0);
    });

    // compose
    auto* co = app.add_subcommand("compose", "Composition theorems");
    co->require_subcommand(1);
    auto* co_verify = co->add_subcommand("verify", "Sample instances and check that equal antecedents give equal theories");
    co_verify->add_option("--theorem", theorem)->required()->check(CLI::IsMember({"1.8", "1.11", "1.12", "1.13", "1.15"}));
    co_verify->add_option("-n", n, "Depth of the antecedent theories");
    co_verify->add_option("-m", m, "Depth of the consequent theory");
    co_verify->add_option("--seed", seed)->required();
    co_verify->add_option("--trials", trials, "Instance pairs");
    co_verify->add_option("--max-elements", max_elements);
    co_verify->add_option("--arity", arity, "Length of the sampled tuple (default 1)");
    co_verify->add_flag("--no-side-labels", no_side_labels, "1.15: drop the 0-successor marker");
    co_verify->add_flag("--no-trace-params", no_trace, "1.15: drop the parameter trace");
    on(co_verify, "compose verify", [&] {
        SamplerConfig cfg;
        cfg.seed = seed;
        cfg.trials = trials;
        cfg.max_elements = max_elements;
        cfg.arity = arity ? arity : 1;
        cfg.side_labels = !no_side_labels;
        cfg.trace_params = !no_trace;
        if (!ctx.force && (max_elements > 7 || m > 3)) throw UsageError("sampling bounds exceed the guard rails; use --force");
        auto r = verify_fd(parse_fd_theorem(theorem), n, m, cfg);
        return emit(ctx, "compose verify", fd_report_to_json(r), r.ok() ? 0 : 1);
    });

    // scattered
    auto* sc = app.add_subcommand("scattered", "Scattered order terms");
    sc->require_subcommand(1);
    auto* sc_hdeg = sc->add_subcommand("hdeg", "Hausdorff degree of an order term");
    sc_hdeg->add_option("term", file, "Order term file")->required();
    on(sc_hdeg, "scattered hdeg", [&] {
        auto t = parse_order_term(ctx.read(file));
        auto h = hdeg(t);
        json r{{"term", normalize(t).str()}, {"hdeg", h.str()}};
        if (h.kind == HdegTag::Kind::finite) {
            r["value"] = h.value;
            r["exact"] = h.exact;
        }
        return emit(ctx, "scattered hdeg", r, 0);
    });
    auto* sc_cat = sc->add_subcommand("catalog", "The catalog term C_n (or C_n*)");
    sc_cat->add_option("-n", n)->required();
    sc_cat->add_flag("--star", starred);
    on(sc_cat, "scattered catalog", [&] {
        auto t = catalog_term(n, starred);
        return emit(ctx, "scattered catalog", {{"n", n}, {"starred", starred}, {"term", t.str()}, {"hdeg", hdeg(t).str()}}, 0);
    });
    auto* sc_real = sc->add_subcommand("realize", "Finite sub-chain of an order term");
    sc_real->add_option("term", file, "Order term file")->required();
    sc_real->add_option("--budget", budget);
    on(sc_real, "scattered realize", [&] {
        auto r = realize_prefix(parse_order_term(ctx.read(file)), budget);
        return emit(ctx, "scattered realize", {{"structure", structure_to_json(r.chain)}, {"weights", r.weights}}, 0);
    });

    // lexmodel
    auto* lx = app.add_subcommand("lexmodel", "Lexicographic models M^n and their thinning");
    lx->require_subcommand(1);
    auto* lx_build = lx->add_subcommand("build", "List M^n with branching b");
    lx_build->add_option("-n", n)->required();
    lx_build->add_option("-b", b)->required();
    lx_build->add_flag("--flip", flip, "Start with a descending level");
    on(lx_build, "lexmodel build", [&] {
        auto md = lex_model(n, b, flip);
        return emit(ctx, "lexmodel build", {{"n", n}, {"b", b}, {"flip", flip}, {"size", md.size()}, {"structure", structure_to_json(md.chain())}}, 0);
    });
    auto thin_opts = [&](CLI::App* sub) {
        sub->add_option("-n", n)->required();
        sub->add_option("-b", b)->required();
        sub->add_option("--chain", structure, "Chain JSON to embed into")->required();
        add_params(sub);
        sub->add_option("--period", period, "Add the parameter 'every period-th position'");
        sub->add_option("--depth", depth, "Depth of the colouring");
        sub->add_option("--min-keep", min_keep);
    };
    auto thin = [&]() {
        auto c = load_struct(ctx, structure);
        if (c.kind() != Kind::chain) throw UsageError("--chain must be a chain");
        auto md = lex_model(n, b);
        auto ps = params_of(c, params);
        if (period) {
            Subset p(c.size(), false);
            for (std::size_t r = 0; r < c.size(); r += period) p[c.chain_order()[r]] = true;
            ps.push_back(p);
        }
        auto f = embed_lex(md, c);
        if (!f) throw Error("the chain has fewer elements than M^n");
        return thin_homogeneous(md, c, *f, ps, depth, min_keep);
    };
    auto* lx_thin = lx->add_subcommand("thin", "Thin M^n to a homogeneous subtree over a chain");
    thin_opts(lx_thin);
    on(lx_thin, "lexmodel thin", [&] {
        auto r = thin();
        return emit(ctx, "lexmodel thin", thinning_json(r), check_star(r) ? 1 : 0);
    });
    auto* lx_z = lx->add_subcommand("zset", "Monochromatic set from t_k = t_l");
    thin_opts(lx_z);
    lx_z->add_option("-k", k)->required();
    lx_z->add_option("-l", l)->required();
    on(lx_z, "lexmodel zset", [&] {
        auto r = thin();
        auto z = build_z_set(r, k, l);
        auto bad = z_set_violation(r, z);
        std::vector<std::string> nodes;
        for (auto x : z.nodes) nodes.push_back(lex_id(r.model.nodes[x]));
        json res{{"thinning", thinning_json(r)},
                 {"j", z.j},
                 {"eta", lex_id(r.model.nodes[z.eta])},
                 {"nodes", nodes},
                 {"color", z.color.hash_hex()},
                 {"derivation", z.derivation},
                 {"monochromatic", !bad}};
        return emit(ctx, "lexmodel zset", res, bad ? 1 : 0);
    });

    // classify
    auto* cl = app.add_subcommand("classify", "Tame / wild classification of a tree term");
    cl->add_option("term", file, "Tree term file")->required();
    on(cl, "classify", [&] {
        auto t = parse_tree_term(ctx.read(file));
        auto j = verdict_to_json(classify(t));
        j["term"] = t.str();
        return emit(ctx, "classify", j, 0);
    });

    // synth
    auto* sy = app.add_subcommand("synth", "Synthesize a definable well-order certificate");
    sy->require_subcommand(1);
    auto* sy_chain = sy->add_subcommand("chain", "Chain with a C_n presentation");
    add_structure(sy_chain);
    sy_chain->add_option("--presentation", presentation, "Presentation JSON")->required();
    sy_chain->add_option("-n", n, "Degree (default: presentation depth)");
    on(sy_chain, "synth chain", [&] {
        auto c = load_struct(ctx, structure);
        auto p = presentation_from_json(unwrap(ctx.read_json(presentation), "presentation"));
        auto crt = synth_chain_wellorder(c, p, n ? n : p.depth());
        return emit(ctx, "synth chain", {{"certificate", certificate_to_json(crt)}}, 0);
    });
    auto* sy_tree = sy->add_subcommand("tree", "Finite tree");
    add_structure(sy_tree);
    on(sy_tree, "synth tree", [&] {
        auto t = load_struct(ctx, structure);
        auto s = synth_tree_wellorder(t);
        json ranks = json::object();
        for (std::size_t i = 0; i < t.size(); ++i) ranks[t.id(i)] = s.rank[i];
        return emit(ctx, "synth tree", {{"certificate", certificate_to_json(s.cert)}, {"rank", ranks}}, 0);
    });

    // verify-cert
    auto* vc = app.add_subcommand("verify-cert", "Check a well-order certificate against a structure");
    add_structure(vc);
    vc->add_option("--cert", cert, "Certificate JSON (or a synth report)")->required();
    on(vc, "verify-cert", [&] {
        auto s = load_struct(ctx, structure);
        auto crt = certificate_from_json(unwrap(ctx.read_json(cert), "certificate"));
        auto r = verify_certificate(s, crt);
        return emit(ctx, "verify-cert", {{"accepted", r.accepted}, {"violations", r.violations}}, r.accepted ? 0 : 1);
    });

    // falsify
    auto* fa = app.add_subcommand("falsify", "Counterexamples to definable choice");
    fa->require_subcommand(1);
    auto* fa_pair = fa->add_subcommand("pair", "Find x, y with equal depth-n theories over {x, y}");
    add_structure(fa_pair);
    add_params(fa_pair);
    fa_pair->add_option("-n,--depth", depth)->required();
    fa_pair->add_flag("--reverse", reverse, "Scan pairs in reverse canonical order");
    on(fa_pair, "falsify pair", [&] {
        auto s = load_struct(ctx, structure);
        guard(ctx, s.size(), depth);
        auto ps = params_of(s, params);
        auto w = find_indiscernible_pair(s, ps, depth, reverse);
        if (!w) return emit(ctx, "falsify pair", {{"witness", nullptr}, {"depth", depth}}, 1);
        return emit(ctx, "falsify pair", {{"witness", witness_to_json(s, *w)}, {"verified", witness_holds(s, ps, *w)}}, 0);
    });
    auto* fa_choice = fa->add_subcommand("choice", "Check whether a formula defines a choice function");
    add_structure(fa_choice);
    add_params(fa_choice);
    fa_choice->add_option("formula", file, "Formula file; free variables x, X, then the parameters")->required();
    fa_choice->add_option("--free", free_vars, "Free variables in argument order")->delimiter(',');
    on(fa_choice, "falsify choice", [&] {
        auto s = load_struct(ctx, structure);
        auto f = parse_formula(ctx.read(file), free_vars);
        guard(ctx, s.size(), f.depth());
        auto v = check_choice_function(s, f, params_of(s, params));
        json r{{"verdict", v.name()}};
        if (!v.ok()) {
            r["X"] = member_ids(s, v.failing);
            r["chosen"] = ids_of(s, v.chosen);
        }
        return emit(ctx, "falsify choice", r, v.ok() ? 0 : 1);
    });
    auto* fa_mono = fa->add_subcommand("mono", "Monochromatic subset of the segment colouring of a chain");
    add_structure(fa_mono);
    add_params(fa_mono);
    fa_mono->add_option("--depth", depth, "Depth of the colouring");
    fa_mono->add_option("-k", k, "Size of the subset")->required();
    on(fa_mono, "falsify mono", [&] {
        auto c = load_struct(ctx, structure);
        // segment theories are composed from points, so only depth is guarded
        if (!ctx.force && depth > 2) throw UsageError("colouring depth above 2; use --force");
        auto col = coloring_of(c, params_of(c, params), depth);
        auto r = find_monochromatic(col, k);
        if (!r) return emit(ctx, "falsify mono", {{"k", k}, {"subset", nullptr}}, 1);
        std::vector<std::size_t> elems;
        for (auto pos : *r) elems.push_back(c.chain_order()[pos]);
        json res{{"k", k}, {"positions", *r}, {"subset", ids_of(c, elems)}};
        if (r->size() >= 2) res["color"] = col((*r)[0], (*r)[1]).hash_hex();
        return emit(ctx, "falsify mono", res, 0);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "msow " << command << ": " << e.what() << "\n";
        return 2;
    }
    return code;
}
