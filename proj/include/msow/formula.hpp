#pragma once

// Monadic formulas over set variables: the atoms sing, empty, subset, equal,
// member, le under not/and/or and set quantifiers. Text syntax is an
// s-expression, e.g. (exists X (and (sing X) (member X P0))).
//
//   f ::= (sing V) | (empty V) | (subset V V) | (equal V V) | (member V V)
//       | (le V V) | (true) | (false) | (not f) | (and f...) | (or f...)
//       | (implies f f) | (iff f f) | (exists V f) | (forall V f)
//
// implies and iff are expanded while parsing.

#include <algorithm>
#include <bit>
#include <map>
#include <string>
#include <vector>

#include "msow/sexpr.hpp"
#include "msow/theory.hpp"

namespace msow {

enum class Op { atom, truth, negation, conjunction, disjunction, exists, forall };

struct Expr {
    Op op = Op::truth;
    Atom atom = Atom::sing;  // when op == atom
    bool value = true;  // when op == truth
    std::vector<std::string> vars;  // atom arguments or the bound variable
    std::vector<Expr> kids;

    std::string str() const {
        static const char* names[] = {"sing", "empty", "subset", "equal", "member", "le"};
        switch (op) {
        case Op::atom: {
            std::string s = std::string("(") + names[static_cast<int>(atom)];
            for (const auto& v : vars) s += " " + v;
            return s + ")";
        }
        case Op::truth: return value ? "(true)" : "(false)";
        case Op::negation: return "(not " + kids[0].str() + ")";
        case Op::conjunction:
        case Op::disjunction: {
            std::string s = op == Op::conjunction ? "(and" : "(or";
            for (const auto& k : kids) s += " " + k.str();
            return s + ")";
        }
        case Op::exists: return "(exists " + vars[0] + " " + kids[0].str() + ")";
        case Op::forall: return "(forall " + vars[0] + " " + kids[0].str() + ")";
        }
        return "";
    }
};

inline std::size_t quantifier_depth(const Expr& e) {
    std::size_t d = 0;
    for (const auto& k : e.kids) d = std::max(d, quantifier_depth(k));
    return (e.op == Op::exists || e.op == Op::forall) ? d + 1 : d;
}

struct Formula {
    Expr root;
    std::vector<std::string> free;  // ordered; position i reads tuple entry i

    std::size_t depth() const { return quantifier_depth(root); }
    std::size_t arity() const { return free.size(); }
    std::string str() const { return root.str(); }
};

// Builders used by the test suites and the falsifier.
namespace f {
inline Expr atom(Atom a, std::string x, std::string y = {}) {
    Expr e;
    e.op = Op::atom;
    e.atom = a;
    e.vars.push_back(std::move(x));
    if (!y.empty()) e.vars.push_back(std::move(y));
    return e;
}
inline Expr sing(std::string x) { return atom(Atom::sing, std::move(x)); }
inline Expr empty(std::string x) { return atom(Atom::empty, std::move(x)); }
inline Expr subset(std::string x, std::string y) { return atom(Atom::subset, std::move(x), std::move(y)); }
inline Expr equal(std::string x, std::string y) { return atom(Atom::equal, std::move(x), std::move(y)); }
inline Expr member(std::string x, std::string y) { return atom(Atom::member, std::move(x), std::move(y)); }
inline Expr le(std::string x, std::string y) { return atom(Atom::le, std::move(x), std::move(y)); }
inline Expr truth(bool v) {
    Expr e;
    e.op = Op::truth;
    e.value = v;
    return e;
}
inline Expr neg(Expr a) {
    Expr e;
    e.op = Op::negation;
    e.kids.push_back(std::move(a));
    return e;
}
inline Expr conj(std::vector<Expr> ks) {
    Expr e;
    e.op = Op::conjunction;
    e.kids = std::move(ks);
    return e;
}
inline Expr disj(std::vector<Expr> ks) {
    Expr e;
    e.op = Op::disjunction;
    e.kids = std::move(ks);
    return e;
}
inline Expr implies(Expr a, Expr b) { return disj({neg(std::move(a)), std::move(b)}); }
inline Expr iff(Expr a, Expr b) { return conj({implies(a, b), implies(b, a)}); }
inline Expr exists(std::string v, Expr body) {
    Expr e;
    e.op = Op::exists;
    e.vars.push_back(std::move(v));
    e.kids.push_back(std::move(body));
    return e;
}
inline Expr forall(std::string v, Expr body) {
    Expr e;
    e.op = Op::forall;
    e.vars.push_back(std::move(v));
    e.kids.push_back(std::move(body));
    return e;
}
}  // namespace f

namespace detail {

inline void collect_free(const Expr& e, std::vector<std::string>& bound, std::vector<std::string>& out) {
    if (e.op == Op::atom) {
        for (const auto& v : e.vars)
            if (std::find(bound.begin(), bound.end(), v) == bound.end() && std::find(out.begin(), out.end(), v) == out.end())
                out.push_back(v);
        return;
    }
    if (e.op == Op::exists || e.op == Op::forall) {
        bound.push_back(e.vars[0]);
        collect_free(e.kids[0], bound, out);
        bound.pop_back();
        return;
    }
    for (const auto& k : e.kids) collect_free(k, bound, out);
}

inline bool is_variable(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'')) return false;
    return !std::isdigit(static_cast<unsigned char>(s[0]));
}

inline Expr expr_from_sexpr(const SExpr& s) {
    const std::string& h = s.head();
    auto nargs = s.list.size() - 1;
    auto var = [&](std::size_t i) {
        if (!s.list[i].is_atom() || !is_variable(s.list[i].atom)) throw Error("formula: expected a variable in " + s.str());
        return s.list[i].atom;
    };
    static const std::map<std::string, std::pair<Atom, std::size_t>> atoms = {
        {"sing", {Atom::sing, 1}},     {"empty", {Atom::empty, 1}},   {"subset", {Atom::subset, 2}},
        {"equal", {Atom::equal, 2}},   {"member", {Atom::member, 2}}, {"le", {Atom::le, 2}},
    };
    if (auto it = atoms.find(h); it != atoms.end()) {
        if (nargs != it->second.second) throw Error("formula: wrong argument count in " + s.str());
        return it->second.second == 1 ? f::atom(it->second.first, var(1)) : f::atom(it->second.first, var(1), var(2));
    }
    if (h == "true" || h == "false") {
        if (nargs != 0) throw Error("formula: " + h + " takes no arguments");
        return f::truth(h == "true");
    }
    if (h == "not") {
        if (nargs != 1) throw Error("formula: not takes one argument");
        return f::neg(expr_from_sexpr(s.list[1]));
    }
    if (h == "and" || h == "or") {
        std::vector<Expr> ks;
        for (std::size_t i = 1; i < s.list.size(); ++i) ks.push_back(expr_from_sexpr(s.list[i]));
        return h == "and" ? f::conj(std::move(ks)) : f::disj(std::move(ks));
    }
    if (h == "implies" || h == "iff") {
        if (nargs != 2) throw Error("formula: " + h + " takes two arguments");
        auto a = expr_from_sexpr(s.list[1]), b = expr_from_sexpr(s.list[2]);
        return h == "implies" ? f::implies(std::move(a), std::move(b)) : f::iff(std::move(a), std::move(b));
    }
    if (h == "exists" || h == "forall") {
        if (nargs != 2) throw Error("formula: " + h + " takes a variable and a body");
        auto v = var(1);
        auto body = expr_from_sexpr(s.list[2]);
        return h == "exists" ? f::exists(v, std::move(body)) : f::forall(v, std::move(body));
    }
    throw Error("formula: unknown operator '" + h + "'");
}

}  // namespace detail

/// Wrap an expression; free variables default to first-occurrence order.
inline Formula make_formula(Expr root, std::vector<std::string> declared = {}) {
    std::vector<std::string> bound, found;
    detail::collect_free(root, bound, found);
    Formula fm;
    fm.root = std::move(root);
    if (declared.empty()) {
        fm.free = std::move(found);
    } else {
        for (const auto& v : found)
            if (std::find(declared.begin(), declared.end(), v) == declared.end())
                throw Error("formula: variable '" + v + "' is not declared");
        fm.free = std::move(declared);
    }
    return fm;
}

inline Formula parse_formula(const std::string& text, std::vector<std::string> declared = {}) {
    return make_formula(detail::expr_from_sexpr(parse_sexpr(text)), std::move(declared));
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

struct Compiled {
    Op op;
    Atom atom;
    bool value;
    std::size_t a = 0, b = 0;  // slots
    std::vector<Compiled> kids;
};

inline Compiled compile(const Expr& e, std::vector<std::string>& scope) {
    Compiled c{e.op, e.atom, e.value, 0, 0, {}};
    auto slot = [&](const std::string& v) {
        for (std::size_t i = scope.size(); i-- > 0;)
            if (scope[i] == v) return i;
        throw Error("unbound variable '" + v + "'");
    };
    switch (e.op) {
    case Op::atom:
        c.a = slot(e.vars[0]);
        c.b = e.vars.size() > 1 ? slot(e.vars[1]) : c.a;
        break;
    case Op::exists:
    case Op::forall:
        scope.push_back(e.vars[0]);
        c.kids.push_back(compile(e.kids[0], scope));
        scope.pop_back();
        break;
    default:
        for (const auto& k : e.kids) c.kids.push_back(compile(k, scope));
    }
    return c;
}

inline bool eval_atom(Atom a, Mask x, Mask y, const std::vector<Mask>& up) {
    switch (a) {
    case Atom::sing: return std::has_single_bit(x);
    case Atom::empty: return x == 0;
    case Atom::subset: return (x & ~y) == 0;
    case Atom::equal: return x == y;
    case Atom::member: return std::has_single_bit(x) && (x & ~y) == 0;
    case Atom::le: return std::has_single_bit(x) && std::has_single_bit(y) && (up[std::countr_zero(x)] & y) != 0;
    }
    return false;
}

inline bool eval_direct(const Compiled& c, std::vector<Mask>& env, const Prepared& p) {
    switch (c.op) {
    case Op::atom: return eval_atom(c.atom, env[c.a], env[c.b], p.up);
    case Op::truth: return c.value;
    case Op::negation: return !eval_direct(c.kids[0], env, p);
    case Op::conjunction:
        for (const auto& k : c.kids)
            if (!eval_direct(k, env, p)) return false;
        return true;
    case Op::disjunction:
        for (const auto& k : c.kids)
            if (eval_direct(k, env, p)) return true;
        return false;
    case Op::exists:
    case Op::forall: {
        const bool want = c.op == Op::exists;
        const Mask count = Mask(1) << p.n;
        env.push_back(0);
        bool result = !want;
        for (Mask b = 0; b < count; ++b) {
            env.back() = b;
            if (eval_direct(c.kids[0], env, p) == want) {
                result = want;
                break;
            }
        }
        env.pop_back();
        return result;
    }
    }
    return false;
}

inline bool eval_theory(const Compiled& c, Theory t) {
    switch (c.op) {
    case Op::atom: {
        Theory z = reduce_depth(t, 0);
        if (c.atom == Atom::sing || c.atom == Atom::empty) return z.atom(atom_index(c.atom, c.a, 0, z.arity()));
        return z.atom(atom_index(c.atom, c.a, c.b, z.arity()));
    }
    case Op::truth: return c.value;
    case Op::negation: return !eval_theory(c.kids[0], t);
    case Op::conjunction:
        for (const auto& k : c.kids)
            if (!eval_theory(k, t)) return false;
        return true;
    case Op::disjunction:
        for (const auto& k : c.kids)
            if (eval_theory(k, t)) return true;
        return false;
    case Op::exists:
    case Op::forall: {
        const bool want = c.op == Op::exists;
        for (std::size_t i = 0; i < t.member_count(); ++i)
            if (eval_theory(c.kids[0], t.member(i)) == want) return want;
        return !want;
    }
    }
    return false;
}

}  // namespace detail

/// Standard semantics: quantifiers range over all subsets of the elements.
inline bool eval_direct(const Formula& fm, const FinStructure& s, const std::vector<Subset>& assignment) {
    if (assignment.size() < fm.free.size()) throw Error("eval_direct: unbound variable '" + fm.free[assignment.size()] + "'");
    if (assignment.size() > fm.free.size()) throw Error("eval_direct: too many assigned sets");
    auto p = detail::prepare(s);
    std::vector<std::string> scope = fm.free;
    auto c = detail::compile(fm.root, scope);
    std::vector<Mask> env;
    for (const auto& x : assignment) {
        if (x.size() != s.size()) throw Error("eval_direct: assignment has wrong width");
        env.push_back(to_mask(x));
    }
    return detail::eval_direct(c, env, p);
}

/// Decide a formula from a theory of sufficient rank.
inline bool eval_on_theory(const Formula& fm, Theory t) {
    if (fm.depth() > t.rank()) throw Error("eval_on_theory: quantifier depth exceeds theory rank");
    if (fm.arity() != t.arity()) throw Error("eval_on_theory: arity mismatch");
    std::vector<std::string> scope = fm.free;
    auto c = detail::compile(fm.root, scope);
    return detail::eval_theory(c, t);
}

}  // namespace msow
