#pragma once

// Counterexample search: indiscernible pairs (no depth-n formula can choose
// from {x, y}), direct checking of candidate choice formulas, and
// monochromatic subsets of additive colourings.

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "msow/composition.hpp"
#include "msow/formula.hpp"
#include "msow/io.hpp"

namespace msow {

struct ChoiceWitness {
    std::size_t x = npos, y = npos;
    std::size_t depth = 0;
    Theory theory;  // Th^n(s; P, {x}, {x,y}) = Th^n(s; P, {y}, {x,y})
};

/// Th^n(s; own predicates, params, {x}, {x,y}).
inline Theory choice_theory(const FinStructure& s, const std::vector<Subset>& params, std::size_t x, std::size_t y,
                            std::size_t chosen, std::size_t n) {
    Subset sx(s.size(), false), xy(s.size(), false);
    sx[chosen] = true;
    xy[x] = xy[y] = true;
    auto tuple = params;
    tuple.push_back(sx);
    tuple.push_back(xy);
    return compute_theory(s, tuple, n);
}

/// First pair x < y (canonical index order; `reverse` scans from the last
/// pair) whose two choice theories coincide at depth n.
inline std::optional<ChoiceWitness> find_indiscernible_pair(const FinStructure& s, const std::vector<Subset>& params,
                                                            std::size_t n, bool reverse = false) {
    for (const auto& p : params)
        if (p.size() != s.size()) throw Error("find_indiscernible_pair: parameter has wrong width");
    const std::size_t m = s.size();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t y = x + 1; y < m; ++y) pairs.emplace_back(x, y);
    if (reverse) std::reverse(pairs.begin(), pairs.end());
    for (auto [x, y] : pairs) {
        auto a = choice_theory(s, params, x, y, x, n);
        if (a == choice_theory(s, params, x, y, y, n)) return ChoiceWitness{x, y, n, a};
    }
    return std::nullopt;
}

/// Recompute both theories from scratch (fresh cache) and compare the
/// serialized forms.
inline bool witness_holds(const FinStructure& s, const std::vector<Subset>& params, const ChoiceWitness& w) {
    clear_theory_cache();
    auto a = serialize_theory(choice_theory(s, params, w.x, w.y, w.x, w.depth));
    clear_theory_cache();
    auto b = serialize_theory(choice_theory(s, params, w.x, w.y, w.y, w.depth));
    return a == b && a == serialize_theory(w.theory);
}

inline json witness_to_json(const FinStructure& s, const ChoiceWitness& w) {
    return {{"structure", s.fingerprint()},
            {"x", s.id(w.x)},
            {"y", s.id(w.y)},
            {"X", {s.id(w.x), s.id(w.y)}},
            {"depth", w.depth},
            {"theory_hash", w.theory.hash_hex()}};
}

struct ChoiceVerdict {
    enum class Kind { defines_choice, none_chosen, several_chosen, outside };
    Kind kind = Kind::defines_choice;
    Subset failing;                 // the set X where it fails
    std::vector<std::size_t> chosen;

    bool ok() const { return kind == Kind::defines_choice; }
    std::string name() const {
        switch (kind) {
        case Kind::defines_choice: return "defines_choice";
        case Kind::none_chosen: return "none_chosen";
        case Kind::several_chosen: return "several_chosen";
        case Kind::outside: return "chosen_outside";
        }
        return "";
    }
};

/// f has free variables (x, X, P_1, ..., P_l) in that order. For each
/// nonempty X (increasing bitmask order) exactly one singleton {x} with
/// f({x}, X, P) must hold, and x must lie in X. Only singletons are tried
/// for x.
inline ChoiceVerdict check_choice_function(const FinStructure& s, const Formula& f, const std::vector<Subset>& params,
                                           const std::vector<Subset>* only = nullptr) {
    if (f.arity() != params.size() + 2)
        throw Error("check_choice_function: formula has " + std::to_string(f.arity()) + " free variables, expected " +
                    std::to_string(params.size() + 2));
    const std::size_t m = s.size();
    if (m > 16 && !only) throw Error("check_choice_function: more than 16 elements");
    auto check = [&](const Subset& xs, ChoiceVerdict& v) {
        std::vector<std::size_t> chosen;
        for (std::size_t e = 0; e < m; ++e) {
            Subset sx(m, false);
            sx[e] = true;
            std::vector<Subset> a{sx, xs};
            a.insert(a.end(), params.begin(), params.end());
            if (eval_direct(f, s, a)) chosen.push_back(e);
        }
        ChoiceVerdict::Kind k = ChoiceVerdict::Kind::defines_choice;
        if (chosen.empty())
            k = ChoiceVerdict::Kind::none_chosen;
        else if (chosen.size() > 1)
            k = ChoiceVerdict::Kind::several_chosen;
        else if (!xs[chosen[0]])
            k = ChoiceVerdict::Kind::outside;
        if (k == ChoiceVerdict::Kind::defines_choice) return false;
        v = {k, xs, chosen};
        return true;
    };
    ChoiceVerdict v;
    if (only) {
        for (const auto& xs : *only)
            if (check(xs, v)) return v;
        return v;
    }
    for (Mask mask = 1; mask < (Mask(1) << m); ++mask)
        if (check(from_mask(mask, m), v)) return v;
    return v;
}

/// Lexicographically first <-increasing list of k positions all of whose
/// pairs have one colour.
inline std::optional<std::vector<std::size_t>> find_monochromatic(const AdditiveColoring& col, std::size_t k) {
    const std::size_t n = col.size();
    if (k > n) throw Error("find_monochromatic: k exceeds the carrier size");
    if (k == 0) return std::vector<std::size_t>{};
    std::vector<std::size_t> cur;
    std::optional<Theory> colour;
    std::function<bool(std::size_t)> go = [&](std::size_t from) {
        if (cur.size() == k) return true;
        for (std::size_t e = from; e + (k - cur.size()) <= n; ++e) {
            bool ok = true;
            const bool first_pair = cur.size() == 1;
            for (auto a : cur) {
                auto c = col(a, e);
                if (first_pair) {
                    colour = c;
                } else if (c != *colour) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            cur.push_back(e);
            if (go(e + 1)) return true;
            cur.pop_back();
        }
        return false;
    };
    if (go(0)) return cur;
    return std::nullopt;
}

inline bool is_monochromatic(const AdditiveColoring& col, const std::vector<std::size_t>& xs) {
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j)
            if (xs[i] >= xs[j] || col(xs[i], xs[j]) != col(xs[0], xs[1])) return false;
    return true;
}

}  // namespace msow
