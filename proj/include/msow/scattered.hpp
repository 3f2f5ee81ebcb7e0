#pragma once

// Symbolic scattered order terms, their Hausdorff degree, the catalog chains
// C_n / C_n*, and finite realizations.
//
//   t ::= (fin k) | (concat t...) | (omega t) | (omegastar t)
//       | (graded cn) | (graded cnstar) | (rational)
//
// (omega t) is the sum of t over omega, (omegastar t) over omega*, and
// (graded cn) is C_1 + C_2 + C_3 + ... (cnstar: the starred chains).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msow/sexpr.hpp"
#include "msow/structures.hpp"

namespace msow {

struct OrderTerm {
    enum class Kind { fin, concat, omega, omega_star, graded, rational };
    Kind kind = Kind::fin;
    std::size_t k = 0;     // fin
    bool starred = false;  // graded
    std::vector<OrderTerm> kids;

    static OrderTerm fin(std::size_t k) { return {Kind::fin, k, false, {}}; }
    static OrderTerm concat(std::vector<OrderTerm> ts) { return {Kind::concat, 0, false, std::move(ts)}; }
    static OrderTerm omega(OrderTerm t) { return {Kind::omega, 0, false, {std::move(t)}}; }
    static OrderTerm omega_star(OrderTerm t) { return {Kind::omega_star, 0, false, {std::move(t)}}; }
    static OrderTerm graded(bool starred) { return {Kind::graded, 0, starred, {}}; }
    static OrderTerm rational() { return {Kind::rational, 0, false, {}}; }

    bool operator==(const OrderTerm&) const = default;

    std::string str() const {
        switch (kind) {
        case Kind::fin: return "(fin " + std::to_string(k) + ")";
        case Kind::concat: {
            std::string s = "(concat";
            for (const auto& t : kids) s += " " + t.str();
            return s + ")";
        }
        case Kind::omega: return "(omega " + kids[0].str() + ")";
        case Kind::omega_star: return "(omegastar " + kids[0].str() + ")";
        case Kind::graded: return starred ? "(graded cnstar)" : "(graded cn)";
        case Kind::rational: return "(rational)";
        }
        return "";
    }
};

inline OrderTerm order_term_from_sexpr(const SExpr& s) {
    const std::string& h = s.head();
    const std::size_t nargs = s.list.size() - 1;
    auto need = [&](std::size_t n) {
        if (nargs != n) throw Error("order term: wrong argument count in " + s.str());
    };
    if (h == "fin") {
        need(1);
        const auto& a = s.list[1].atom;
        if (a.empty() || a.find_first_not_of("0123456789") != std::string::npos) throw Error("order term: bad size in " + s.str());
        return OrderTerm::fin(std::stoul(a));
    }
    if (h == "concat") {
        std::vector<OrderTerm> ts;
        for (std::size_t i = 1; i < s.list.size(); ++i) ts.push_back(order_term_from_sexpr(s.list[i]));
        return OrderTerm::concat(std::move(ts));
    }
    if (h == "omega") {
        need(1);
        return OrderTerm::omega(order_term_from_sexpr(s.list[1]));
    }
    if (h == "omegastar") {
        need(1);
        return OrderTerm::omega_star(order_term_from_sexpr(s.list[1]));
    }
    if (h == "graded") {
        need(1);
        const auto& a = s.list[1].atom;
        if (a != "cn" && a != "cnstar") throw Error("order term: graded takes cn or cnstar");
        return OrderTerm::graded(a == "cnstar");
    }
    if (h == "rational") {
        need(0);
        return OrderTerm::rational();
    }
    throw Error("order term: unknown constructor '" + h + "'");
}

inline OrderTerm parse_order_term(const std::string& text) { return order_term_from_sexpr(parse_sexpr(text)); }

/// C_n (starred = false) or C_n* per the catalog recursion
/// C_1 = omega, C_1* = omega*, C_n = sum over omega of C_{n-1}*, C_n* = sum over omega* of C_{n-1}.
inline OrderTerm catalog_term(std::size_t n, bool starred) {
    if (n == 0) throw Error("catalog_term: n must be at least 1");
    if (n == 1) return starred ? OrderTerm::omega_star(OrderTerm::fin(1)) : OrderTerm::omega(OrderTerm::fin(1));
    return starred ? OrderTerm::omega_star(catalog_term(n - 1, false)) : OrderTerm::omega(catalog_term(n - 1, true));
}

/// Flatten nested concatenations, drop empty parts, merge adjacent finite
/// parts and collapse sums of the empty chain.
inline OrderTerm normalize(const OrderTerm& t) {
    using K = OrderTerm::Kind;
    switch (t.kind) {
    case K::fin:
    case K::graded:
    case K::rational: return t;
    case K::omega:
    case K::omega_star: {
        auto c = normalize(t.kids[0]);
        if (c.kind == K::fin && c.k == 0) return OrderTerm::fin(0);
        return {t.kind, 0, false, {c}};
    }
    case K::concat: {
        std::vector<OrderTerm> parts;
        std::function<void(const OrderTerm&)> add = [&](const OrderTerm& x) {
            auto y = normalize(x);
            if (y.kind == K::concat) {
                for (const auto& z : y.kids) add(z);
                return;
            }
            if (y.kind == K::fin && y.k == 0) return;
            if (y.kind == K::fin && !parts.empty() && parts.back().kind == K::fin) {
                parts.back().k += y.k;
                return;
            }
            parts.push_back(y);
        };
        for (const auto& x : t.kids) add(x);
        if (parts.empty()) return OrderTerm::fin(0);
        if (parts.size() == 1) return parts[0];
        return OrderTerm::concat(std::move(parts));
    }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Hausdorff degree

struct HdegTag {
    enum class Kind { finite, infinite, not_scattered };
    Kind kind = Kind::finite;
    std::size_t value = 0;  // upper bound (the degree when exact)
    std::size_t lower = 0;
    bool exact = true;

    std::string str() const {
        switch (kind) {
        case Kind::not_scattered: return "not scattered";
        case Kind::infinite: return "≥ ω";
        case Kind::finite:
            if (exact) return std::to_string(value);
            return std::to_string(value) + " (upper bound; at least " + std::to_string(lower) + ")";
        }
        return "";
    }
    bool operator==(const HdegTag&) const = default;
};

namespace detail {

// Degree bounds of a scattered term of finite degree.
//   hi     : an upper bound on Hdeg
//   hi_wo  : least d such that the order is a well-ordered sum of parts of
//            degree < d (found by merging nested well-ordered sums)
//   hi_iwo : the same for inversely well-ordered sums
struct DegInfo {
    bool scattered = true;
    bool infinite_degree = false;
    bool empty = false;
    bool finite = false;
    bool wo = false, iwo = false;
    std::size_t lo = 0, hi = 0, hi_wo = 0, hi_iwo = 0;
    bool alternating = false;  // pure alternating nesting over a nonempty finite chain
    OrderTerm::Kind head = OrderTerm::Kind::fin;
};

inline std::size_t contrib_wo(const DegInfo& p) { return std::min(p.hi_wo, p.hi + 1); }
inline std::size_t contrib_iwo(const DegInfo& p) { return std::min(p.hi_iwo, p.hi + 1); }

inline DegInfo deg_info(const OrderTerm& t) {
    using K = OrderTerm::Kind;
    DegInfo d;
    d.head = t.kind;
    switch (t.kind) {
    case K::fin:
        d.finite = true;
        d.empty = t.k == 0;
        d.wo = d.iwo = true;
        d.hi_wo = d.hi_iwo = d.empty ? 0 : 1;
        d.alternating = !d.empty;
        return d;
    case K::rational: d.scattered = false; return d;
    case K::graded: d.infinite_degree = true; return d;
    case K::omega:
    case K::omega_star: {
        auto c = deg_info(t.kids[0]);
        if (!c.scattered || c.infinite_degree || c.empty) return c.empty ? deg_info(OrderTerm::fin(0)) : c;
        const bool fwd = t.kind == K::omega;
        d.wo = fwd && c.wo;
        d.iwo = !fwd && c.iwo;
        if (fwd) {
            d.hi_wo = std::max<std::size_t>(1, contrib_wo(c));
            d.hi_iwo = d.hi_wo + 1;
        } else {
            d.hi_iwo = std::max<std::size_t>(1, contrib_iwo(c));
            d.hi_wo = d.hi_iwo + 1;
        }
        d.hi = std::min(d.hi_wo, d.hi_iwo);
        d.lo = std::max<std::size_t>(c.lo, (d.wo || d.iwo) ? 1 : 2);
        d.alternating = c.alternating && c.head != t.kind;
        if (d.alternating) d.lo = d.hi;  // catalog-shaped: Hdeg(C_n) = n
        if (c.head == t.kind && c.lo == c.hi) d.lo = std::max(d.lo, c.lo);
        return d;
    }
    case K::concat: {
        std::vector<DegInfo> parts;
        for (const auto& x : t.kids) {
            auto p = deg_info(x);
            if (!p.scattered) return p;
            if (!p.empty) parts.push_back(p);
        }
        for (const auto& p : parts)
            if (p.infinite_degree) return p;
        if (parts.empty()) return deg_info(OrderTerm::fin(0));
        if (parts.size() == 1) return parts[0];
        d.finite = std::all_of(parts.begin(), parts.end(), [](auto& p) { return p.finite; });
        d.wo = std::all_of(parts.begin(), parts.end(), [](auto& p) { return p.wo; });
        d.iwo = std::all_of(parts.begin(), parts.end(), [](auto& p) { return p.iwo; });
        if (d.finite) {
            d.hi_wo = d.hi_iwo = 1;
            return d;
        }
        for (const auto& p : parts) {
            d.hi_wo = std::max(d.hi_wo, contrib_wo(p));
            d.hi_iwo = std::max(d.hi_iwo, contrib_iwo(p));
            d.lo = std::max(d.lo, p.lo);
        }
        d.hi = std::min(d.hi_wo, d.hi_iwo);
        d.lo = std::max<std::size_t>(d.lo, (d.wo || d.iwo) ? 1 : 2);
        return d;
    }
    }
    return d;
}

}  // namespace detail

inline HdegTag hdeg(const OrderTerm& t) {
    auto d = detail::deg_info(normalize(t));
    HdegTag h;
    if (!d.scattered) {
        h.kind = HdegTag::Kind::not_scattered;
        return h;
    }
    if (d.infinite_degree) {
        h.kind = HdegTag::Kind::infinite;
        return h;
    }
    if (d.finite) return h;
    if (d.wo || d.iwo) {
        h.value = h.lower = 1;
        return h;
    }
    h.value = d.hi;
    h.lower = std::min(d.lo, d.hi);
    h.exact = h.lower == h.value;
    return h;
}

// ---------------------------------------------------------------------------
// Finite realizations
//
// Elements of a term's denotation are coordinate paths. Every element gets a
// weight (sum of its summand indices and dyadic depths); only finitely many
// elements share a weight, so enumerating by weight and cutting at `budget`
// gives realizations that grow by inclusion as the budget grows.

namespace detail {

struct Point {
    std::vector<std::int64_t> coords;
    std::string id;
    std::size_t weight = 0;
};

inline void enumerate_points(const OrderTerm& t, std::size_t max_weight, std::vector<Point>& out) {
    using K = OrderTerm::Kind;
    switch (t.kind) {
    case K::fin:
        for (std::size_t i = 0; i < t.k && i <= max_weight; ++i) out.push_back({{std::int64_t(i)}, std::to_string(i), i});
        return;
    case K::concat:
        for (std::size_t p = 0; p < t.kids.size(); ++p) {
            std::vector<Point> sub;
            enumerate_points(t.kids[p], max_weight, sub);
            for (auto& x : sub) {
                x.coords.insert(x.coords.begin(), std::int64_t(p));
                x.id = "c" + std::to_string(p) + "." + x.id;
                out.push_back(std::move(x));
            }
        }
        return;
    case K::omega:
    case K::omega_star:
        for (std::size_t j = 0; j <= max_weight; ++j) {
            std::vector<Point> sub;
            enumerate_points(t.kids[0], max_weight - j, sub);
            for (auto& x : sub) {
                x.coords.insert(x.coords.begin(), t.kind == K::omega ? std::int64_t(j) : -std::int64_t(j));
                x.id = (t.kind == K::omega ? "w" : "s") + std::to_string(j) + "." + x.id;
                x.weight += j;
                out.push_back(std::move(x));
            }
        }
        return;
    case K::graded:
        for (std::size_t j = 0; j <= max_weight; ++j) {
            std::vector<Point> sub;
            enumerate_points(catalog_term(j + 1, t.starred), max_weight - j, sub);
            for (auto& x : sub) {
                x.coords.insert(x.coords.begin(), std::int64_t(j));
                x.id = "g" + std::to_string(j) + "." + x.id;
                x.weight += j;
                out.push_back(std::move(x));
            }
        }
        return;
    case K::rational:
        // odd numerators over 2^(d+1): 1/2, then 1/4 3/4, then 1/8 ... (midpoint insertion)
        for (std::size_t d = 0; d <= max_weight && d < 40; ++d) {
            const std::int64_t den = std::int64_t(1) << (d + 1);
            for (std::int64_t num = 1; num < den; num += 2) {
                const std::int64_t scaled = num << (40 - d - 1);  // common denominator 2^40
                out.push_back({{scaled}, "q" + std::to_string(num) + "/" + std::to_string(den), d});
            }
        }
        return;
    }
}

inline bool point_less(const Point& a, const Point& b) { return a.coords < b.coords; }

inline std::size_t denotation_size(const OrderTerm& t) {  // npos when infinite
    using K = OrderTerm::Kind;
    switch (t.kind) {
    case K::fin: return t.k;
    case K::concat: {
        std::size_t s = 0;
        for (const auto& x : t.kids) {
            auto k = denotation_size(x);
            if (k == npos) return npos;
            s += k;
        }
        return s;
    }
    case K::omega:
    case K::omega_star: return denotation_size(t.kids[0]) == 0 ? 0 : npos;
    default: return npos;
    }
}

}  // namespace detail

struct Realization {
    FinStructure chain;
    std::vector<std::size_t> weights;  // by chain position
};

/// A finite sub-chain of the denotation of t with min(budget, |t|) elements:
/// the elements of least weight (ties broken by order).
inline Realization realize_prefix(const OrderTerm& t, std::size_t budget) {
    const auto total = detail::denotation_size(t);
    const std::size_t want = total == npos ? budget : std::min(budget, total);
    std::vector<detail::Point> pts;
    std::size_t w = 0;
    while (true) {
        pts.clear();
        detail::enumerate_points(t, w, pts);
        if (pts.size() >= want) break;
        if (w > 4 * budget + 64) throw Error("realize_prefix: could not reach the budget");
        ++w;
    }
    // keep everything below the cut weight, then fill up in order
    std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        if (a.weight != b.weight) return a.weight < b.weight;
        return detail::point_less(a, b);
    });
    pts.resize(want);
    std::sort(pts.begin(), pts.end(), detail::point_less);
    std::vector<std::string> order;
    Realization r;
    for (const auto& p : pts) {
        order.push_back(p.id);
        r.weights.push_back(p.weight);
    }
    r.chain = FinStructure::make_chain(order);
    return r;
}

}  // namespace msow
