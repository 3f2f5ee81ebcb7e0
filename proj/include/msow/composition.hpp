#pragma once

// Sums of chain theories, restriction theories of segments, and additive
// colourings built from them.

#include <array>
#include <map>
#include <optional>
#include <mutex>
#include <unordered_map>
#include <utility>
#include <vector>

#include "msow/theory.hpp"

namespace msow {

namespace detail {

inline Theory sum_atoms(Theory a, Theory b) {
    const std::size_t l = a.arity();
    const auto& x = a.atom_bits();
    const auto& y = b.atom_bits();
    std::string out(atom_count(l), '\0');
    auto S = [&](const std::string& v, std::size_t i) { return v[atom_index(Atom::sing, i, 0, l)] != 0; };
    auto E = [&](const std::string& v, std::size_t i) { return v[atom_index(Atom::empty, i, 0, l)] != 0; };
    for (std::size_t i = 0; i < l; ++i) {
        out[atom_index(Atom::sing, i, 0, l)] = (S(x, i) && E(y, i)) || (E(x, i) && S(y, i));
        out[atom_index(Atom::empty, i, 0, l)] = E(x, i) && E(y, i);
    }
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < l; ++j) {
            auto at = [&](const std::string& v, Atom k) { return v[atom_index(k, i, j, l)] != 0; };
            out[atom_index(Atom::subset, i, j, l)] = at(x, Atom::subset) && at(y, Atom::subset);
            out[atom_index(Atom::equal, i, j, l)] = at(x, Atom::equal) && at(y, Atom::equal);
            out[atom_index(Atom::member, i, j, l)] =
                (at(x, Atom::member) && E(y, i)) || (E(x, i) && at(y, Atom::member));
            out[atom_index(Atom::le, i, j, l)] = (at(x, Atom::le) && E(y, i) && E(y, j)) ||
                                                  (at(y, Atom::le) && E(x, i) && E(x, j)) ||
                                                  (S(x, i) && E(y, i) && E(x, j) && S(y, j));
        }
    return Theory::from_atoms(l, std::move(out));
}

struct PairHash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const {
        return static_cast<std::size_t>(mix(p.first * 0x9e3779b97f4a7c15ull ^ p.second));
    }
};

inline std::mutex& sum_mu() {
    static std::mutex m;
    return m;
}
inline std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, Theory, PairHash>& sum_cache() {
    static std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, Theory, PairHash> c;
    return c;
}

}  // namespace detail

/// t1 + t2: the theory of a concatenation of any witnesses of t1 and t2.
inline Theory sum(Theory t1, Theory t2) {
    if (t1.rank() != t2.rank()) throw Error("sum: rank mismatch");
    if (t1.arity() != t2.arity()) throw Error("sum: arity mismatch");
    const auto key = std::make_pair(t1.id(), t2.id());
    {
        std::lock_guard lock(detail::sum_mu());
        auto it = detail::sum_cache().find(key);
        if (it != detail::sum_cache().end()) return it->second;
    }
    Theory out;
    if (t1.rank() == 0) {
        out = detail::sum_atoms(t1, t2);
    } else {
        std::vector<Theory> ms;
        ms.reserve(t1.member_count() * t2.member_count());
        for (std::size_t i = 0; i < t1.member_count(); ++i)
            for (std::size_t j = 0; j < t2.member_count(); ++j) ms.push_back(sum(t1.member(i), t2.member(j)));
        out = Theory::from_members(t1.rank(), t1.arity(), ms);
    }
    std::lock_guard lock(detail::sum_mu());
    detail::sum_cache().emplace(key, out);
    return out;
}

/// Theory of the empty chain with `arity` (necessarily empty) sets.
inline Theory empty_chain_theory(std::size_t rank, std::size_t arity) {
    auto c = FinStructure::make_chain({});
    return compute_theory(c, std::vector<Subset>(arity, Subset{}), rank);
}

/// Left fold of sum; the empty list gives the empty-chain theory.
inline Theory sigma(const std::vector<Theory>& ts, std::size_t rank, std::size_t arity) {
    Theory acc = empty_chain_theory(rank, arity);
    for (auto t : ts) {
        if (t.rank() != rank || t.arity() != arity) throw Error("sigma: mixed ranks or arities");
        acc = sum(acc, t);
    }
    return acc;
}

inline Theory sigma(const std::vector<Theory>& ts) {
    if (ts.empty()) throw Error("sigma: empty list needs an explicit rank and arity");
    return sigma(ts, ts.front().rank(), ts.front().arity());
}

// ---------------------------------------------------------------------------
// Restriction theories Th^n(C; P)|[a,b)

enum class Route { automatic, direct, compositional };

/// Theory of a one-element chain whose element belongs to the sets in `bits`.
inline Theory point_theory(const std::vector<bool>& bits, std::size_t n) {
    auto c = FinStructure::make_chain({"p"});
    std::vector<Subset> t;
    for (bool b : bits) t.push_back(Subset{b});
    return compute_theory(c, t, n);
}

/// Per-element memberships of the structure's predicates followed by `params`.
inline std::vector<std::vector<bool>> membership_rows(const FinStructure& c, const std::vector<Subset>& params) {
    std::vector<std::vector<bool>> rows(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (const auto& p : c.predicates()) rows[i].push_back(p.members[i]);
        for (const auto& p : params) {
            if (p.size() != c.size()) throw Error("parameter subset has wrong width");
            rows[i].push_back(p[i]);
        }
    }
    return rows;
}

inline std::size_t tuple_arity(const FinStructure& c, const std::vector<Subset>& params) {
    return c.predicates().size() + params.size();
}

/// Th^n([a,b); P ∩ [a,b)) where a, b are chain positions and b may equal
/// |c| (the top sentinel).
inline Theory restriction_theory(const FinStructure& c, const std::vector<Subset>& params, std::size_t a, std::size_t b,
                                 std::size_t n, Route route = Route::automatic) {
    if (c.kind() != Kind::chain) throw Error("restriction_theory: carrier must be a chain");
    if (a >= b) throw Error("restriction_theory: need a < b");
    if (b > c.size()) throw Error("restriction_theory: position out of range");
    if (route == Route::automatic) route = (b - a) <= 6 ? Route::direct : Route::compositional;
    const auto& order = c.chain_order();
    if (route == Route::direct) {
        std::vector<std::size_t> seg(order.begin() + a, order.begin() + b);
        auto sub = c.restrict_to(seg);
        std::vector<Subset> ps;
        for (const auto& p : params) ps.push_back(c.project(p, sub));
        return compute_theory(sub, ps, n);
    }
    auto rows = membership_rows(c, params);
    std::vector<Theory> pts;
    for (std::size_t r = a; r < b; ++r) pts.push_back(point_theory(rows[order[r]], n));
    return sigma(pts, n, tuple_arity(c, params));
}

/// Colours of all segments [a,b) of a chain, computed by folding point
/// theories. Suitable for long chains where direct enumeration is impossible.
class SegmentTheories {
public:
    SegmentTheories(const FinStructure& c, const std::vector<Subset>& params, std::size_t n)
        : n_(n), arity_(tuple_arity(c, params)) {
        if (c.kind() != Kind::chain) throw Error("SegmentTheories: carrier must be a chain");
        auto rows = membership_rows(c, params);
        std::map<std::vector<bool>, Theory> cache;
        for (auto e : c.chain_order()) {
            auto it = cache.find(rows[e]);
            if (it == cache.end()) it = cache.emplace(rows[e], point_theory(rows[e], n)).first;
            points_.push_back(it->second);
        }
    }

    /// Theory of [a,b) by chain positions.
    Theory operator()(std::size_t a, std::size_t b) const {
        if (a >= b || b > points_.size()) throw Error("SegmentTheories: bad segment");
        const auto key = (std::uint64_t(a) << 32) | b;
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        Theory t = b == a + 1 ? points_[a] : sum((*this)(a, b - 1), points_[b - 1]);
        memo_.emplace(key, t);
        return t;
    }

    std::size_t size() const { return points_.size(); }
    std::size_t depth() const { return n_; }
    std::size_t arity() const { return arity_; }

private:
    std::size_t n_, arity_;
    std::vector<Theory> points_;
    mutable std::unordered_map<std::uint64_t, Theory> memo_;
};

/// f(a,b) = restriction theory on [a,b) for chain positions a < b.
struct AdditiveColoring {
    FinStructure carrier;
    std::vector<Subset> params;
    std::size_t depth = 0;
    std::map<std::pair<std::size_t, std::size_t>, Theory> color;

    Theory operator()(std::size_t a, std::size_t b) const { return color.at({a, b}); }
    std::size_t size() const { return carrier.size(); }
};

/// First triple violating f(x,z) = f(x,y) + f(y,z), if any.
inline std::optional<std::array<std::size_t, 3>> additivity_violation(const AdditiveColoring& col) {
    const std::size_t n = col.size();
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y)
            for (std::size_t z = y + 1; z < n; ++z)
                if (col(x, z) != sum(col(x, y), col(y, z))) return std::array<std::size_t, 3>{x, y, z};
    return std::nullopt;
}

inline AdditiveColoring coloring_of(const FinStructure& c, const std::vector<Subset>& params, std::size_t m,
                                    Route route = Route::automatic) {
    if (c.kind() != Kind::chain) throw Error("coloring_of: carrier must be a chain");
    if (c.size() < 2) throw Error("coloring_of: need at least two elements");
    AdditiveColoring col{c, params, m, {}};
    for (std::size_t a = 0; a < c.size(); ++a)
        for (std::size_t b = a + 1; b < c.size(); ++b) col.color[{a, b}] = restriction_theory(c, params, a, b, m, route);
    if (auto v = additivity_violation(col))
        throw Error("coloring_of: additivity fails at positions " + std::to_string((*v)[0]) + "," + std::to_string((*v)[1]) +
                    "," + std::to_string((*v)[2]));
    return col;
}

/// Concatenation C + D with predicates taken pointwise (C's tuple, then D's).
inline FinStructure concat_chains(const FinStructure& c, const FinStructure& d, const std::string& left = "L",
                                  const std::string& right = "R") {
    if (c.predicates().size() != d.predicates().size()) throw Error("concat_chains: tuple length mismatch");
    std::vector<std::string> order;
    for (auto e : c.chain_order()) order.push_back(left + c.id(e));
    for (auto e : d.chain_order()) order.push_back(right + d.id(e));
    auto s = FinStructure::make_chain(order);
    std::vector<Predicate> ps;
    for (std::size_t k = 0; k < c.predicates().size(); ++k) {
        Subset m(s.size(), false);
        for (std::size_t i = 0; i < c.size(); ++i)
            if (c.predicates()[k].members[i]) m[s.index_of(left + c.id(i))] = true;
        for (std::size_t i = 0; i < d.size(); ++i)
            if (d.predicates()[k].members[i]) m[s.index_of(right + d.id(i))] = true;
        ps.push_back({c.predicates()[k].name, m});
    }
    return s.with_predicates(ps);
}

}  // namespace msow
