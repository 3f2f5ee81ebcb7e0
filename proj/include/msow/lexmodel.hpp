#pragma once

// Truncated lexicographic models M^n, their embeddings into finite chains,
// and the finite form of the homogeneity argument: level-by-level thinning
// to a subtree on which segment theories depend only on meet levels, and
// the extraction of a monochromatic Z-shaped set.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msow/composition.hpp"

namespace msow {

using LexSeq = std::vector<std::size_t>;

/// <^n on sequences: an ancestor precedes its extensions; otherwise the
/// first difference decides, ascending below even levels and descending
/// below odd ones (`flip` swaps the two).
inline bool lex_less(const LexSeq& a, const LexSeq& b, bool flip = false) {
    const std::size_t m = std::min(a.size(), b.size());
    for (std::size_t j = 0; j < m; ++j)
        if (a[j] != b[j]) {
            const bool up = (j % 2 == 0) != flip;
            return up ? a[j] < b[j] : a[j] > b[j];
        }
    return a.size() < b.size();
}

inline std::string lex_id(const LexSeq& s) {
    std::string id = "r";
    for (auto k : s) id += "." + std::to_string(k);
    return id;
}

struct LexModel {
    std::size_t n = 0, b = 0;
    bool flip = false;
    std::vector<LexSeq> nodes;  // in <^n order
    std::map<LexSeq, std::size_t> index;

    std::size_t size() const { return nodes.size(); }
    std::size_t level(std::size_t i) const { return nodes[i].size(); }
    std::size_t find(const LexSeq& s) const {
        auto it = index.find(s);
        return it == index.end() ? npos : it->second;
    }
    /// Level of the meet of two nodes (length of the common prefix).
    std::size_t meet_level(std::size_t i, std::size_t j) const {
        const auto &a = nodes[i], &c = nodes[j];
        std::size_t k = 0;
        while (k < a.size() && k < c.size() && a[k] == c[k]) ++k;
        return k;
    }
    /// The model as a chain with ids "r", "r.0", "r.0.3", ...
    FinStructure chain() const {
        std::vector<std::string> order;
        for (const auto& s : nodes) order.push_back(lex_id(s));
        return FinStructure::make_chain(order);
    }
};

inline LexModel lex_model(std::size_t n, std::size_t b, bool flip = false) {
    if (n < 1) throw Error("lex_model: height must be at least 1");
    if (b < 2) throw Error("lex_model: branching must be at least 2");
    std::size_t total = 1, layer = 1;
    for (std::size_t i = 0; i < n; ++i) {
        layer *= b;
        total += layer;
        if (total > 200000) throw Error("lex_model: model too large");
    }
    LexModel m{n, b, flip, {}, {}};
    std::vector<LexSeq> frontier{{}};
    m.nodes.push_back({});
    for (std::size_t lev = 0; lev < n; ++lev) {
        std::vector<LexSeq> next;
        for (const auto& s : frontier)
            for (std::size_t k = 0; k < b; ++k) {
                auto t = s;
                t.push_back(k);
                next.push_back(t);
            }
        m.nodes.insert(m.nodes.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    std::sort(m.nodes.begin(), m.nodes.end(), [&](const auto& x, const auto& y) { return lex_less(x, y, flip); });
    for (std::size_t i = 0; i < m.nodes.size(); ++i) m.index[m.nodes[i]] = i;
    return m;
}

/// Order-preserving injection of the model into the chain: node i (in <^n
/// order) goes to chain position floor(i * |c| / |M|), spreading nodes out.
/// Empty when the chain is too small.
inline std::optional<std::vector<std::size_t>> embed_lex(const LexModel& m, const FinStructure& c) {
    if (c.kind() != Kind::chain) throw Error("embed_lex: target must be a chain");
    if (c.size() < m.size()) return std::nullopt;
    std::vector<std::size_t> f(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) f[i] = i * c.size() / m.size();
    return f;
}

// ---------------------------------------------------------------------------
// Thinning

struct ThinningResult {
    LexModel model;
    FinStructure chain;
    std::vector<Subset> params;
    std::size_t depth = 0;
    std::vector<std::size_t> embedding;            // node -> chain position
    std::vector<bool> alive;                       // the surviving subtree A
    std::map<std::size_t, LexSeq> kept;            // B_eta (successor digits) per inner node of A
    std::map<std::size_t, std::size_t> marker;     // k_eta per inner node of A
    std::vector<std::optional<Theory>> t;          // t[k] for 1 <= k <= n (t[0] unused)

    std::vector<std::size_t> survivors() const {
        std::vector<std::size_t> v;
        for (std::size_t i = 0; i < alive.size(); ++i)
            if (alive[i]) v.push_back(i);
        return v;
    }
    /// Digits k with eta^k in A.
    LexSeq successors(std::size_t eta) const {
        LexSeq out;
        auto s = model.nodes[eta];
        s.push_back(0);
        for (std::size_t k = 0; k < model.b; ++k) {
            s.back() = k;
            auto i = model.find(s);
            if (i != npos && alive[i]) out.push_back(k);
        }
        return out;
    }
    /// Follow k_nu from eta down to the leaves.
    std::size_t canonical_extension(std::size_t eta) const {
        while (model.level(eta) < model.n) {
            auto s = model.nodes[eta];
            s.push_back(marker.at(eta));
            eta = model.find(s);
        }
        return eta;
    }
    Theory color(std::size_t x, std::size_t y) const {
        auto a = embedding[x], b = embedding[y];
        if (a > b) std::swap(a, b);
        return restriction_theory(chain, params, a, b, depth);
    }
};

namespace detail {

// All same-level pairs of `nodes` have a colour that depends only on
// (level, meet level). `seen` collects the colour per key.
template <class Col>
bool homogeneous(const LexModel& m, const std::vector<std::size_t>& nodes, const Col& col,
                 std::map<std::pair<std::size_t, std::size_t>, Theory>& seen) {
    std::map<std::size_t, std::vector<std::size_t>> by_level;
    for (auto x : nodes) by_level[m.level(x)].push_back(x);
    for (auto& [lev, xs] : by_level) {
        std::sort(xs.begin(), xs.end());  // <^n order
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = i + 1; j < xs.size(); ++j) {
                const auto key = std::make_pair(lev, m.meet_level(xs[i], xs[j]));
                auto c = col(xs[i], xs[j]);
                auto [it, fresh] = seen.emplace(key, c);
                if (!fresh && it->second != c) return false;
            }
    }
    return true;
}

}  // namespace detail

/// Bottom-up thinning. At each node eta (deepest level first) keep the
/// largest set B_eta of successor digits (ties: lexicographically least)
/// such that eta together with the surviving subtrees above B_eta satisfies
/// (*); k_eta is the second element of B_eta and only the digits >= k_eta
/// survive. `min_keep` is the least acceptable |B_eta|.
inline ThinningResult thin_homogeneous(const LexModel& m, const FinStructure& c, const std::vector<std::size_t>& f,
                                       const std::vector<Subset>& params, std::size_t depth, std::size_t min_keep = 3) {
    if (f.size() != m.size()) throw Error("thin_homogeneous: embedding does not cover the model");
    if (min_keep < 2) throw Error("thin_homogeneous: min_keep must be at least 2");
    if (m.b > 16) throw Error("thin_homogeneous: branching above 16 is not supported");
    for (std::size_t i = 1; i < f.size(); ++i)
        if (f[i - 1] >= f[i]) throw Error("thin_homogeneous: embedding is not order preserving");
    ThinningResult r{m, c, params, depth, f, std::vector<bool>(m.size(), false), {}, {}, {}};
    SegmentTheories st(c, params, depth);
    auto col = [&](std::size_t x, std::size_t y) {
        auto a = f[x], b = f[y];
        if (a > b) std::swap(a, b);
        return st(a, b);
    };

    // A_{>=eta} as node lists
    std::vector<std::vector<std::size_t>> above(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m.level(i) == m.n) above[i] = {i};

    for (std::size_t lev = m.n; lev-- > 0;) {
        for (std::size_t eta = 0; eta < m.size(); ++eta) {
            if (m.level(eta) != lev) continue;
            std::vector<std::size_t> child(m.b);
            for (std::size_t k = 0; k < m.b; ++k) {
                auto s = m.nodes[eta];
                s.push_back(k);
                child[k] = m.find(s);
            }
            // subsets by decreasing size, then lexicographically
            std::vector<LexSeq> cands;
            for (std::uint32_t mask = 0; mask < (1u << m.b); ++mask) {
                LexSeq s;
                for (std::size_t k = 0; k < m.b; ++k)
                    if (mask >> k & 1) s.push_back(k);
                if (s.size() >= min_keep) cands.push_back(std::move(s));
            }
            std::sort(cands.begin(), cands.end(), [](const auto& x, const auto& y) {
                return x.size() != y.size() ? x.size() > y.size() : x < y;
            });
            std::optional<LexSeq> chosen;
            for (const auto& s : cands) {
                std::vector<std::size_t> u{eta};
                for (auto k : s) u.insert(u.end(), above[child[k]].begin(), above[child[k]].end());
                std::map<std::pair<std::size_t, std::size_t>, Theory> seen;
                if (detail::homogeneous(m, u, col, seen)) {
                    chosen = s;
                    break;
                }
            }
            if (!chosen)
                throw Error("thin_homogeneous: insufficient branching at level " + std::to_string(lev) + " (node " +
                            lex_id(m.nodes[eta]) + ")");
            r.kept[eta] = *chosen;
            r.marker[eta] = (*chosen)[1];
            above[eta] = {eta};
            for (auto k : *chosen)
                if (k >= (*chosen)[1]) above[eta].insert(above[eta].end(), above[child[k]].begin(), above[child[k]].end());
        }
    }
    const std::size_t root = m.find({});
    for (auto x : above[root]) r.alive[x] = true;
    // keep markers only for surviving inner nodes
    for (auto it = r.kept.begin(); it != r.kept.end();) {
        if (!r.alive[it->first]) {
            r.marker.erase(it->first);
            it = r.kept.erase(it);
        } else {
            ++it;
        }
    }
    std::map<std::pair<std::size_t, std::size_t>, Theory> seen;
    if (!detail::homogeneous(m, above[root], col, seen)) throw Error("thin_homogeneous: internal error, (*) fails");
    r.t.assign(m.n + 1, std::nullopt);
    for (const auto& [key, th] : seen)
        if (key.first == m.n) r.t[m.n - key.second] = th;
    return r;
}

/// Independent recheck of (*) on the surviving subtree, recomputing every
/// same-level pair's restriction theory. Returns a description of the first
/// failure.
inline std::optional<std::string> check_star(const ThinningResult& r) {
    const auto& m = r.model;
    std::map<std::pair<std::size_t, std::size_t>, Theory> seen;
    std::map<std::size_t, std::vector<std::size_t>> by_level;
    for (auto x : r.survivors()) by_level[m.level(x)].push_back(x);
    for (auto& [lev, xs] : by_level)
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = i + 1; j < xs.size(); ++j) {
                const auto ml = m.meet_level(xs[i], xs[j]);
                auto c = r.color(xs[i], xs[j]);
                auto [it, fresh] = seen.emplace(std::make_pair(lev, ml), c);
                if (!fresh && it->second != c)
                    return "pair " + lex_id(m.nodes[xs[i]]) + ", " + lex_id(m.nodes[xs[j]]) + " differs from another pair with meet level " +
                           std::to_string(ml);
                if (lev == m.n && (!r.t[m.n - ml] || *r.t[m.n - ml] != c))
                    return "t_" + std::to_string(m.n - ml) + " does not match pair " + lex_id(m.nodes[xs[i]]) + ", " +
                           lex_id(m.nodes[xs[j]]);
            }
    return std::nullopt;
}

/// Least k < l with t_k = t_l, if the level theories repeat.
inline std::optional<std::pair<std::size_t, std::size_t>> repeated_level_theory(const ThinningResult& r) {
    for (std::size_t l = 2; l < r.t.size(); ++l)
        for (std::size_t k = 1; k < l; ++k)
            if (r.t[k] && r.t[l] && *r.t[k] == *r.t[l]) return std::make_pair(k, l);
    return std::nullopt;
}

struct ZSet {
    std::size_t j = 0;                 // t_j = t_{j+1} is the equation used
    std::size_t eta = npos;            // node at level n - j - 1
    std::vector<std::size_t> left;     // B_1: extensions of eta's other successors
    std::vector<std::size_t> right;    // B_2: extensions of sigma = eta^k_eta's successors
    std::vector<std::size_t> nodes;    // B_1 and B_2 together, in chain order
    Theory color;
    std::vector<std::string> derivation;
};

/// From t_k = t_l derive t_{k+1} = t_k, then collect the canonical
/// extensions described above. All pairs of the result share one theory.
inline ZSet build_z_set(const ThinningResult& r, std::size_t k, std::size_t l) {
    const auto& m = r.model;
    if (!(1 <= k && k < l && l <= m.n)) throw Error("build_z_set: need 1 <= k < l <= n");
    if (!r.t[k] || !r.t[l]) throw Error("build_z_set: level theory undefined");
    if (*r.t[k] != *r.t[l]) throw Error("build_z_set: t_" + std::to_string(k) + " differs from t_" + std::to_string(l));
    ZSet z;
    if (l > k + 1) {
        if (!r.t[k + 1]) throw Error("build_z_set: level theory undefined");
        const Theory tk = *r.t[k], tk1 = *r.t[k + 1], tl = *r.t[l];
        // a pair meeting at level n-l split by a point meeting the left end at n-(k+1): t_l = t_{k+1} + t_l
        if (sum(tk1, tl) != tl) throw Error("build_z_set: t_l = t_{k+1} + t_l fails");
        // a pair meeting at n-(k+1) split by a point meeting the right end at n-k: t_{k+1} = t_{k+1} + t_k
        if (sum(tk1, tk) != tk1) throw Error("build_z_set: t_{k+1} = t_{k+1} + t_k fails");
        z.derivation.push_back("t_" + std::to_string(l) + " = t_" + std::to_string(k + 1) + " + t_" + std::to_string(l));
        z.derivation.push_back("t_" + std::to_string(k + 1) + " = t_" + std::to_string(k + 1) + " + t_" + std::to_string(k));
        z.derivation.push_back("hence t_" + std::to_string(k + 1) + " = t_" + std::to_string(k));
    } else {
        z.derivation.push_back("t_" + std::to_string(k) + " = t_" + std::to_string(l) + " given");
    }
    z.j = k;
    z.color = *r.t[k];
    std::size_t eta = m.find({});
    while (m.level(eta) < m.n - k - 1) {
        auto s = m.nodes[eta];
        s.push_back(r.marker.at(eta));
        eta = m.find(s);
    }
    z.eta = eta;
    const auto ke = r.marker.at(eta);
    auto sigma_seq = m.nodes[eta];
    sigma_seq.push_back(ke);
    const auto sigma = m.find(sigma_seq);
    for (auto d : r.successors(eta)) {
        if (d <= ke) continue;
        auto s = m.nodes[eta];
        s.push_back(d);
        z.left.push_back(r.canonical_extension(m.find(s)));
    }
    for (auto d : r.successors(sigma)) {
        auto s = sigma_seq;
        s.push_back(d);
        z.right.push_back(r.canonical_extension(m.find(s)));
    }
    z.nodes = z.left;
    z.nodes.insert(z.nodes.end(), z.right.begin(), z.right.end());
    std::sort(z.nodes.begin(), z.nodes.end());
    return z;
}

/// First pair of the Z-set whose recomputed theory differs from its colour.
inline std::optional<std::pair<std::size_t, std::size_t>> z_set_violation(const ThinningResult& r, const ZSet& z) {
    for (std::size_t i = 0; i < z.nodes.size(); ++i)
        for (std::size_t j = i + 1; j < z.nodes.size(); ++j)
            if (r.color(z.nodes[i], z.nodes[j]) != z.color) return std::make_pair(z.nodes[i], z.nodes[j]);
    return std::nullopt;
}

}  // namespace msow
