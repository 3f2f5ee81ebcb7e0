#pragma once

// Symbolic trees and the tame / wild classification.
//
//   t ::= (leaf) | (node t...) | (omega-node t) | (spine ORDER) | (spine ORDER t)
//       | (graded-fan cn) | (graded-fan cnstar) | (full-binary)
//
// (omega-node t): a root with omega many copies of t above it.
// (spine o t): a branch of order type o with a copy of t grafted at every
// spine point (as an extra successor). (graded-fan cn): a root whose
// successors start branches of type C_1, C_2, ...

#include <string>
#include <vector>

#include "msow/io.hpp"
#include "msow/scattered.hpp"

namespace msow {

struct TreeTerm {
    enum class Kind { leaf, node, omega_node, spine, graded_fan, full_binary };
    Kind kind = Kind::leaf;
    std::vector<TreeTerm> kids;  // node: children; omega_node: the copy; spine: optional hang
    OrderTerm order;             // spine
    bool starred = false;        // graded_fan

    bool operator==(const TreeTerm&) const = default;

    std::string str() const {
        switch (kind) {
        case Kind::leaf: return "(leaf)";
        case Kind::node: {
            std::string s = "(node";
            for (const auto& k : kids) s += " " + k.str();
            return s + ")";
        }
        case Kind::omega_node: return "(omega-node " + kids[0].str() + ")";
        case Kind::spine: return "(spine " + order.str() + (kids.empty() ? "" : " " + kids[0].str()) + ")";
        case Kind::graded_fan: return starred ? "(graded-fan cnstar)" : "(graded-fan cn)";
        case Kind::full_binary: return "(full-binary)";
        }
        return "";
    }
};

inline TreeTerm tree_term_from_sexpr(const SExpr& s) {
    const auto& h = s.head();
    const std::size_t nargs = s.list.size() - 1;
    TreeTerm t;
    if (h == "leaf" || h == "full-binary") {
        if (nargs) throw Error("tree term: (" + h + ") takes no arguments");
        t.kind = h == "leaf" ? TreeTerm::Kind::leaf : TreeTerm::Kind::full_binary;
    } else if (h == "node") {
        t.kind = TreeTerm::Kind::node;
        for (std::size_t i = 1; i < s.list.size(); ++i) t.kids.push_back(tree_term_from_sexpr(s.list[i]));
    } else if (h == "omega-node") {
        if (nargs != 1) throw Error("tree term: omega-node takes one argument");
        t.kind = TreeTerm::Kind::omega_node;
        t.kids.push_back(tree_term_from_sexpr(s.list[1]));
    } else if (h == "spine") {
        if (nargs != 1 && nargs != 2) throw Error("tree term: spine takes an order and an optional tree");
        t.kind = TreeTerm::Kind::spine;
        t.order = order_term_from_sexpr(s.list[1]);
        if (nargs == 2) t.kids.push_back(tree_term_from_sexpr(s.list[2]));
    } else if (h == "graded-fan") {
        if (nargs != 1 || (s.list[1].atom != "cn" && s.list[1].atom != "cnstar"))
            throw Error("tree term: graded-fan takes cn or cnstar");
        t.kind = TreeTerm::Kind::graded_fan;
        t.starred = s.list[1].atom == "cnstar";
    } else {
        throw Error("tree term: unknown constructor '" + h + "'");
    }
    return t;
}

inline TreeTerm parse_tree_term(const std::string& text) { return tree_term_from_sexpr(parse_sexpr(text)); }

/// Address of a subterm: argument positions from the top.
using TermPath = std::vector<std::size_t>;

inline std::string path_str(const TermPath& p) {
    std::string s = "$";
    for (auto i : p) s += "." + std::to_string(i);
    return s;
}

inline const TreeTerm& subterm(const TreeTerm& t, const TermPath& p) {
    const TreeTerm* cur = &t;
    for (auto i : p) {
        if (i >= cur->kids.size()) throw Error("subterm: path " + path_str(p) + " leaves the term");
        cur = &cur->kids[i];
    }
    return *cur;
}

struct Verdict {
    enum class Kind { tame, wild, embeds_binary };
    Kind kind = Kind::tame;
    std::size_t n_star = 0, k_star = 0;  // tame
    bool k_exact = true;                 // false: k_star is an upper bound
    int reason = 0;                      // wild: 1, 2 or 3
    TermPath witness;

    std::string name() const {
        switch (kind) {
        case Kind::tame: return "tame";
        case Kind::wild: return std::string("wild_") + (reason == 1 ? "i" : reason == 2 ? "ii" : "iii");
        case Kind::embeds_binary: return "embeds_binary";
        }
        return "";
    }
    bool same_verdict(const Verdict& o) const {
        if (kind != o.kind) return false;
        if (kind == Kind::tame) return n_star == o.n_star && k_star == o.k_star;
        if (kind == Kind::wild) return reason == o.reason;
        return true;
    }
};

namespace detail {

inline bool find_kind(const TreeTerm& t, TreeTerm::Kind k, TermPath& path) {
    if (t.kind == k) return true;
    for (std::size_t i = 0; i < t.kids.size(); ++i) {
        path.push_back(i);
        if (find_kind(t.kids[i], k, path)) return true;
        path.pop_back();
    }
    return false;
}

// Order terms bounding the branch types of t (a branch through a spine's
// hang runs along a prefix of the spine, bounded here by the whole spine).
struct BranchInfo {
    OrderTerm type;
    TermPath origin;  // the spine (or the tree) it comes from
};

inline void branch_types(const TreeTerm& t, TermPath& path, std::vector<BranchInfo>& out) {
    using K = TreeTerm::Kind;
    auto above = [&](const OrderTerm& base, const TreeTerm& kid, std::size_t idx) {
        std::vector<BranchInfo> sub;
        path.push_back(idx);
        branch_types(kid, path, sub);
        path.pop_back();
        for (auto& b : sub) out.push_back({OrderTerm::concat({base, b.type}), b.origin});
    };
    switch (t.kind) {
    case K::leaf: out.push_back({OrderTerm::fin(1), path}); return;
    case K::node:
        if (t.kids.empty()) out.push_back({OrderTerm::fin(1), path});
        for (std::size_t i = 0; i < t.kids.size(); ++i) above(OrderTerm::fin(1), t.kids[i], i);
        return;
    case K::omega_node: above(OrderTerm::fin(1), t.kids[0], 0); return;
    case K::spine:
        out.push_back({t.order, path});
        if (!t.kids.empty()) above(t.order, t.kids[0], 0);
        return;
    case K::graded_fan: out.push_back({OrderTerm::concat({OrderTerm::fin(1), OrderTerm::graded(t.starred)}), path}); return;
    case K::full_binary: out.push_back({OrderTerm::omega(OrderTerm::fin(1)), path}); return;
    }
}

// Largest number of ~1 classes above an initial segment: the number of
// successors of a node, or of minimal elements for the empty segment.
inline std::size_t class_bound(const TreeTerm& t) {
    using K = TreeTerm::Kind;
    switch (t.kind) {
    case K::leaf: return 1;
    case K::node: {
        std::size_t m = std::max<std::size_t>(1, t.kids.size());
        for (const auto& k : t.kids) m = std::max(m, class_bound(k));
        return m;
    }
    case K::spine: {
        const auto size = denotation_size(t.order);
        if (size == 0) return 0;
        // a spine point has its spine successor (if any) and the hang
        std::size_t m = t.kids.empty() || size == 1 ? 1 : 2;
        if (!t.kids.empty()) m = std::max(m, class_bound(t.kids[0]));
        return m;
    }
    case K::full_binary: return 2;
    default: return npos;  // infinitely many
    }
}

}  // namespace detail

inline Verdict classify(const TreeTerm& t) {
    Verdict v;
    TermPath p;
    if (detail::find_kind(t, TreeTerm::Kind::full_binary, p)) {
        v.kind = Verdict::Kind::embeds_binary;
        v.witness = p;
        return v;
    }
    v.kind = Verdict::Kind::wild;
    for (auto k : {TreeTerm::Kind::omega_node, TreeTerm::Kind::graded_fan}) {
        p.clear();
        if (detail::find_kind(t, k, p)) {
            v.reason = 1;
            v.witness = p;
            return v;
        }
    }
    std::vector<detail::BranchInfo> branches;
    p.clear();
    detail::branch_types(t, p, branches);
    for (const auto& b : branches)
        if (hdeg(b.type).kind == HdegTag::Kind::not_scattered) {
            v.reason = 2;
            v.witness = b.origin;
            return v;
        }
    for (const auto& b : branches)
        if (hdeg(b.type).kind == HdegTag::Kind::infinite) {
            v.reason = 3;
            v.witness = b.origin;
            return v;
        }
    v.kind = Verdict::Kind::tame;
    v.n_star = detail::class_bound(t);
    for (const auto& b : branches) {
        auto h = hdeg(b.type);
        if (h.value > v.k_star || (h.value == v.k_star && !h.exact)) {
            v.k_star = h.value;
            v.k_exact = h.exact;
        }
    }
    return v;
}

/// Finite truncation: omega many successors become `width`, infinite
/// spines are realized with `budget` points, the full binary tree gets
/// height `width`.
inline FinStructure realize_tree(const TreeTerm& t, std::size_t width, std::size_t budget) {
    std::vector<std::string> ids;
    std::vector<std::size_t> parent;
    std::function<void(const TreeTerm&, std::size_t, const std::string&)> build = [&](const TreeTerm& x, std::size_t par,
                                                                                     const std::string& pre) {
        auto add = [&](const std::string& id, std::size_t p) {
            ids.push_back(id);
            parent.push_back(p);
            return ids.size() - 1;
        };
        using K = TreeTerm::Kind;
        switch (x.kind) {
        case K::leaf: add(pre, par); return;
        case K::node: {
            auto r = add(pre, par);
            for (std::size_t i = 0; i < x.kids.size(); ++i) build(x.kids[i], r, pre + "." + std::to_string(i));
            return;
        }
        case K::omega_node: {
            auto r = add(pre, par);
            for (std::size_t i = 0; i < width; ++i) build(x.kids[0], r, pre + "." + std::to_string(i));
            return;
        }
        case K::spine: {
            auto c = realize_prefix(x.order, budget).chain;
            std::size_t prev = par;
            for (auto e : c.chain_order()) {
                auto id = pre + ":" + c.id(e);
                auto node = add(id, prev);
                if (!x.kids.empty()) build(x.kids[0], node, id + "+");
                prev = node;
            }
            return;
        }
        case K::graded_fan: {
            auto r = add(pre, par);
            for (std::size_t i = 0; i < width; ++i) {
                TreeTerm s;
                s.kind = K::spine;
                s.order = catalog_term(i + 1, x.starred);
                build(s, r, pre + "." + std::to_string(i));
            }
            return;
        }
        case K::full_binary: {
            std::function<void(std::size_t, std::size_t, const std::string&)> bin = [&](std::size_t h, std::size_t p,
                                                                                        const std::string& id) {
                auto n = add(id, p);
                if (h == 0) return;
                bin(h - 1, n, id + "0");
                bin(h - 1, n, id + "1");
            };
            bin(width, par, pre + "b");
            return;
        }
        }
    };
    build(t, npos, "t");
    return FinStructure::make_tree_indexed(ids, parent);
}

inline json verdict_to_json(const Verdict& v) {
    json j{{"verdict", v.name()}};
    if (v.kind == Verdict::Kind::tame) {
        j["n_star"] = v.n_star;
        j["k_star"] = v.k_star;
        if (!v.k_exact) j["k_star_is_upper_bound"] = true;
    } else {
        j["witness"] = path_str(v.witness);
    }
    return j;
}

}  // namespace msow
