#pragma once

// Definable well orders of finite scattered chains and of finite trees.
//
// Chains come with a nested-sum presentation; the synthesized order is
// determined by n-1 parameter sets (alternate blocks at each level) and one
// direction bit per level. Trees are split into sub-branches indexed by a
// well-founded tree Gamma; the order is determined by a colouring of the
// sub-branches, a set of representatives and (for forests) root markers.
// Both evaluators read only the structure and the parameter sets.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "msow/io.hpp"

namespace msow {

// ---------------------------------------------------------------------------
// Ranks

/// rk(x) = max(rank of any successor, 1 + second largest successor rank);
/// 0 on leaves.
inline std::vector<std::size_t> rank_map(const FinStructure& t) {
    if (t.kind() != Kind::tree) throw Error("rank_map: not a tree");
    std::vector<std::size_t> order(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return t.depth(a) > t.depth(b); });
    std::vector<std::size_t> rk(t.size(), 0);
    for (auto x : order) {
        const auto& ch = t.children(x);
        if (ch.empty()) continue;
        if (ch.size() == 1) {
            rk[x] = rk[ch[0]];
            continue;
        }
        std::vector<std::size_t> rs;
        for (auto c : ch) rs.push_back(rk[c]);
        std::sort(rs.rbegin(), rs.rend());
        rk[x] = std::max(rs[0], rs[1] + 1);
    }
    return rk;
}

// ---------------------------------------------------------------------------
// Certificates

struct NamedSet {
    std::string name;
    std::vector<std::string> members;
};

struct WellOrderCertificate {
    std::string scheme;  // "chain" or "tree"
    std::vector<NamedSet> params;
    std::vector<bool> directions;  // chain: level 1 (innermost) first; true = ascending
    json transcript;

    const NamedSet* param(const std::string& name) const {
        for (const auto& p : params)
            if (p.name == name) return &p;
        return nullptr;
    }
};

inline json certificate_to_json(const WellOrderCertificate& c) {
    json j;
    j["scheme"] = c.scheme;
    j["parameters"] = json::array();
    for (const auto& p : c.params) j["parameters"].push_back({{"name", p.name}, {"members", p.members}});
    j["directions"] = json::array();
    for (bool d : c.directions) j["directions"].push_back(d ? "asc" : "desc");
    j["transcript"] = c.transcript;
    return j;
}

inline WellOrderCertificate certificate_from_json(const json& j) {
    detail::only_fields(j, {"scheme", "parameters", "directions", "transcript"}, "certificate");
    WellOrderCertificate c;
    if (!j.contains("scheme") || !j["scheme"].is_string()) throw Error("certificate: missing \"scheme\"");
    c.scheme = j["scheme"].get<std::string>();
    if (c.scheme != "chain" && c.scheme != "tree") throw Error("certificate: unknown scheme '" + c.scheme + "'");
    for (const auto& p : j.value("parameters", json::array())) {
        detail::only_fields(p, {"name", "members"}, "certificate parameter");
        c.params.push_back({p.at("name").get<std::string>(), detail::string_list(p.at("members"), "parameter members")});
    }
    for (const auto& d : j.value("directions", json::array())) {
        if (d != "asc" && d != "desc") throw Error("certificate: direction must be \"asc\" or \"desc\"");
        c.directions.push_back(d == "asc");
    }
    c.transcript = j.value("transcript", json::object());
    return c;
}

struct VerifyReport {
    bool accepted = true;
    std::vector<std::string> violations;

    void fail(std::string v) {
        accepted = false;
        violations.push_back(std::move(v));
    }
};

namespace detail {

inline void check_strict_total(const FinStructure& s, const std::function<bool(std::size_t, std::size_t)>& lt,
                               VerifyReport& rep) {
    const std::size_t n = s.size();
    for (std::size_t x = 0; x < n; ++x) {
        if (lt(x, x)) rep.fail("order is not irreflexive at " + s.id(x));
        for (std::size_t y = 0; y < n; ++y) {
            if (x == y) continue;
            const bool a = lt(x, y), b = lt(y, x);
            if (a && b) rep.fail("order is not antisymmetric on " + s.id(x) + ", " + s.id(y));
            if (!a && !b && x < y) rep.fail("order does not compare " + s.id(x) + " and " + s.id(y));
            if (!a) continue;
            for (std::size_t z = 0; z < n; ++z)
                if (lt(y, z) && !lt(x, z) && z != x)
                    rep.fail("order is not transitive on " + s.id(x) + " < " + s.id(y) + " < " + s.id(z));
        }
        if (rep.violations.size() > 20) return;
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Chains presented as nested sums

/// A nested-sum presentation: either a block of element ids (depth 1) or a
/// list of sub-presentations (one level deeper), with the direction of its
/// index set. JSON: {"direction": "asc"|"desc", "parts": [ids...] | [presentations...]}.
struct Presentation {
    bool ascending = true;
    std::vector<std::string> ids;
    std::vector<Presentation> parts;

    std::size_t depth() const { return parts.empty() ? 1 : 1 + parts.front().depth(); }
    void flatten(std::vector<std::string>& out) const {
        out.insert(out.end(), ids.begin(), ids.end());
        for (const auto& p : parts) p.flatten(out);
    }
};

inline Presentation presentation_from_json(const json& j) {
    detail::only_fields(j, {"direction", "parts"}, "presentation");
    Presentation p;
    const auto d = j.value("direction", std::string("asc"));
    if (d != "asc" && d != "desc") throw Error("presentation: direction must be \"asc\" or \"desc\"");
    p.ascending = d == "asc";
    if (!j.contains("parts") || !j["parts"].is_array() || j["parts"].empty())
        throw Error("presentation: \"parts\" must be a non-empty array");
    const bool leaf = j["parts"].front().is_string();
    for (const auto& x : j["parts"]) {
        if (x.is_string() != leaf) throw Error("presentation: a level mixes ids and blocks");
        if (leaf)
            p.ids.push_back(x.get<std::string>());
        else
            p.parts.push_back(presentation_from_json(x));
    }
    return p;
}

inline json presentation_to_json(const Presentation& p) {
    json j{{"direction", p.ascending ? "asc" : "desc"}};
    j["parts"] = json::array();
    for (const auto& id : p.ids) j["parts"].push_back(id);
    for (const auto& q : p.parts) j["parts"].push_back(presentation_to_json(q));
    return j;
}

namespace detail {

// Depth and per-level direction must be uniform; directions[k] is the bit of
// level k+1 (level 1 = blocks of ids).
inline void collect_directions(const Presentation& p, std::vector<std::optional<bool>>& dirs) {
    const std::size_t lev = p.depth();
    if (dirs.size() < lev) dirs.resize(lev);
    auto& d = dirs[lev - 1];
    if (d && *d != p.ascending)
        throw Error("presentation: level " + std::to_string(lev) + " mixes directions; one direction per level is required");
    d = p.ascending;
    for (const auto& q : p.parts) {
        if (q.depth() != lev - 1) throw Error("presentation: blocks of one level must have equal nesting depth");
        collect_directions(q, dirs);
    }
}

// Path of indices from the top, used by the lexicographic reference order.
inline void index_paths(const Presentation& p, std::vector<std::size_t>& prefix,
                        std::map<std::string, std::vector<std::size_t>>& out) {
    for (std::size_t i = 0; i < p.ids.size(); ++i) {
        prefix.push_back(i);
        out[p.ids[i]] = prefix;
        prefix.pop_back();
    }
    for (std::size_t i = 0; i < p.parts.size(); ++i) {
        prefix.push_back(i);
        index_paths(p.parts[i], prefix, out);
        prefix.pop_back();
    }
}

// Members of P_k: union over level-(k+1) presentations of their even blocks.
inline void even_blocks(const Presentation& p, std::size_t k, std::vector<std::string>& out) {
    if (p.depth() == k + 1) {
        for (std::size_t i = 0; i < p.parts.size(); i += 2) p.parts[i].flatten(out);
        return;
    }
    for (const auto& q : p.parts) even_blocks(q, k, out);
}

}  // namespace detail

/// Certificate for a chain given by a nested-sum presentation of depth n.
inline WellOrderCertificate synth_chain_wellorder(const FinStructure& c, const Presentation& p, std::size_t n) {
    if (c.kind() != Kind::chain) throw Error("synth_chain_wellorder: not a chain");
    if (p.depth() != n)
        throw Error("synth_chain_wellorder: presentation has nesting depth " + std::to_string(p.depth()) + ", declared " +
                    std::to_string(n));
    std::vector<std::string> flat;
    p.flatten(flat);
    std::vector<std::string> order;
    for (auto e : c.chain_order()) order.push_back(c.id(e));
    if (flat != order) throw Error("synth_chain_wellorder: presentation does not list the chain in order");
    std::vector<std::optional<bool>> dirs;
    detail::collect_directions(p, dirs);
    WellOrderCertificate cert;
    cert.scheme = "chain";
    for (auto d : dirs) cert.directions.push_back(*d);
    for (std::size_t k = 1; k < n; ++k) {
        NamedSet ps{"P" + std::to_string(k), {}};
        detail::even_blocks(p, k, ps.members);
        std::sort(ps.members.begin(), ps.members.end());
        cert.params.push_back(std::move(ps));
    }
    cert.transcript = {{"presentation", presentation_to_json(p)}, {"degree", n}};
    return cert;
}

/// The synthesized order on a chain, as a comparison on element indices.
/// Two elements in different blocks at level k (the maximal convex runs of
/// constant P_{k-1} membership inside the current class) compare by chain
/// order, reversed when level k is descending; otherwise descend a level.
class ChainOrderEvaluator {
public:
    ChainOrderEvaluator(const FinStructure& c, const WellOrderCertificate& cert) : c_(c), dirs_(cert.directions) {
        if (cert.scheme != "chain") throw Error("chain evaluator: certificate scheme is '" + cert.scheme + "'");
        const std::size_t n = dirs_.size();
        if (n == 0) throw Error("chain evaluator: no direction bits");
        if (cert.params.size() != n - 1)
            throw Error("chain evaluator: expected " + std::to_string(n - 1) + " parameter sets, found " +
                        std::to_string(cert.params.size()));
        for (std::size_t k = 1; k < n; ++k) {
            auto ps = cert.param("P" + std::to_string(k));
            if (!ps) throw Error("chain evaluator: missing parameter P" + std::to_string(k));
            p_.push_back(subset_from_ids(c, ps->members, "parameter P" + std::to_string(k)));
        }
    }

    bool less(std::size_t x, std::size_t y) const {
        if (x == y) return false;
        std::size_t lo = 0, hi = c_.size();  // current class: positions [lo, hi)
        const auto px = c_.position(x), py = c_.position(y);
        for (std::size_t lev = dirs_.size(); lev >= 1; --lev) {
            if (lev > 1) {
                // run of constant P_{lev-1} membership around x inside [lo, hi)
                const auto& p = p_[lev - 2];
                const bool bx = p[x];
                std::size_t a = px, b = px + 1;
                while (a > lo && p[c_.chain_order()[a - 1]] == bx) --a;
                while (b < hi && p[c_.chain_order()[b]] == bx) ++b;
                if (py >= a && py < b) {
                    lo = a;
                    hi = b;
                    continue;
                }
            }
            return dirs_[lev - 1] ? px < py : px > py;
        }
        return false;
    }

    /// All elements sorted by the synthesized order.
    std::vector<std::size_t> sorted() const {
        std::vector<std::size_t> v(c_.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
        std::sort(v.begin(), v.end(), [&](auto a, auto b) { return less(a, b); });
        return v;
    }

private:
    const FinStructure& c_;
    std::vector<bool> dirs_;
    std::vector<Subset> p_;
};

/// Lexicographic order read off a presentation: index paths compared level
/// by level, reversed on descending levels.
inline std::vector<std::string> presentation_reference_order(const Presentation& p) {
    std::map<std::string, std::vector<std::size_t>> paths;
    std::vector<std::size_t> prefix;
    detail::index_paths(p, prefix, paths);
    std::vector<std::optional<bool>> dirs;
    detail::collect_directions(p, dirs);
    const std::size_t n = dirs.size();
    std::vector<std::string> ids;
    for (const auto& [id, path] : paths) ids.push_back(id);
    std::sort(ids.begin(), ids.end(), [&](const auto& a, const auto& b) {
        const auto &pa = paths[a], &pb = paths[b];
        for (std::size_t i = 0; i < pa.size(); ++i)
            if (pa[i] != pb[i]) return *dirs[n - 1 - i] ? pa[i] < pb[i] : pa[i] > pb[i];
        return false;
    });
    return ids;
}

inline VerifyReport verify_chain_certificate(const FinStructure& c, const WellOrderCertificate& cert) {
    VerifyReport rep;
    std::optional<ChainOrderEvaluator> ev;
    try {
        ev.emplace(c, cert);
    } catch (const Error& e) {
        rep.fail(e.what());
        return rep;
    }
    detail::check_strict_total(c, [&](auto x, auto y) { return ev->less(x, y); }, rep);
    if (cert.transcript.contains("presentation")) {
        auto p = presentation_from_json(cert.transcript["presentation"]);
        if (p.depth() != cert.directions.size()) rep.fail("presentation depth differs from the number of direction bits");
        // innermost blocks must be ordered in their own direction
        std::function<void(const Presentation&)> walk = [&](const Presentation& q) {
            for (std::size_t i = 0; i + 1 < q.ids.size(); ++i) {
                auto a = c.find(q.ids[i]), b = c.find(q.ids[i + 1]);
                if (a == npos || b == npos) {
                    rep.fail("presentation references unknown element");
                    return;
                }
                if (ev->less(a, b) != q.ascending)
                    rep.fail("block order of " + q.ids[i] + ", " + q.ids[i + 1] + " disagrees with its direction");
            }
            for (const auto& r : q.parts) walk(r);
        };
        walk(p);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Finite trees

struct GammaNode {
    std::vector<std::size_t> index;   // position in Gamma
    std::size_t parent = npos;        // Gamma parent (node number)
    std::vector<std::size_t> tree;    // T_eta
    std::vector<std::size_t> branch;  // A_eta, bottom to top
    std::size_t attach = npos;        // element of the parent's branch below T_eta (npos: none)
    std::size_t gamma = 0;            // largest rank in T_eta
    std::size_t color = 0;
    std::size_t rep = npos;           // s_eta
};

struct TreeSynthesis {
    std::vector<GammaNode> gamma;  // parents before children
    std::vector<std::size_t> rank;
    WellOrderCertificate cert;
};

namespace detail {

// Greedy branch of the subtree `dom` (upward closed): start at a minimal
// element of largest rank and keep moving to a successor of largest rank
// (ties: smallest index).
inline std::vector<std::size_t> greedy_branch(const FinStructure& t, const std::vector<std::size_t>& dom,
                                              const std::vector<std::size_t>& rk) {
    std::vector<bool> in(t.size(), false);
    for (auto x : dom) in[x] = true;
    std::size_t cur = npos;
    for (auto x : dom)
        if ((t.parent(x) == npos || !in[t.parent(x)]) && (cur == npos || rk[x] > rk[cur])) cur = x;
    std::vector<std::size_t> b;
    while (cur != npos) {
        b.push_back(cur);
        std::size_t next = npos;
        for (auto c : t.children(cur))
            if (in[c] && (next == npos || rk[c] > rk[next])) next = c;
        cur = next;
    }
    return b;
}

inline json ids_json(const FinStructure& t, const std::vector<std::size_t>& xs) {
    json a = json::array();
    for (auto x : xs) a.push_back(t.id(x));
    return a;
}

}  // namespace detail

/// Build Gamma, the branches, representatives and colouring for a finite
/// tree (or forest) and package them as a certificate.
inline TreeSynthesis synth_tree_wellorder(const FinStructure& t) {
    if (t.kind() != Kind::tree) throw Error("synth_tree_wellorder: not a tree");
    TreeSynthesis s;
    s.rank = rank_map(t);
    s.cert.scheme = "tree";
    if (t.size() == 0) {
        s.cert.transcript = {{"gamma", json::array()}};
        return s;
    }
    std::vector<std::size_t> all(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) all[i] = i;
    GammaNode root;
    root.tree = all;
    root.gamma = *std::max_element(s.rank.begin(), s.rank.end());
    s.gamma.push_back(root);
    for (std::size_t g = 0; g < s.gamma.size(); ++g) {
        auto& node = s.gamma[g];
        node.branch = detail::greedy_branch(t, node.tree, s.rank);
        // every element of largest rank in T_eta must lie on the branch (the
        // top node of a forest is exempt: its components each have one)
        std::set<std::size_t> on(node.branch.begin(), node.branch.end());
        for (auto x : node.tree)
            if (g > 0 && s.rank[x] == node.gamma && !on.count(x))
                throw Error("synth_tree_wellorder: branch misses an element of largest rank (" + t.id(x) + ")");
        node.rep = node.branch.front();
        auto classes = tilde1_classes(t, node.tree, node.branch);
        const auto index = node.index;
        const auto branch = node.branch;
        for (std::size_t i = 0; i < classes.size(); ++i) {
            GammaNode child;
            child.index = index;
            child.index.push_back(i);
            child.parent = g;
            child.tree = classes[i];
            child.gamma = 0;
            for (auto x : classes[i]) child.gamma = std::max(child.gamma, s.rank[x]);
            // attachment: highest branch element below the class
            for (auto b : branch)
                if (t.lt(b, classes[i].front())) child.attach = b;
            s.gamma.push_back(std::move(child));  // invalidates `node`
        }
    }
    // colours: distinct from the parent and from siblings attached at the same point
    for (std::size_t g = 1; g < s.gamma.size(); ++g) {
        std::set<std::size_t> used{s.gamma[s.gamma[g].parent].color};
        for (std::size_t h = 1; h < g; ++h)
            if (s.gamma[h].parent == s.gamma[g].parent && s.gamma[h].attach == s.gamma[g].attach) used.insert(s.gamma[h].color);
        std::size_t c = 0;
        while (used.count(c)) ++c;
        s.gamma[g].color = c;
    }
    std::size_t ncolors = 0;
    for (const auto& g : s.gamma) ncolors = std::max(ncolors, g.color + 1);
    for (std::size_t c = 0; c < ncolors; ++c) {
        NamedSet d{"D" + std::to_string(c), {}};
        for (const auto& g : s.gamma)
            if (g.color == c)
                for (auto x : g.branch) d.members.push_back(t.id(x));
        std::sort(d.members.begin(), d.members.end());
        s.cert.params.push_back(std::move(d));
    }
    NamedSet q{"Q", {}}, r{"R", {}};
    for (const auto& g : s.gamma) {
        q.members.push_back(t.id(g.rep));
        if (g.parent != npos && g.attach == npos) r.members.push_back(t.id(g.branch.front()));
    }
    std::sort(q.members.begin(), q.members.end());
    std::sort(r.members.begin(), r.members.end());
    s.cert.params.push_back(q);
    s.cert.params.push_back(r);
    json gam = json::array();
    for (const auto& g : s.gamma) {
        json e;
        e["index"] = g.index;
        e["parent"] = g.parent == npos ? json(nullptr) : json(g.parent);
        e["branch"] = detail::ids_json(t, g.branch);
        e["attach"] = g.attach == npos ? json(nullptr) : json(t.id(g.attach));
        e["gamma"] = g.gamma;
        e["color"] = g.color;
        e["representative"] = t.id(g.rep);
        gam.push_back(e);
    }
    s.cert.transcript = {{"gamma", gam}};
    return s;
}

/// The tree order recovered from D_i (colours), Q (representatives) and R
/// (roots of components other than the main one).
class TreeOrderEvaluator {
public:
    struct Block {
        std::vector<std::size_t> elems;  // bottom to top
        std::size_t parent = npos;       // Gamma parent block
        std::size_t attach = npos;
        std::size_t color = 0;
        std::size_t depth = 0;           // in Gamma
    };

    TreeOrderEvaluator(const FinStructure& t, const WellOrderCertificate& cert, VerifyReport& rep) : t_(t) {
        if (cert.scheme != "tree") throw Error("tree evaluator: certificate scheme is '" + cert.scheme + "'");
        const std::size_t n = t.size();
        color_.assign(n, npos);
        for (const auto& p : cert.params) {
            if (p.name.size() < 2 || p.name[0] != 'D') continue;
            if (p.name.find_first_not_of("0123456789", 1) != std::string::npos) continue;
            const std::size_t c = std::stoul(p.name.substr(1));
            for (auto x : members_of(subset_from_ids(t, p.members, "parameter " + p.name))) {
                if (color_[x] != npos) rep.fail(t.id(x) + " has two colours");
                color_[x] = c;
            }
        }
        for (std::size_t x = 0; x < n; ++x)
            if (color_[x] == npos) rep.fail(t.id(x) + " has no colour");
        auto qs = cert.param("Q");
        auto rs = cert.param("R");
        Subset q = qs ? subset_from_ids(t, qs->members, "parameter Q") : Subset(n, false);
        Subset r = rs ? subset_from_ids(t, rs->members, "parameter R") : Subset(n, false);
        if (!rep.accepted) return;

        // blocks: maximal constant-colour paths
        block_.assign(n, npos);
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return t.depth(a) < t.depth(b); });
        for (auto x : order) {
            if (block_[x] != npos) continue;
            const auto p = t.parent(x);
            if (p != npos && color_[p] == color_[x]) {
                rep.fail("sub-branch of colour d" + std::to_string(color_[x]) + " forks at " + t.id(p));
                continue;
            }
            Block b;
            b.color = color_[x];
            std::size_t cur = x;
            while (cur != npos) {
                block_[cur] = blocks_.size();
                b.elems.push_back(cur);
                std::size_t next = npos;
                for (auto c : t.children(cur))
                    if (color_[c] == color_[cur]) {
                        if (next != npos) rep.fail("sub-branch of colour d" + std::to_string(b.color) + " forks at " + t.id(cur));
                        next = c;
                    }
                cur = next;
            }
            blocks_.push_back(std::move(b));
        }
        if (!rep.accepted) return;
        // representatives
        rep_.assign(blocks_.size(), npos);
        for (std::size_t x = 0; x < n; ++x)
            if (q[x]) {
                auto& s = rep_[block_[x]];
                if (s != npos) rep.fail("sub-branch at " + t.id(blocks_[block_[x]].elems.front()) + " has two representatives");
                s = x;
            }
        for (std::size_t b = 0; b < blocks_.size(); ++b)
            if (rep_[b] == npos) rep.fail("sub-branch at " + t.id(blocks_[b].elems.front()) + " has no representative");
        // Gamma structure
        root_ = npos;
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            const auto bottom = blocks_[b].elems.front();
            const auto p = t.parent(bottom);
            if (p != npos) {
                blocks_[b].parent = block_[p];
                blocks_[b].attach = p;
            } else if (!r[bottom]) {
                if (root_ != npos) rep.fail("two unmarked components (" + t.id(blocks_[root_].elems.front()) + ", " + t.id(bottom) + ")");
                root_ = b;
            }
        }
        if (root_ == npos && !blocks_.empty()) rep.fail("every component is marked; no main sub-branch");
        if (!rep.accepted) return;
        for (std::size_t b = 0; b < blocks_.size(); ++b)
            if (blocks_[b].parent == npos && b != root_) blocks_[b].parent = root_;
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            std::size_t d = 0;
            for (auto cur = b; cur != root_; cur = blocks_[cur].parent) {
                if (++d > blocks_.size()) {
                    rep.fail("sub-branch index tree has a cycle");
                    return;
                }
            }
            blocks_[b].depth = d;
        }
        // siblings attached at one point must have distinct colours
        std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t> seen;
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            if (b == root_) continue;
            auto key = std::make_tuple(blocks_[b].parent, blocks_[b].attach, blocks_[b].color);
            auto [it, fresh] = seen.emplace(key, b);
            if (!fresh)
                rep.fail("sub-branches at " + t.id(blocks_[it->second].elems.front()) + " and " + t.id(blocks_[b].elems.front()) +
                         " leave " + (blocks_[b].attach == npos ? std::string("the main branch below its root")
                                                                : "the branch at " + t.id(blocks_[b].attach)) +
                         " with the same colour d" + std::to_string(blocks_[b].color));
        }
    }

    const std::vector<Block>& blocks() const { return blocks_; }
    std::size_t block_of(std::size_t x) const { return block_[x]; }
    std::size_t root() const { return root_; }

    bool less(std::size_t x, std::size_t y) const {
        if (x == y) return false;
        std::size_t bx = block_[x], by = block_[y];
        if (bx == by) return t_.depth(x) < t_.depth(y);  // clause (a)
        auto path = [&](std::size_t b) {
            std::vector<std::size_t> p;
            for (; b != npos; b = blocks_[b].parent) p.push_back(b);
            std::reverse(p.begin(), p.end());
            return p;
        };
        auto px = path(bx), py = path(by);
        std::size_t i = 0;
        while (i < px.size() && i < py.size() && px[i] == py[i]) ++i;
        if (i == px.size()) return true;   // clause (b): bx below by in Gamma
        if (i == py.size()) return false;
        return succ_key(px[i]) < succ_key(py[i]);  // clause (c)
    }

    /// Order of the successors of a sub-branch: by attachment point along
    /// the branch (none first), then by colour.
    std::pair<long long, std::size_t> succ_key(std::size_t b) const {
        const auto a = blocks_[b].attach;
        return {a == npos ? -1 : static_cast<long long>(t_.depth(a)), blocks_[b].color};
    }

private:
    const FinStructure& t_;
    std::vector<std::size_t> color_, block_, rep_;
    std::vector<Block> blocks_;
    std::size_t root_ = npos;
};

inline VerifyReport verify_tree_certificate(const FinStructure& t, const WellOrderCertificate& cert) {
    VerifyReport rep;
    if (t.kind() != Kind::tree) {
        rep.fail("structure is not a tree");
        return rep;
    }
    if (t.size() == 0) return rep;
    std::optional<TreeOrderEvaluator> ev;
    try {
        ev.emplace(t, cert, rep);
    } catch (const Error& e) {
        rep.fail(e.what());
        return rep;
    }
    if (!rep.accepted) return rep;
    auto lt = [&](std::size_t x, std::size_t y) { return ev->less(x, y); };
    detail::check_strict_total(t, lt, rep);
    const auto& blocks = ev->blocks();
    // each block is a convex interval, and comes before everything above it in Gamma
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& el = blocks[b].elems;
        for (std::size_t y = 0; y < t.size(); ++y) {
            if (ev->block_of(y) == b) continue;
            bool below = false, above = false;
            for (auto x : el) (lt(x, y) ? below : above) = true;
            if (below && above) rep.fail("sub-branch at " + t.id(el.front()) + " is not convex (split by " + t.id(y) + ")");
        }
    }
    // transcript consistency
    if (cert.transcript.contains("gamma")) {
        const auto& gam = cert.transcript["gamma"];
        if (gam.size() != blocks.size())
            rep.fail("transcript lists " + std::to_string(gam.size()) + " sub-branches, the colouring gives " +
                     std::to_string(blocks.size()));
        for (const auto& g : gam) {
            auto ids = detail::string_list(g.at("branch"), "transcript branch");
            std::vector<std::size_t> xs;
            for (const auto& id : ids) xs.push_back(t.index_of(id));
            if (xs.empty()) {
                rep.fail("transcript has an empty branch");
                continue;
            }
            const auto b = ev->block_of(xs.front());
            if (blocks[b].elems != xs) rep.fail("transcript branch at " + ids.front() + " differs from the colour-defined sub-branch");
            if (g.at("color").get<std::size_t>() != blocks[b].color)
                rep.fail("transcript colour of the branch at " + ids.front() + " differs from its parameter colour");
        }
    }
    return rep;
}

/// Deterministic damaged copies of a synthesized tree certificate, each of
/// which a correct verifier must reject.
struct Mutation {
    std::string description;
    WellOrderCertificate cert;
};

inline std::vector<Mutation> certificate_mutations(const FinStructure& t, const TreeSynthesis& s) {
    std::vector<Mutation> out;
    if (s.gamma.empty()) return out;
    std::vector<std::size_t> color(t.size(), 0);
    for (const auto& g : s.gamma)
        for (auto x : g.branch) color[x] = g.color;
    auto with_colors = [&](const std::vector<std::size_t>& col) {
        WellOrderCertificate c = s.cert;
        std::vector<NamedSet> ps;
        std::size_t nc = *std::max_element(col.begin(), col.end()) + 1;
        for (std::size_t k = 0; k < nc; ++k) {
            NamedSet d{"D" + std::to_string(k), {}};
            for (std::size_t x = 0; x < t.size(); ++x)
                if (col[x] == k) d.members.push_back(t.id(x));
            ps.push_back(d);
        }
        for (const auto& p : c.params)
            if (p.name[0] != 'D') ps.push_back(p);
        c.params = ps;
        return c;
    };
    auto edit_param = [&](const std::string& name, const std::function<void(std::vector<std::string>&)>& f) {
        WellOrderCertificate c = s.cert;
        for (auto& p : c.params)
            if (p.name == name) f(p.members);
        return c;
    };
    for (std::size_t g = 1; g < s.gamma.size(); ++g) {
        const auto& node = s.gamma[g];
        const auto& par = s.gamma[node.parent];
        const std::string at = t.id(node.branch.front());
        if (node.attach != npos) {
            auto col = color;
            for (auto x : node.branch) col[x] = par.color;
            out.push_back({"sub-branch at " + at + " recoloured like its parent", with_colors(col)});
        }
        for (std::size_t h = 1; h < g; ++h)
            if (s.gamma[h].parent == node.parent && s.gamma[h].attach == node.attach) {
                auto col = color;
                for (auto x : node.branch) col[x] = s.gamma[h].color;
                out.push_back({"sub-branch at " + at + " recoloured like its sibling at " + t.id(s.gamma[h].branch.front()),
                               with_colors(col)});
                auto swapped = color;
                for (auto x : node.branch) swapped[x] = s.gamma[h].color;
                for (auto x : s.gamma[h].branch) swapped[x] = node.color;
                out.push_back({"colours of sibling sub-branches at " + at + " and " + t.id(s.gamma[h].branch.front()) + " swapped",
                               with_colors(swapped)});
            }
    }
    for (const auto& node : s.gamma) {
        const std::string rid = t.id(node.rep);
        out.push_back({"representative " + rid + " removed", edit_param("Q", [&](auto& m) {
                           m.erase(std::remove(m.begin(), m.end(), rid), m.end());
                       })});
        if (node.branch.size() >= 2) {
            const std::string extra = t.id(node.branch.back());
            out.push_back({"second representative " + extra + " added", edit_param("Q", [&](auto& m) { m.push_back(extra); })});
            WellOrderCertificate c = s.cert;
            for (auto& g : c.transcript["gamma"])
                if (g["representative"] == rid) g["branch"].erase(g["branch"].size() - 1);
            out.push_back({"transcript branch at " + t.id(node.branch.front()) + " truncated", c});
        }
    }
    return out;
}

inline VerifyReport verify_certificate(const FinStructure& s, const WellOrderCertificate& cert) {
    if (cert.scheme == "chain") return verify_chain_certificate(s, cert);
    if (cert.scheme == "tree") return verify_tree_certificate(s, cert);
    VerifyReport rep;
    rep.fail("unknown scheme '" + cert.scheme + "'");
    return rep;
}

}  // namespace msow
