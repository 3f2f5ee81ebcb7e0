#pragma once

// Finite chains, trees and pure sets carrying a tuple of named subsets, plus
// the structural decompositions consumed by the composition checks.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace msow {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

enum class Kind { chain, tree, set };

inline const char* kind_name(Kind k) {
    switch (k) {
    case Kind::chain: return "chain";
    case Kind::tree: return "tree";
    case Kind::set: return "set";
    }
    return "?";
}

inline Kind parse_kind(const std::string& s) {
    if (s == "chain") return Kind::chain;
    if (s == "tree") return Kind::tree;
    if (s == "set") return Kind::set;
    throw Error("unknown structure kind '" + s + "'");
}

/// A subset of a structure's elements, indexed by canonical element index.
using Subset = std::vector<bool>;

struct Predicate {
    std::string name;
    Subset members;

    bool operator==(const Predicate&) const = default;
};

/// Finite chain, tree or pure set. Elements are opaque string ids kept in
/// lexicographic order; all relations are stored against those indices.
class FinStructure {
public:
    FinStructure() = default;

    static FinStructure make_set(std::vector<std::string> ids) {
        FinStructure s;
        s.kind_ = Kind::set;
        s.init_ids(std::move(ids));
        s.finish();
        return s;
    }

    /// `order` lists the ids from smallest to largest.
    static FinStructure make_chain(const std::vector<std::string>& order) {
        FinStructure s;
        s.kind_ = Kind::chain;
        s.init_ids(order);
        s.position_.assign(s.size(), 0);
        for (std::size_t r = 0; r < order.size(); ++r) s.position_[s.index_of(order[r])] = r;
        s.finish();
        return s;
    }

    /// Chain from explicit ranks; ranks must be pairwise distinct.
    static FinStructure make_chain_ranked(const std::map<std::string, long long>& ranks) {
        std::vector<std::pair<long long, std::string>> v;
        for (const auto& [id, r] : ranks) v.emplace_back(r, id);
        std::sort(v.begin(), v.end());
        for (std::size_t i = 1; i < v.size(); ++i)
            if (v[i].first == v[i - 1].first)
                throw Error("chain ranks must be distinct ('" + v[i - 1].second + "', '" + v[i].second + "')");
        std::vector<std::string> order;
        for (auto& p : v) order.push_back(p.second);
        return make_chain(order);
    }

    /// `parent` maps child id to parent id; roots are absent from the map.
    static FinStructure make_tree(std::vector<std::string> ids, const std::map<std::string, std::string>& parent) {
        FinStructure s;
        s.kind_ = Kind::tree;
        s.init_ids(std::move(ids));
        s.parent_.assign(s.size(), npos);
        for (const auto& [c, p] : parent) {
            auto ci = s.find(c), pi = s.find(p);
            if (ci == npos) throw Error("parent map references unknown element '" + c + "'");
            if (pi == npos) throw Error("parent map references unknown element '" + p + "'");
            if (ci == pi) throw Error("cycle in parent map at '" + c + "'");
            s.parent_[ci] = pi;
        }
        s.check_acyclic();
        s.finish();
        return s;
    }

    /// Tree from a parent vector over the given (already distinct) ids.
    static FinStructure make_tree_indexed(const std::vector<std::string>& ids, const std::vector<std::size_t>& parent) {
        std::map<std::string, std::string> pm;
        for (std::size_t i = 0; i < ids.size(); ++i)
            if (parent[i] != npos) pm[ids[i]] = ids[parent[i]];
        return make_tree(ids, pm);
    }

    FinStructure with_predicates(std::vector<Predicate> preds) const {
        FinStructure s = *this;
        for (auto& p : preds)
            if (p.members.size() != size()) throw Error("predicate '" + p.name + "' has wrong width");
        s.preds_ = std::move(preds);
        return s;
    }

    FinStructure add_predicate(const std::string& name, const std::vector<std::string>& members) const {
        Subset m(size(), false);
        for (const auto& id : members) {
            auto i = find(id);
            if (i == npos) throw Error("predicate '" + name + "' references unknown element '" + id + "'");
            m[i] = true;
        }
        FinStructure s = *this;
        s.preds_.push_back({name, std::move(m)});
        return s;
    }

    FinStructure without_predicates() const {
        FinStructure s = *this;
        s.preds_.clear();
        return s;
    }

    Kind kind() const { return kind_; }
    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }
    const std::vector<std::string>& ids() const { return ids_; }
    const std::string& id(std::size_t i) const { return ids_[i]; }
    const std::vector<Predicate>& predicates() const { return preds_; }

    std::size_t find(const std::string& id) const {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
        if (it == ids_.end() || *it != id) return npos;
        return static_cast<std::size_t>(it - ids_.begin());
    }
    std::size_t index_of(const std::string& id) const {
        auto i = find(id);
        if (i == npos) throw Error("unknown element '" + id + "'");
        return i;
    }

    /// Chain rank of element i (chains only).
    std::size_t position(std::size_t i) const { return position_.at(i); }
    /// Elements in chain order (chains), canonical order otherwise.
    const std::vector<std::size_t>& chain_order() const { return order_; }
    std::size_t parent(std::size_t i) const { return kind_ == Kind::tree ? parent_[i] : npos; }
    const std::vector<std::size_t>& children(std::size_t i) const { return children_[i]; }
    std::size_t depth(std::size_t i) const { return depth_[i]; }

    /// The reflexive order: chain <=, tree ancestor-or-self; constantly false on sets.
    bool le(std::size_t x, std::size_t y) const {
        switch (kind_) {
        case Kind::chain: return position_[x] <= position_[y];
        case Kind::set: return false;
        case Kind::tree:
            while (depth_[y] > depth_[x]) y = parent_[y];
            return x == y;
        }
        return false;
    }
    bool lt(std::size_t x, std::size_t y) const { return x != y && le(x, y); }
    bool comparable(std::size_t x, std::size_t y) const { return le(x, y) || le(y, x); }

    /// Ancestors of i, root first, including i itself.
    std::vector<std::size_t> ancestors(std::size_t i) const {
        std::vector<std::size_t> out;
        if (kind_ == Kind::tree) {
            for (std::size_t c = i; c != npos; c = parent_[c]) out.push_back(c);
            std::reverse(out.begin(), out.end());
        } else if (kind_ == Kind::chain) {
            for (std::size_t r = 0; r <= position_[i]; ++r) out.push_back(order_[r]);
        } else {
            out.push_back(i);
        }
        return out;
    }

    std::vector<std::size_t> roots() const {
        std::vector<std::size_t> r;
        for (std::size_t i = 0; i < size(); ++i)
            if (kind_ != Kind::tree || parent_[i] == npos) {
                if (kind_ == Kind::chain && position_[i] != 0) continue;
                r.push_back(i);
            }
        return r;
    }

    /// Parent map view (tree) expressed with ids; chains become paths.
    std::vector<std::size_t> parent_vector() const {
        std::vector<std::size_t> p(size(), npos);
        if (kind_ == Kind::tree) return parent_;
        if (kind_ == Kind::chain)
            for (std::size_t r = 1; r < order_.size(); ++r) p[order_[r]] = order_[r - 1];
        return p;
    }

    /// A stable textual fingerprint of kind, order and predicates.
    std::string fingerprint() const {
        std::string f = kind_name(kind_);
        f += '|';
        for (std::size_t i = 0; i < size(); ++i) {
            f += ids_[i];
            f += ':';
            if (kind_ == Kind::chain) f += std::to_string(position_[i]);
            if (kind_ == Kind::tree) f += parent_[i] == npos ? std::string("-") : std::to_string(parent_[i]);
            f += ',';
        }
        for (const auto& p : preds_) {
            f += '|' + p.name + '=';
            for (bool b : p.members) f += b ? '1' : '0';
        }
        return f;
    }

    /// The induced substructure on `keep` (ids preserved). Trees keep the
    /// nearest kept ancestor as parent; predicates are intersected.
    FinStructure restrict_to(const std::vector<std::size_t>& keep) const {
        std::vector<bool> in(size(), false);
        for (auto k : keep) in[k] = true;
        std::vector<std::string> kid;
        for (std::size_t i = 0; i < size(); ++i)
            if (in[i]) kid.push_back(ids_[i]);
        FinStructure s;
        if (kind_ == Kind::set) {
            s = make_set(kid);
        } else if (kind_ == Kind::chain) {
            std::vector<std::string> ord;
            for (auto e : order_)
                if (in[e]) ord.push_back(ids_[e]);
            s = make_chain(ord);
        } else {
            std::map<std::string, std::string> pm;
            for (std::size_t i = 0; i < size(); ++i) {
                if (!in[i]) continue;
                std::size_t p = parent_[i];
                while (p != npos && !in[p]) p = parent_[p];
                if (p != npos) pm[ids_[i]] = ids_[p];
            }
            s = make_tree(kid, pm);
        }
        std::vector<Predicate> ps;
        for (const auto& p : preds_) {
            Subset m(s.size(), false);
            for (std::size_t i = 0; i < size(); ++i)
                if (in[i] && p.members[i]) m[s.find(ids_[i])] = true;
            ps.push_back({p.name, m});
        }
        s.preds_ = std::move(ps);
        return s;
    }

    /// Translate a subset of this structure onto a substructure sharing ids.
    Subset project(const Subset& x, const FinStructure& sub) const {
        Subset out(sub.size(), false);
        for (std::size_t i = 0; i < sub.size(); ++i) {
            auto j = find(sub.id(i));
            if (j != npos && x[j]) out[i] = true;
        }
        return out;
    }

private:
    void init_ids(std::vector<std::string> ids) {
        std::sort(ids.begin(), ids.end());
        for (std::size_t i = 1; i < ids.size(); ++i)
            if (ids[i] == ids[i - 1]) throw Error("duplicate element id '" + ids[i] + "'");
        ids_ = std::move(ids);
    }

    void check_acyclic() const {
        for (std::size_t i = 0; i < size(); ++i) {
            std::size_t steps = 0;
            for (std::size_t c = i; c != npos; c = parent_[c])
                if (++steps > size()) throw Error("cycle in parent map through '" + ids_[i] + "'");
        }
    }

    void finish() {
        const std::size_t n = size();
        children_.assign(n, {});
        depth_.assign(n, 0);
        order_.clear();
        if (kind_ == Kind::tree) {
            for (std::size_t i = 0; i < n; ++i) {
                if (parent_[i] != npos) children_[parent_[i]].push_back(i);
                std::size_t d = 0;
                for (std::size_t c = parent_[i]; c != npos; c = parent_[c]) ++d;
                depth_[i] = d;
            }
            for (std::size_t i = 0; i < n; ++i) order_.push_back(i);
        } else if (kind_ == Kind::chain) {
            order_.assign(n, 0);
            for (std::size_t i = 0; i < n; ++i) order_[position_[i]] = i;
            for (std::size_t i = 0; i < n; ++i) depth_[i] = position_[i];
        } else {
            for (std::size_t i = 0; i < n; ++i) order_.push_back(i);
        }
    }

    Kind kind_ = Kind::set;
    std::vector<std::string> ids_;
    std::vector<std::size_t> position_;
    std::vector<std::size_t> parent_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::size_t> depth_;
    std::vector<std::size_t> order_;
    std::vector<Predicate> preds_;
};

inline Subset subset_of(const FinStructure& s, const std::vector<std::size_t>& members) {
    Subset m(s.size(), false);
    for (auto i : members) m.at(i) = true;
    return m;
}

inline std::vector<std::size_t> members_of(const Subset& x) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i]) out.push_back(i);
    return out;
}

inline void require_tree(const FinStructure& t, const char* what) {
    if (t.kind() != Kind::tree && t.kind() != Kind::chain)
        throw Error(std::string(what) + " requires a tree");
}

// ---------------------------------------------------------------------------
// Meets

/// Result of intersecting two nodes: an element, or the common initial
/// segment (possibly empty) when no greatest common lower bound exists.
struct Meet {
    std::size_t element = npos;
    std::vector<std::size_t> segment;

    bool is_element() const { return element != npos; }
    bool operator==(const Meet&) const = default;
};

inline Meet meet(const FinStructure& t, std::size_t x, std::size_t y) {
    require_tree(t, "meet");
    if (x >= t.size() || y >= t.size()) throw Error("meet: element out of range");
    auto ax = t.ancestors(x), ay = t.ancestors(y);
    std::vector<std::size_t> common;
    for (std::size_t i = 0; i < ax.size() && i < ay.size() && ax[i] == ay[i]; ++i) common.push_back(ax[i]);
    Meet m;
    if (!common.empty()) m.element = common.back();
    m.segment = std::move(common);
    return m;
}

// ---------------------------------------------------------------------------
// Initial segments, branches and the ~0 / ~1 relations

inline bool is_initial_segment(const FinStructure& t, const std::vector<std::size_t>& a) {
    std::vector<bool> in(t.size(), false);
    for (auto x : a) {
        if (x >= t.size()) return false;
        in[x] = true;
    }
    for (auto x : a)
        for (auto y : a)
            if (!t.comparable(x, y)) return false;
    for (auto x : a)
        for (std::size_t y = 0; y < t.size(); ++y)
            if (t.le(y, x) && !in[y]) return false;
    return true;
}

/// x is above the initial segment a: x not in a and every member of a is below x.
inline bool above_segment(const FinStructure& t, const std::vector<std::size_t>& a, std::size_t x) {
    for (auto s : a) {
        if (s == x) return false;
        if (!t.le(s, x)) return false;
    }
    return true;
}

/// x ~0_A y: x and y leave A at the same place.
inline bool tilde0(const FinStructure& t, const std::vector<std::size_t>& a, std::size_t x, std::size_t y) {
    for (auto s : a)
        if (t.le(s, x) != t.le(s, y)) return false;
    return true;
}

/// ~1_A classes of (domain \ A), witnesses z ranging over `domain`.
/// Classes are listed by their smallest canonical index.
inline std::vector<std::vector<std::size_t>> tilde1_classes(const FinStructure& t, const std::vector<std::size_t>& domain,
                                                            const std::vector<std::size_t>& a) {
    std::vector<bool> in_a(t.size(), false);
    for (auto x : a) in_a[x] = true;
    std::vector<std::size_t> rest;
    for (auto x : domain)
        if (!in_a[x]) rest.push_back(x);
    std::sort(rest.begin(), rest.end());
    auto related = [&](std::size_t x, std::size_t y) {
        if (!tilde0(t, a, x, y)) return false;
        for (auto z : rest)
            if (t.le(z, x) && t.le(z, y) && tilde0(t, a, z, x)) return true;
        return false;
    };
    std::vector<std::vector<std::size_t>> classes;
    std::vector<bool> done(t.size(), false);
    for (auto x : rest) {
        if (done[x]) continue;
        std::vector<std::size_t> cls;
        for (auto y : rest)
            if (!done[y] && (x == y || related(x, y))) {
                cls.push_back(y);
                done[y] = true;
            }
        classes.push_back(std::move(cls));
    }
    return classes;
}

struct SegmentDecomposition {
    std::vector<std::size_t> segment;
    std::vector<std::size_t> below;  // T_{<=A}: elements not above A
    std::vector<std::vector<std::size_t>> classes;
    std::vector<std::size_t> class_index;  // npos for elements not above A
};

inline SegmentDecomposition segment_decompose(const FinStructure& t, std::vector<std::size_t> a) {
    require_tree(t, "segment_decompose");
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    if (!is_initial_segment(t, a)) throw Error("segment_decompose: not an initial segment");
    SegmentDecomposition d;
    d.segment = a;
    std::vector<std::size_t> above;
    for (std::size_t x = 0; x < t.size(); ++x) {
        if (above_segment(t, a, x))
            above.push_back(x);
        else
            d.below.push_back(x);
    }
    std::vector<std::size_t> dom = above;
    dom.insert(dom.end(), a.begin(), a.end());
    d.classes = tilde1_classes(t, dom, a);
    d.class_index.assign(t.size(), npos);
    for (std::size_t c = 0; c < d.classes.size(); ++c)
        for (auto x : d.classes[c]) d.class_index[x] = c;
    return d;
}

/// All initial segments of a finite tree: the empty one and each ancestor set.
inline std::vector<std::vector<std::size_t>> initial_segments(const FinStructure& t) {
    std::vector<std::vector<std::size_t>> out{{}};
    for (std::size_t x = 0; x < t.size(); ++x) {
        auto a = t.ancestors(x);
        std::sort(a.begin(), a.end());
        out.push_back(std::move(a));
    }
    return out;
}

/// sup over initial segments A of |top(A)/~1_A|, restricted to elements above A.
inline std::size_t max_class_count(const FinStructure& t) {
    std::size_t best = 0;
    for (const auto& a : initial_segments(t)) best = std::max(best, segment_decompose(t, a).classes.size());
    return best;
}

inline bool is_branch(const FinStructure& t, std::vector<std::size_t> b) {
    if (b.empty()) return t.empty();
    std::sort(b.begin(), b.end());
    for (auto x : b)
        if (x >= t.size()) return false;
    for (auto x : b)
        for (auto y : b)
            if (!t.comparable(x, y)) return false;
    // convex, downward closed to a root, and ending at a leaf
    std::size_t top = b[0];
    for (auto x : b)
        if (t.le(top, x)) top = x;
    auto anc = t.ancestors(top);
    std::sort(anc.begin(), anc.end());
    if (anc != b) return false;
    if (t.kind() == Kind::tree) return t.children(top).empty();
    return t.position(top) + 1 == t.size();
}

struct BranchDecomposition {
    std::vector<std::size_t> branch;  // gap-filled branch; equal to the input on finite trees
    std::map<std::size_t, std::vector<std::size_t>> hang;  // branch node -> elements leaving the branch there
    std::vector<std::size_t> detached;  // elements of other components
};

inline BranchDecomposition branch_decompose(const FinStructure& t, std::vector<std::size_t> b) {
    require_tree(t, "branch_decompose");
    if (!is_branch(t, b)) throw Error("branch_decompose: not a branch");
    std::sort(b.begin(), b.end(), [&](auto x, auto y) { return t.depth(x) < t.depth(y); });
    BranchDecomposition d;
    d.branch = b;
    std::vector<bool> on(t.size(), false);
    for (auto x : b) on[x] = true;
    for (auto x : b) d.hang[x];
    for (std::size_t x = 0; x < t.size(); ++x) {
        if (on[x]) continue;
        std::size_t at = npos;
        for (auto a : t.ancestors(x))
            if (on[a]) at = a;
        if (at == npos)
            d.detached.push_back(x);
        else
            d.hang[at].push_back(x);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Embedding frames of a finite binary prefix

/// Binary sequences are written as strings over {'0','1'}; "" is the root.
class EmbeddingFrame {
public:
    EmbeddingFrame(FinStructure host, std::map<std::string, std::size_t> image) : host_(std::move(host)), image_(std::move(image)) {
        if (host_.kind() != Kind::tree) throw Error("embedding frame host must be a tree");
        auto roots = host_.roots();
        if (roots.size() != 1) throw Error("embedding frame host must have a root");
        if (!image_.count("") || image_.at("") != roots[0]) throw Error("embedding must send the binary root to the host root");
        for (const auto& [seq, x] : image_) {
            if (x >= host_.size()) throw Error("embedding image out of range");
            if (!seq.empty() && !image_.count(seq.substr(0, seq.size() - 1))) throw Error("embedding domain is not prefix closed");
            bool c0 = image_.count(seq + "0"), c1 = image_.count(seq + "1");
            if (c0 != c1) throw Error("embedding domain node '" + seq + "' must have both or no children");
        }
        for (const auto& [s1, x1] : image_)
            for (const auto& [s2, x2] : image_) {
                bool pre = s2.compare(0, s1.size(), s1) == 0 && s1.size() <= s2.size();
                if (pre != host_.le(x1, x2)) throw Error("embedding is not order preserving at '" + s1 + "','" + s2 + "'");
            }
        for (const auto& [seq, x] : image_) seq_of_[x] = seq;
    }

    const FinStructure& host() const { return host_; }
    const std::map<std::string, std::size_t>& image() const { return image_; }
    bool in_image(std::size_t x) const { return seq_of_.count(x) > 0; }
    const std::string& seq(std::size_t x) const { return seq_of_.at(x); }
    std::vector<std::size_t> image_elements() const {
        std::vector<std::size_t> v;
        for (const auto& [x, s] : seq_of_) v.push_back(x);
        return v;
    }
    std::size_t succ(std::size_t y, int d) const {
        auto it = image_.find(seq(y) + char('0' + d));
        return it == image_.end() ? npos : it->second;
    }
    /// y^i: the meet of the two image successors (npos on image leaves).
    std::size_t split(std::size_t y) const {
        auto a = succ(y, 0), b = succ(y, 1);
        if (a == npos) return npos;
        return meet(host_, a, b).element;
    }

private:
    FinStructure host_;
    std::map<std::string, std::size_t> image_;
    std::map<std::size_t, std::string> seq_of_;
};

/// The eight regions T_0(y)..T_7(y) above an image node. On image leaves only
/// T_0 is populated.
inline std::array<std::vector<std::size_t>, 8> region_decompose(const EmbeddingFrame& f, std::size_t y) {
    if (!f.in_image(y)) throw Error("region_decompose: element is not in the embedding image");
    const auto& t = f.host();
    std::array<std::vector<std::size_t>, 8> r;
    const std::size_t n = t.size();
    for (std::size_t x = 0; x < n; ++x)
        if (t.le(y, x)) r[0].push_back(x);
    const std::size_t y0 = f.succ(y, 0), y1 = f.succ(y, 1);
    if (y0 == npos) return r;
    const std::size_t yi = f.split(y);
    auto le = [&](std::size_t a, std::size_t b) { return t.le(a, b); };
    for (std::size_t x = 0; x < n; ++x) {
        bool c1 = false;
        if (!le(yi, x))
            for (std::size_t z = 0; z < n && !c1; ++z) c1 = z != y && le(z, x) && le(y, z) && le(z, yi);
        if (c1) r[1].push_back(x);

        if (le(y, x)) {
            bool ok = true;
            for (std::size_t z = 0; z < n && ok; ++z)
                if (le(z, yi) && le(z, x) && !le(z, y)) ok = false;
            if (ok) r[2].push_back(x);
        }
        for (int side = 0; side < 2; ++side) {
            std::size_t ys = side == 0 ? y0 : y1;
            bool c = false;
            if (!le(ys, x))
                for (std::size_t z = 0; z < n && !c; ++z) c = z != yi && le(z, x) && le(yi, z) && le(z, ys);
            if (c) r[3 + side].push_back(x);
        }
        if (le(yi, x)) {
            bool ok = true;
            for (std::size_t z = 0; z < n && ok; ++z)
                if (le(z, x) && (le(z, y0) || le(z, y1)) && !le(z, yi)) ok = false;
            if (ok) r[5].push_back(x);
        }
        if (le(y0, x)) r[6].push_back(x);
        if (le(y1, x)) r[7].push_back(x);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Grafting onto binary-tree fragments

/// Element id for a binary sequence.
inline std::string binary_id(const std::string& seq) { return "r" + seq; }

struct GraftSpec {
    std::set<std::string> base;  // prefix-closed binary sequences, "" is the root
    std::map<std::pair<std::string, int>, std::set<std::string>> graft;
};

inline void check_binary_tree(const std::set<std::string>& m, const char* what) {
    if (m.empty() || !m.count("")) throw Error(std::string(what) + " must contain the root");
    for (const auto& s : m) {
        for (char c : s)
            if (c != '0' && c != '1') throw Error(std::string(what) + " has a non-binary sequence");
        if (!s.empty() && !m.count(s.substr(0, s.size() - 1))) throw Error(std::string(what) + " is not prefix closed");
    }
}

inline std::set<std::string> graft_sequences(const GraftSpec& g) {
    check_binary_tree(g.base, "graft base");
    std::set<std::string> out = g.base;
    for (const auto& [slot, sub] : g.graft) {
        const auto& [x, d] = slot;
        if (d != 0 && d != 1) throw Error("graft direction must be 0 or 1");
        if (!g.base.count(x)) throw Error("graft slot '" + x + "' is not in the base tree");
        std::string head = x + char('0' + d);
        if (g.base.count(head)) throw Error("grafting onto occupied slot '" + head + "'");
        check_binary_tree(sub, "grafted tree");
        for (const auto& y : sub) out.insert(head + y);
    }
    return out;
}

inline FinStructure binary_fragment_tree(const std::set<std::string>& seqs) {
    std::vector<std::string> ids;
    std::map<std::string, std::string> pm;
    for (const auto& s : seqs) {
        ids.push_back(binary_id(s));
        if (!s.empty()) pm[binary_id(s)] = binary_id(s.substr(0, s.size() - 1));
    }
    return FinStructure::make_tree(ids, pm);
}

inline FinStructure graft_compose(const GraftSpec& g) { return binary_fragment_tree(graft_sequences(g)); }

}  // namespace msow
