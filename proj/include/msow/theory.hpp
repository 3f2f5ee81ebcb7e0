#pragma once

// Partial theories Th^n(T; A) as interned hereditarily finite values.
//
// Rank 0 stores the truth vector of the fixed atom set for the tuple; rank
// m+1 stores the set of rank-m theories of all one-set extensions. Values are
// hash-consed, so two theories are equal iff their handles are equal.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "msow/structures.hpp"

namespace msow {

// ---------------------------------------------------------------------------
// Atom layout for arity l:
//   [2i]     sing(X_i)       [2i+1] empty(X_i)
//   2l + 4(il+j) + {0 subset, 1 equal, 2 member, 3 le}   for all i, j < l

enum class Atom { sing, empty, subset, equal, member, le };

inline std::size_t atom_count(std::size_t arity) { return 2 * arity + 4 * arity * arity; }

inline std::size_t atom_index(Atom a, std::size_t i, std::size_t j, std::size_t arity) {
    switch (a) {
    case Atom::sing: return 2 * i;
    case Atom::empty: return 2 * i + 1;
    case Atom::subset: return 2 * arity + 4 * (i * arity + j);
    case Atom::equal: return 2 * arity + 4 * (i * arity + j) + 1;
    case Atom::member: return 2 * arity + 4 * (i * arity + j) + 2;
    case Atom::le: return 2 * arity + 4 * (i * arity + j) + 3;
    }
    return 0;
}

using Mask = std::uint64_t;

inline constexpr std::size_t kMaxEnumerableElements = 24;

namespace detail {

struct TheoryNode {
    std::uint64_t id = 0;
    std::uint64_t hash = 0;  // content hash, independent of interning order
    std::uint32_t rank = 0;
    std::uint32_t arity = 0;
    std::string atoms;  // rank 0: one byte (0/1) per atom
    std::vector<const TheoryNode*> members;  // rank > 0: sorted by id
};

inline std::uint64_t fnv(std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffu;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

class TheoryStore {
public:
    const TheoryNode* atoms(std::uint32_t arity, std::string bits) {
        std::string key;
        key.reserve(bits.size() + 9);
        key.push_back('a');
        append_u32(key, arity);
        key += bits;
        std::lock_guard lock(mu_);
        auto it = table_.find(key);
        if (it != table_.end()) return it->second;
        auto& n = nodes_.emplace_back();
        n.id = nodes_.size();
        n.rank = 0;
        n.arity = arity;
        n.atoms = std::move(bits);
        std::uint64_t h = fnv(1469598103934665603ull, 0);
        h = fnv(h, arity);
        for (char c : n.atoms) h = fnv(h, static_cast<unsigned char>(c));
        n.hash = mix(h);
        table_.emplace(std::move(key), &n);
        return &n;
    }

    /// `members` need not be sorted or unique.
    const TheoryNode* set(std::uint32_t rank, std::uint32_t arity, std::vector<const TheoryNode*> members) {
        std::sort(members.begin(), members.end(), [](auto a, auto b) { return a->id < b->id; });
        members.erase(std::unique(members.begin(), members.end()), members.end());
        std::string key;
        key.reserve(9 + 8 * members.size());
        key.push_back('s');
        append_u32(key, rank);
        append_u32(key, arity);
        for (auto m : members) append_u64(key, m->id);
        std::lock_guard lock(mu_);
        auto it = table_.find(key);
        if (it != table_.end()) return it->second;
        auto& n = nodes_.emplace_back();
        n.id = nodes_.size();
        n.rank = rank;
        n.arity = arity;
        std::vector<std::uint64_t> hs;
        hs.reserve(members.size());
        for (auto m : members) hs.push_back(m->hash);
        std::sort(hs.begin(), hs.end());
        std::uint64_t h = fnv(1469598103934665603ull, rank);
        h = fnv(h, arity);
        for (auto x : hs) h = fnv(h, x);
        n.hash = mix(h);
        n.members = std::move(members);
        table_.emplace(std::move(key), &n);
        return &n;
    }

    std::size_t size() {
        std::lock_guard lock(mu_);
        return nodes_.size();
    }

private:
    static void append_u32(std::string& s, std::uint32_t v) {
        for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    static void append_u64(std::string& s, std::uint64_t v) {
        for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }

    std::mutex mu_;
    std::deque<TheoryNode> nodes_;
    std::unordered_map<std::string, const TheoryNode*> table_;
};

inline TheoryStore& store() {
    static TheoryStore s;
    return s;
}

}  // namespace detail

/// Handle to an interned partial theory. Cheap to copy; equality is identity.
class Theory {
public:
    Theory() = default;
    explicit Theory(const detail::TheoryNode* n) : node_(n) {}

    static Theory from_atoms(std::size_t arity, std::string bits) {
        if (bits.size() != atom_count(arity)) throw Error("atom vector length does not match arity");
        return Theory(detail::store().atoms(static_cast<std::uint32_t>(arity), std::move(bits)));
    }
    static Theory from_members(std::size_t rank, std::size_t arity, const std::vector<Theory>& ms) {
        if (rank == 0) throw Error("rank-0 theories are atom vectors");
        std::vector<const detail::TheoryNode*> raw;
        raw.reserve(ms.size());
        for (auto m : ms) {
            if (m.rank() + 1 != rank || m.arity() != arity + 1) throw Error("member theory has wrong rank or arity");
            raw.push_back(m.node_);
        }
        return Theory(detail::store().set(static_cast<std::uint32_t>(rank), static_cast<std::uint32_t>(arity), std::move(raw)));
    }

    bool valid() const { return node_ != nullptr; }
    std::size_t rank() const { return node_->rank; }
    std::size_t arity() const { return node_->arity; }
    std::uint64_t hash() const { return node_->hash; }
    std::uint64_t id() const { return node_->id; }
    const std::string& atom_bits() const { return node_->atoms; }
    bool atom(std::size_t idx) const { return node_->atoms[idx] != 0; }
    std::size_t member_count() const { return node_->members.size(); }
    Theory member(std::size_t i) const { return Theory(node_->members[i]); }
    std::vector<Theory> members() const {
        std::vector<Theory> v;
        v.reserve(node_->members.size());
        for (auto m : node_->members) v.emplace_back(m);
        return v;
    }
    /// Members in canonical (content-hash) order.
    std::vector<Theory> canonical_members() const {
        auto v = members();
        std::sort(v.begin(), v.end(), [](Theory a, Theory b) { return a.hash() != b.hash() ? a.hash() < b.hash() : a.id() < b.id(); });
        return v;
    }
    std::string hash_hex() const {
        static const char* d = "0123456789abcdef";
        std::string s(16, '0');
        for (int i = 0; i < 16; ++i) s[15 - i] = d[(hash() >> (4 * i)) & 0xf];
        return s;
    }

    bool operator==(const Theory& o) const { return node_ == o.node_; }
    bool operator!=(const Theory& o) const { return node_ != o.node_; }
    /// Canonical order: content hash, identity as tie-break.
    bool operator<(const Theory& o) const { return hash() != o.hash() ? hash() < o.hash() : id() < o.id(); }

    const detail::TheoryNode* node() const { return node_; }

private:
    const detail::TheoryNode* node_ = nullptr;
};

struct TheoryHash {
    std::size_t operator()(const Theory& t) const { return std::hash<const void*>()(t.node()); }
};

// ---------------------------------------------------------------------------
// Computation

namespace detail {

/// Order relation and fingerprint of a structure prepared for enumeration.
struct Prepared {
    std::size_t n = 0;
    std::vector<Mask> up;  // up[x] = {y : x <= y}
    std::string fingerprint;
};

inline Prepared prepare(const FinStructure& s) {
    if (s.size() > kMaxEnumerableElements)
        throw Error("structure too large for theory enumeration (" + std::to_string(s.size()) + " elements)");
    Prepared p;
    p.n = s.size();
    p.up.assign(p.n, 0);
    for (std::size_t x = 0; x < p.n; ++x)
        for (std::size_t y = 0; y < p.n; ++y)
            if (s.le(x, y)) p.up[x] |= Mask(1) << y;
    p.fingerprint = s.without_predicates().fingerprint();
    return p;
}

inline std::string atom_bits(const Prepared& p, std::span<const Mask> tuple) {
    const std::size_t l = tuple.size();
    std::string bits(atom_count(l), '\0');
    for (std::size_t i = 0; i < l; ++i) {
        const Mask a = tuple[i];
        bits[2 * i] = std::has_single_bit(a);
        bits[2 * i + 1] = a == 0;
    }
    for (std::size_t i = 0; i < l; ++i) {
        const Mask a = tuple[i];
        const bool sa = std::has_single_bit(a);
        for (std::size_t j = 0; j < l; ++j) {
            const Mask b = tuple[j];
            const std::size_t base = 2 * l + 4 * (i * l + j);
            const bool sub = (a & ~b) == 0;
            bits[base] = sub;
            bits[base + 1] = a == b;
            bits[base + 2] = sa && sub;
            bits[base + 3] = sa && std::has_single_bit(b) && (p.up[std::countr_zero(a)] & b) != 0;
        }
    }
    return bits;
}

class Memo {
public:
    bool get(const std::string& k, Theory& out) {
        std::lock_guard lock(mu_);
        auto it = map_.find(k);
        if (it == map_.end()) return false;
        out = it->second;
        return true;
    }
    void put(std::string k, Theory t) {
        std::lock_guard lock(mu_);
        if (map_.size() > 4'000'000) map_.clear();
        map_.emplace(std::move(k), t);
    }
    void clear() {
        std::lock_guard lock(mu_);
        map_.clear();
    }

private:
    std::mutex mu_;
    std::unordered_map<std::string, Theory> map_;
};

inline Memo& compute_memo() {
    static Memo m;
    return m;
}

inline Theory compute(const Prepared& p, std::vector<Mask>& tuple, std::size_t depth) {
    if (depth == 0) return Theory::from_atoms(tuple.size(), atom_bits(p, tuple));
    std::string key;
    if (depth >= 2) {
        key = p.fingerprint;
        key.push_back('#');
        key += std::to_string(depth);
        for (auto m : tuple) {
            key.push_back(',');
            key += std::to_string(m);
        }
        Theory cached;
        if (compute_memo().get(key, cached)) return cached;
    }
    const Mask full = p.n == 64 ? ~Mask(0) : ((Mask(1) << p.n) - 1);
    std::vector<const TheoryNode*> ms;
    ms.reserve(std::size_t(1) << p.n);
    tuple.push_back(0);
    for (Mask b = 0;; ++b) {
        tuple.back() = b;
        ms.push_back(compute(p, tuple, depth - 1).node());
        if (b == full) break;
    }
    tuple.pop_back();
    Theory t(store().set(static_cast<std::uint32_t>(depth), static_cast<std::uint32_t>(tuple.size()), std::move(ms)));
    if (depth >= 2) compute_memo().put(std::move(key), t);
    return t;
}

}  // namespace detail

inline Mask to_mask(const Subset& x) {
    if (x.size() > 64) throw Error("subset too wide for a mask");
    Mask m = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i]) m |= Mask(1) << i;
    return m;
}

inline Subset from_mask(Mask m, std::size_t n) {
    Subset x(n, false);
    for (std::size_t i = 0; i < n; ++i) x[i] = (m >> i) & 1u;
    return x;
}

/// The full tuple used for a structure: its own predicates followed by `extra`.
inline std::vector<Mask> tuple_masks(const FinStructure& s, const std::vector<Subset>& extra) {
    std::vector<Mask> t;
    for (const auto& p : s.predicates()) t.push_back(to_mask(p.members));
    for (const auto& x : extra) {
        if (x.size() != s.size()) throw Error("tuple references foreign elements (wrong subset width)");
        t.push_back(to_mask(x));
    }
    return t;
}

/// Th^n(s; P, extra) where P are the structure's own predicates.
inline Theory compute_theory(const FinStructure& s, const std::vector<Subset>& extra, std::size_t n) {
    auto p = detail::prepare(s);
    auto tuple = tuple_masks(s, extra);
    return detail::compute(p, tuple, n);
}

inline Theory compute_theory(const FinStructure& s, std::size_t n) { return compute_theory(s, {}, n); }

/// Mask-level entry point for callers that enumerate tuples themselves.
class TheoryComputer {
public:
    explicit TheoryComputer(const FinStructure& s) : p_(detail::prepare(s)) {}
    Theory operator()(std::vector<Mask> tuple, std::size_t n) const { return detail::compute(p_, tuple, n); }
    std::size_t size() const { return p_.n; }

private:
    detail::Prepared p_;
};

inline void clear_theory_cache() { detail::compute_memo().clear(); }

// ---------------------------------------------------------------------------
// Depth reduction

/// Drop the last variable from a rank-0 atom vector.
inline Theory project_atoms(Theory t) {
    const std::size_t l = t.arity();
    if (t.rank() != 0 || l == 0) throw Error("project_atoms needs a rank-0 theory of positive arity");
    const std::size_t k = l - 1;
    std::string bits(atom_count(k), '\0');
    for (std::size_t i = 0; i < k; ++i) {
        bits[atom_index(Atom::sing, i, 0, k)] = t.atom_bits()[atom_index(Atom::sing, i, 0, l)];
        bits[atom_index(Atom::empty, i, 0, k)] = t.atom_bits()[atom_index(Atom::empty, i, 0, l)];
        for (std::size_t j = 0; j < k; ++j)
            for (Atom a : {Atom::subset, Atom::equal, Atom::member, Atom::le})
                bits[atom_index(a, i, j, k)] = t.atom_bits()[atom_index(a, i, j, l)];
    }
    return Theory::from_atoms(k, std::move(bits));
}

namespace detail {
inline std::mutex& reduce_mu() {
    static std::mutex m;
    return m;
}
inline std::unordered_map<std::uint64_t, Theory>& reduce_cache() {
    static std::unordered_map<std::uint64_t, Theory> c;
    return c;
}
}  // namespace detail

/// Th^n from Th^m for n <= m, by elementwise recursion.
inline Theory reduce_depth(Theory t, std::size_t n) {
    if (n > t.rank()) throw Error("reduce_depth: target depth exceeds theory rank");
    if (n == t.rank()) return t;
    const std::uint64_t key = (t.id() << 8) | n;
    {
        std::lock_guard lock(detail::reduce_mu());
        auto it = detail::reduce_cache().find(key);
        if (it != detail::reduce_cache().end()) return it->second;
    }
    Theory out;
    if (n == 0) {
        if (t.member_count() == 0) throw Error("reduce_depth: theory has no members");
        out = project_atoms(reduce_depth(t.member(0), 0));
    } else {
        std::vector<Theory> ms;
        ms.reserve(t.member_count());
        for (auto m : t.members()) ms.push_back(reduce_depth(m, n - 1));
        out = Theory::from_members(n, t.arity(), ms);
    }
    std::lock_guard lock(detail::reduce_mu());
    detail::reduce_cache().emplace(key, out);
    return out;
}

/// Truth of an atom read off the rank-0 block of any theory.
inline bool theory_atom(Theory t, Atom a, std::size_t i, std::size_t j = 0) {
    Theory z = reduce_depth(t, 0);
    return z.atom(atom_index(a, i, j, z.arity()));
}

// ---------------------------------------------------------------------------
// Structure enumeration shared by realized_theories and the test oracles

inline std::vector<std::string> element_names(std::size_t n, const std::string& prefix = "e") {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(prefix + std::to_string(i));
    return v;
}

/// Every parent vector with parent[i] in {none, 0..i-1}; covers all finite
/// forests of size n up to isomorphism.
inline std::vector<std::vector<std::size_t>> canonical_parent_maps(std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur(n, npos);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == n) {
            out.push_back(cur);
            return;
        }
        cur[i] = npos;
        rec(i + 1);
        for (std::size_t p = 0; p < i; ++p) {
            cur[i] = p;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

inline std::vector<FinStructure> structures_of_size(Kind kind, std::size_t n) {
    auto names = element_names(n);
    std::vector<FinStructure> out;
    switch (kind) {
    case Kind::set: out.push_back(FinStructure::make_set(names)); break;
    case Kind::chain: out.push_back(FinStructure::make_chain(names)); break;
    case Kind::tree:
        for (const auto& pm : canonical_parent_maps(n)) out.push_back(FinStructure::make_tree_indexed(names, pm));
        break;
    }
    return out;
}

/// Call f on every tuple of `arity` masks over n elements.
template <class F>
void for_each_tuple(std::size_t n, std::size_t arity, F&& f) {
    const Mask count = Mask(1) << n;
    std::vector<Mask> t(arity, 0);
    if (arity == 0) {
        f(t);
        return;
    }
    while (true) {
        f(t);
        std::size_t i = 0;
        while (i < arity && ++t[i] == count) t[i++] = 0;
        if (i == arity) return;
    }
}

/// Theories realized by structures of the given kind with at most
/// `size_bound` elements: an under-approximation of the formally possible set.
inline std::vector<Theory> realized_theories(std::size_t n, std::size_t arity, std::size_t size_bound, Kind kind) {
    std::vector<Theory> out;
    std::unordered_map<const void*, bool> seen;
    for (std::size_t size = 0; size <= size_bound; ++size)
        for (const auto& s : structures_of_size(kind, size)) {
            TheoryComputer tc(s);
            for_each_tuple(size, arity, [&](const std::vector<Mask>& t) {
                Theory th = tc(t, n);
                if (seen.emplace(th.node(), true).second) out.push_back(th);
            });
        }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace msow
