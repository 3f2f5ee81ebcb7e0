#include <gtest/gtest.h>

#include <random>

#include "msow/theory.hpp"

using namespace msow;

namespace {

using Tuple = std::vector<Subset>;

bool is_sing(const Subset& x) { return std::count(x.begin(), x.end(), true) == 1; }
bool is_empty(const Subset& x) { return std::count(x.begin(), x.end(), true) == 0; }
bool sub(const Subset& x, const Subset& y) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] && !y[i]) return false;
    return true;
}
std::size_t the(const Subset& x) { return std::find(x.begin(), x.end(), true) - x.begin(); }

// Quantifier-free type of a tuple, straight from the set semantics.
std::vector<bool> qf_type(const FinStructure& s, const Tuple& t) {
    std::vector<bool> v;
    for (const auto& x : t) {
        v.push_back(is_sing(x));
        v.push_back(is_empty(x));
    }
    for (const auto& x : t)
        for (const auto& y : t) {
            v.push_back(sub(x, y));
            v.push_back(x == y);
            v.push_back(is_sing(x) && sub(x, y));
            v.push_back(is_sing(x) && is_sing(y) && s.le(the(x), the(y)));
        }
    return v;
}

std::vector<Subset> all_subsets(std::size_t n) {
    std::vector<Subset> out;
    for (Mask m = 0; m < (Mask(1) << n); ++m) out.push_back(from_mask(m, n));
    return out;
}

// Back-and-forth game oracle: equal depth-n theories iff Duplicator survives n set moves.
bool game_equiv(const FinStructure& a, Tuple ta, const FinStructure& b, Tuple tb, std::size_t n) {
    if (qf_type(a, ta) != qf_type(b, tb)) return false;
    if (n == 0) return true;
    auto sa = all_subsets(a.size()), sb = all_subsets(b.size());
    for (int side = 0; side < 2; ++side) {
        const auto& mine = side == 0 ? sa : sb;
        const auto& theirs = side == 0 ? sb : sa;
        for (const auto& x : mine) {
            bool answered = false;
            for (const auto& y : theirs) {
                Tuple na = ta, nb = tb;
                na.push_back(side == 0 ? x : y);
                nb.push_back(side == 0 ? y : x);
                if (game_equiv(a, na, b, nb, n - 1)) {
                    answered = true;
                    break;
                }
            }
            if (!answered) return false;
        }
    }
    return true;
}

FinStructure chain(std::size_t n) { return FinStructure::make_chain(element_names(n)); }

std::vector<FinStructure> small_structures(std::size_t max_n) {
    std::vector<FinStructure> out;
    for (std::size_t n = 0; n <= max_n; ++n)
        for (Kind k : {Kind::set, Kind::chain, Kind::tree})
            for (auto& s : structures_of_size(k, n)) out.push_back(s);
    return out;
}

}  // namespace

TEST(Compute, ArityZeroDepthZeroIsUnique) {
    auto t1 = compute_theory(chain(3), 0);
    auto t2 = compute_theory(FinStructure::make_set({"a"}), 0);
    EXPECT_EQ(t1, t2);
    EXPECT_EQ(t1.atom_bits().size(), 0u);
}

TEST(Compute, OneVsTwoChainAtDepthOne) {
    auto t1 = compute_theory(chain(1), 1), t2 = compute_theory(chain(2), 1);
    EXPECT_NE(t1, t2);
    // oracle: only the 2-chain has a subset that is neither empty nor a singleton
    auto has_big = [](std::size_t n) {
        for (const auto& x : all_subsets(n))
            if (!is_sing(x) && !is_empty(x)) return true;
        return false;
    };
    EXPECT_FALSE(has_big(1));
    EXPECT_TRUE(has_big(2));
}

TEST(Compute, RankAndArity) {
    auto s = chain(2);
    auto t = compute_theory(s, {Subset{true, false}}, 2);
    EXPECT_EQ(t.rank(), 2u);
    EXPECT_EQ(t.arity(), 1u);
    for (auto m : t.members()) {
        EXPECT_EQ(m.rank(), 1u);
        EXPECT_EQ(m.arity(), 2u);
    }
    EXPECT_EQ(reduce_depth(t, 0).atom_bits().size(), atom_count(1));
}

TEST(Compute, ForeignTuple) { EXPECT_THROW(compute_theory(chain(2), {Subset{true}}, 1), Error); }

TEST(Compute, AtomsMatchSetSemantics) {
    for (const auto& s : small_structures(3)) {
        for_each_tuple(s.size(), 2, [&](const std::vector<Mask>& m) {
            Tuple t{from_mask(m[0], s.size()), from_mask(m[1], s.size())};
            auto th = compute_theory(s, t, 0);
            auto expect = qf_type(s, t);
            ASSERT_EQ(th.atom_bits().size(), expect.size());
            for (std::size_t i = 0; i < expect.size(); ++i) ASSERT_EQ(th.atom(i), expect[i]) << s.fingerprint() << " atom " << i;
        });
    }
}

TEST(Compute, EqualityMatchesGameOracle) {
    // all structures with at most 3 elements, one predicate, depth <= 2
    std::vector<std::pair<FinStructure, Tuple>> items;
    for (const auto& s : small_structures(3))
        for (const auto& x : all_subsets(s.size())) items.push_back({s, {x}});
    std::mt19937_64 rng(7);
    for (std::size_t n = 0; n <= 2; ++n) {
        std::vector<Theory> th;
        for (const auto& [s, t] : items) th.push_back(compute_theory(s, t, n));
        std::uniform_int_distribution<std::size_t> pick(0, items.size() - 1);
        const std::size_t pairs = n < 2 ? 4000 : 600;
        for (std::size_t k = 0; k < pairs; ++k) {
            auto i = pick(rng), j = pick(rng);
            if (k % 3 == 0) {  // bias towards same-size pairs, where equality is common
                for (std::size_t tries = 0; tries < 20 && items[i].first.size() != items[j].first.size(); ++tries) j = pick(rng);
            }
            if (items[i].first.kind() != items[j].first.kind()) continue;
            ASSERT_EQ(th[i] == th[j], game_equiv(items[i].first, items[i].second, items[j].first, items[j].second, n))
                << items[i].first.fingerprint() << " vs " << items[j].first.fingerprint() << " n=" << n;
        }
    }
}

TEST(Compute, InvariantUnderRelabelling) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + rng() % 5;
        auto maps = canonical_parent_maps(n);
        auto pm = maps[rng() % maps.size()];
        auto names = element_names(n);
        auto t = FinStructure::make_tree_indexed(names, pm);
        Subset x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = rng() & 1;
        // relabel by a random permutation of ids
        std::vector<std::string> fresh;
        for (std::size_t i = 0; i < n; ++i) fresh.push_back("z" + std::to_string(rng() % 1000) + "_" + std::to_string(i));
        std::shuffle(fresh.begin(), fresh.end(), rng);
        std::map<std::string, std::string> parent;
        std::vector<std::string> members;
        for (std::size_t i = 0; i < n; ++i) {
            if (pm[i] != npos) parent[fresh[i]] = fresh[pm[i]];
            if (x[i]) members.push_back(fresh[i]);
        }
        auto u = FinStructure::make_tree(fresh, parent).add_predicate("P", members);
        auto a = compute_theory(t.add_predicate("P", [&] {
            std::vector<std::string> m;
            for (std::size_t i = 0; i < n; ++i)
                if (x[i]) m.push_back(names[i]);
            return m;
        }()), 2);
        ASSERT_EQ(a, compute_theory(u, 2));
    }
}

TEST(Reduce, IdentityAtOwnRank) {
    auto t = compute_theory(chain(3), 2);
    EXPECT_EQ(reduce_depth(t, 2), t);
    EXPECT_THROW(reduce_depth(t, 3), Error);
}

TEST(Reduce, MatchesRecomputation) {
    for (std::size_t n = 0; n <= 4; ++n)
        for (Kind k : {Kind::chain, Kind::tree, Kind::set})
            for (const auto& s : structures_of_size(k, n))
                for (const auto& x : all_subsets(n)) {
                    auto t2 = compute_theory(s, {x}, 2);
                    ASSERT_EQ(reduce_depth(t2, 1), compute_theory(s, {x}, 1));
                    ASSERT_EQ(reduce_depth(t2, 0), compute_theory(s, {x}, 0));
                    auto z = reduce_depth(t2, 0);
                    auto expect = qf_type(s, {x});
                    for (std::size_t i = 0; i < expect.size(); ++i) ASSERT_EQ(z.atom(i), expect[i]);
                }
}

TEST(Realized, ArityZeroDepthZero) { EXPECT_EQ(realized_theories(0, 0, 3, Kind::chain).size(), 1u); }

TEST(Realized, ArityOneDepthZeroChains) {
    // a single set on a chain: empty, singleton, or larger; nothing else is visible at rank 0
    auto ts = realized_theories(0, 1, 2, Kind::chain);
    std::set<std::vector<bool>> types;
    for (std::size_t n = 0; n <= 2; ++n)
        for (const auto& x : all_subsets(n)) types.insert(qf_type(chain(n), {x}));
    EXPECT_EQ(ts.size(), types.size());
    EXPECT_EQ(ts.size(), 3u);
}

TEST(Realized, MonotoneInSizeBound) {
    for (Kind k : {Kind::set, Kind::chain, Kind::tree}) {
        auto small = realized_theories(1, 1, 2, k), big = realized_theories(1, 1, 3, k);
        std::set<const void*> b;
        for (auto t : big) b.insert(t.node());
        for (auto t : small) EXPECT_TRUE(b.count(t.node()));
        EXPECT_GE(big.size(), small.size());
    }
}

TEST(Canonical, HashIndependentOfConstructionOrder) {
    auto s = chain(3);
    auto t = compute_theory(s, 2);
    auto ms = t.members();
    std::reverse(ms.begin(), ms.end());
    auto u = Theory::from_members(2, 0, ms);
    EXPECT_EQ(t, u);
    EXPECT_EQ(t.hash(), u.hash());
}
