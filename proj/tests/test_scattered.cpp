#include <gtest/gtest.h>

#include <random>
#include <set>

#include "msow/scattered.hpp"

using namespace msow;

namespace {

using T = OrderTerm;

T omega() { return T::omega(T::fin(1)); }
T omega_star() { return T::omega_star(T::fin(1)); }
T zeta() { return T::concat({omega_star(), omega()}); }

std::vector<std::string> order_ids(const FinStructure& c) {
    std::vector<std::string> v;
    for (auto e : c.chain_order()) v.push_back(c.id(e));
    return v;
}

// Random rebracketing of a concatenation, padded with empty parts.
T rebracket(const std::vector<T>& parts, std::mt19937& rng) {
    if (parts.size() == 1) return rng() % 2 ? parts[0] : T::concat({T::fin(0), parts[0]});
    std::size_t cut = 1 + rng() % (parts.size() - 1);
    std::vector<T> l(parts.begin(), parts.begin() + cut), r(parts.begin() + cut, parts.end());
    return T::concat({rebracket(l, rng), rebracket(r, rng)});
}

}  // namespace

TEST(OrderTerm, ParsePrintRoundTrip) {
    for (const char* s : {"(fin 3)", "(concat (fin 1) (omega (fin 2)))", "(omegastar (omega (fin 1)))", "(graded cn)",
                          "(graded cnstar)", "(rational)", "(concat)"}) {
        auto t = parse_order_term(s);
        EXPECT_EQ(t.str(), s);
        EXPECT_EQ(parse_order_term(t.str()), t);
    }
    EXPECT_THROW(parse_order_term("(fin x)"), Error);
    EXPECT_THROW(parse_order_term("(omega)"), Error);
    EXPECT_THROW(parse_order_term("(graded c)"), Error);
    EXPECT_THROW(parse_order_term("(sum (fin 1))"), Error);
    EXPECT_THROW(parse_order_term("(rational 1)"), Error);
}

TEST(OrderTerm, CatalogShape) {
    EXPECT_EQ(catalog_term(1, false), omega());
    EXPECT_EQ(catalog_term(1, true), omega_star());
    EXPECT_EQ(catalog_term(2, false), T::omega(T::omega_star(T::fin(1))));
    EXPECT_EQ(catalog_term(3, true), T::omega_star(T::omega(T::omega_star(T::fin(1)))));
    EXPECT_THROW(catalog_term(0, false), Error);
}

TEST(OrderTerm, NormalizeIsIdempotent) {
    auto t = T::concat({T::fin(0), T::concat({T::fin(2), T::fin(3)}), T::omega(T::fin(0)), omega(), T::concat({})});
    auto n = normalize(t);
    EXPECT_EQ(n, T::concat({T::fin(5), omega()}));
    EXPECT_EQ(normalize(n), n);
    EXPECT_EQ(normalize(T::concat({T::fin(0)})), T::fin(0));
}

TEST(Hdeg, Catalog) {
    for (std::size_t n = 1; n <= 5; ++n)
        for (bool st : {false, true}) {
            auto h = hdeg(catalog_term(n, st));
            EXPECT_EQ(h.kind, HdegTag::Kind::finite);
            EXPECT_TRUE(h.exact);
            EXPECT_EQ(h.value, n) << catalog_term(n, st).str();
        }
}

TEST(Hdeg, SmallCases) {
    EXPECT_EQ(hdeg(T::fin(0)).value, 0u);
    EXPECT_EQ(hdeg(T::fin(7)).value, 0u);
    EXPECT_EQ(hdeg(T::concat({T::fin(3), omega()})).value, 1u);
    EXPECT_EQ(hdeg(T::omega(omega())).value, 1u);  // omega^2 is still a well-order
    EXPECT_EQ(hdeg(T::concat({omega(), omega()})).value, 1u);
    EXPECT_EQ(hdeg(T::concat({omega_star(), T::fin(2)})).value, 1u);
    EXPECT_EQ(hdeg(zeta()).value, 2u);
    EXPECT_TRUE(hdeg(zeta()).exact);
    EXPECT_EQ(hdeg(T::omega(zeta())).value, 2u);
    EXPECT_EQ(hdeg(T::omega_star(zeta())).value, 2u);
    EXPECT_EQ(hdeg(T::concat({omega(), omega_star()})).value, 2u);
    // C_3 sitting inside a longer sum keeps degree 3
    auto h = hdeg(T::concat({T::fin(1), catalog_term(3, false), omega()}));
    EXPECT_EQ(h.value, 3u);
    EXPECT_TRUE(h.exact);
}

TEST(Hdeg, UpperBoundsAreFlagged) {
    // C_2 + C_2* has degree 2 or 3 depending on a finer analysis; we report the bound
    auto h = hdeg(T::concat({catalog_term(2, false), catalog_term(2, true)}));
    EXPECT_EQ(h.kind, HdegTag::Kind::finite);
    EXPECT_EQ(h.value, 3u);
    EXPECT_EQ(h.lower, 2u);
    EXPECT_FALSE(h.exact);
    EXPECT_NE(h.str().find("upper bound"), std::string::npos);
}

TEST(Hdeg, NonFiniteTags) {
    EXPECT_EQ(hdeg(T::graded(false)).kind, HdegTag::Kind::infinite);
    EXPECT_EQ(hdeg(T::graded(true)).str(), "≥ ω");
    EXPECT_EQ(hdeg(T::concat({omega(), T::graded(false)})).kind, HdegTag::Kind::infinite);
    EXPECT_EQ(hdeg(T::rational()).str(), "not scattered");
    EXPECT_EQ(hdeg(T::omega(T::concat({T::fin(1), T::rational()}))).kind, HdegTag::Kind::not_scattered);
    EXPECT_EQ(hdeg(T::concat({T::graded(false), T::rational()})).kind, HdegTag::Kind::not_scattered);
}

TEST(Hdeg, InvariantUnderRebracketing) {
    std::mt19937 rng(5);
    const std::vector<T> atoms = {T::fin(1), T::fin(2), omega(), omega_star(), zeta(), catalog_term(2, false),
                                  catalog_term(3, true), T::omega(zeta())};
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<T> parts;
        const std::size_t k = 1 + rng() % 4;
        for (std::size_t i = 0; i < k; ++i) parts.push_back(atoms[rng() % atoms.size()]);
        auto flat = hdeg(T::concat(parts));
        for (int r = 0; r < 3; ++r) {
            auto t = rebracket(parts, rng);
            ASSERT_EQ(hdeg(t), flat) << t.str();
            ASSERT_EQ(normalize(t), normalize(T::concat(parts))) << t.str();
        }
    }
}

TEST(Hdeg, DegreeOfSumAtLeastDegreeOfParts) {
    std::mt19937 rng(9);
    const std::vector<T> atoms = {T::fin(1), omega(), omega_star(), zeta(), catalog_term(2, true), catalog_term(3, false),
                                  catalog_term(4, true)};
    for (int trial = 0; trial < 200; ++trial) {
        auto a = atoms[rng() % atoms.size()], b = atoms[rng() % atoms.size()];
        auto s = hdeg(T::concat({a, b}));
        EXPECT_GE(s.value, hdeg(a).lower);
        EXPECT_GE(s.value, hdeg(b).lower);
        EXPECT_GE(s.lower, std::max(hdeg(a).lower, hdeg(b).lower)) << a.str() << " + " << b.str();
    }
}

TEST(Realize, FiniteAndOmega) {
    auto r = realize_prefix(T::fin(3), 10);
    EXPECT_EQ(r.chain.size(), 3u);
    EXPECT_EQ(r.chain.kind(), Kind::chain);
    r = realize_prefix(omega(), 4);
    EXPECT_EQ(order_ids(r.chain), (std::vector<std::string>{"w0.0", "w1.0", "w2.0", "w3.0"}));
    r = realize_prefix(omega_star(), 3);
    EXPECT_EQ(order_ids(r.chain), (std::vector<std::string>{"s2.0", "s1.0", "s0.0"}));
    EXPECT_EQ(realize_prefix(T::fin(0), 5).chain.size(), 0u);
    EXPECT_EQ(realize_prefix(T::omega(T::fin(0)), 5).chain.size(), 0u);
}

TEST(Realize, CatalogTwoOrder) {
    // C_2 = sum over omega of omega*: ids "w<j>.s<i>.0", ordered by j up then i down
    auto r = realize_prefix(catalog_term(2, false), 40);
    ASSERT_EQ(r.chain.size(), 40u);
    auto ids = order_ids(r.chain);
    auto key = [](const std::string& id) {
        auto dot = id.find('.');
        int j = std::stoi(id.substr(1, dot - 1));
        int i = std::stoi(id.substr(dot + 2, id.find('.', dot + 1) - dot - 2));
        return std::make_pair(j, -i);
    };
    for (std::size_t p = 1; p < ids.size(); ++p) EXPECT_LT(key(ids[p - 1]), key(ids[p])) << ids[p - 1] << " " << ids[p];
}

TEST(Realize, GrowsByInclusion) {
    for (auto t : {catalog_term(3, false), catalog_term(2, true), zeta(), T::graded(false), T::rational(),
                   T::concat({T::fin(2), T::omega(zeta()), T::rational()})}) {
        std::vector<std::string> prev;
        for (std::size_t b : {1, 2, 5, 13, 40, 100}) {
            auto r = realize_prefix(t, b);
            ASSERT_EQ(r.chain.size(), b) << t.str();
            auto ids = order_ids(r.chain);
            // prev is a subsequence of ids: the identity on ids is an order embedding
            std::size_t k = 0;
            for (const auto& id : ids)
                if (k < prev.size() && prev[k] == id) ++k;
            EXPECT_EQ(k, prev.size()) << t.str() << " budget " << b;
            prev = ids;
        }
    }
}

TEST(Realize, RationalMidpoints) {
    auto r = realize_prefix(T::rational(), 7);
    EXPECT_EQ(order_ids(r.chain), (std::vector<std::string>{"q1/8", "q1/4", "q3/8", "q1/2", "q5/8", "q3/4", "q7/8"}));
}

TEST(Realize, LargeCatalogBudget) {
    auto r = realize_prefix(catalog_term(3, false), 256);
    EXPECT_EQ(r.chain.size(), 256u);
    std::set<std::string> ids(r.chain.ids().begin(), r.chain.ids().end());
    EXPECT_EQ(ids.size(), 256u);
}
