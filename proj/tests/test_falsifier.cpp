#include <gtest/gtest.h>

#include "formula_suite.hpp"
#include "msow/falsifier.hpp"

using namespace msow;

namespace {

const char* kMin = "(and (sing x) (member x X) (forall Y (implies (and (sing Y) (member Y X)) (le x Y))))";

std::vector<std::vector<Subset>> all_tuples(std::size_t m, std::size_t l) {
    std::vector<std::vector<Subset>> out;
    const Mask cells = Mask(1) << m;
    Mask total = 1;
    for (std::size_t i = 0; i < l; ++i) total *= cells;
    for (Mask code = 0; code < total; ++code) {
        std::vector<Subset> t;
        Mask c = code;
        for (std::size_t i = 0; i < l; ++i, c /= cells) t.push_back(from_mask(c % cells, m));
        out.push_back(t);
    }
    return out;
}

// Two elements with the same membership pattern in every parameter.
bool pigeonhole_pair(std::size_t m, const std::vector<Subset>& ps) {
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t y = x + 1; y < m; ++y) {
            bool same = true;
            for (const auto& p : ps) same = same && p[x] == p[y];
            if (same) return true;
        }
    return false;
}

}  // namespace

TEST(IndiscerniblePair, PureSetAboveThreshold) {
    for (std::size_t l = 0; l <= 2; ++l) {
        const std::size_t m = (std::size_t(1) << l) + 1;
        auto s = FinStructure::make_set(element_names(m, "a"));
        for (const auto& ps : all_tuples(m, l)) {
            auto w = find_indiscernible_pair(s, ps, 2);
            ASSERT_TRUE(w) << "l=" << l;
            EXPECT_TRUE(witness_holds(s, ps, *w));
            for (const auto& p : ps) EXPECT_EQ(p[w->x], p[w->y]);
        }
    }
}

TEST(IndiscerniblePair, PureSetAtThresholdAgreesWithPigeonhole) {
    // on a pure set, x and y are indiscernible exactly when no parameter
    // separates them (depth >= 1 can test membership of the singleton)
    for (std::size_t l = 0; l <= 2; ++l) {
        const std::size_t m = std::size_t(1) << l;
        if (m < 2) continue;
        auto s = FinStructure::make_set(element_names(m, "a"));
        bool separated = false;
        for (const auto& ps : all_tuples(m, l)) {
            auto w = find_indiscernible_pair(s, ps, 1);
            EXPECT_EQ(w.has_value(), pigeonhole_pair(m, ps));
            EXPECT_EQ(w.has_value(), find_indiscernible_pair(s, ps, 1, true).has_value());
            separated = separated || !w;
        }
        EXPECT_TRUE(separated) << "l=" << l;
    }
}

TEST(IndiscerniblePair, TwoElementChain) {
    auto c = FinStructure::make_chain({"a", "b"});
    auto w = find_indiscernible_pair(c, {}, 0);
    ASSERT_TRUE(w);
    EXPECT_EQ(w->x, c.find("a"));
    EXPECT_EQ(w->y, c.find("b"));
    EXPECT_FALSE(find_indiscernible_pair(c, {}, 1));
    EXPECT_FALSE(find_indiscernible_pair(c, {}, 1, true));
}

TEST(IndiscerniblePair, WitnessJson) {
    auto s = FinStructure::make_set(element_names(3, "a"));
    std::vector<Subset> ps{{true, false, false}};
    auto w = find_indiscernible_pair(s, ps, 2);
    ASSERT_TRUE(w);
    auto j = witness_to_json(s, *w);
    EXPECT_EQ(j["x"], "a1");
    EXPECT_EQ(j["y"], "a2");
    EXPECT_EQ(j["depth"], 2);
    EXPECT_EQ(j["theory_hash"], w->theory.hash_hex());
    EXPECT_EQ(j["structure"], s.fingerprint());
}

TEST(IndiscerniblePair, ParameterWidthChecked) {
    auto s = FinStructure::make_set(element_names(3, "a"));
    EXPECT_THROW(find_indiscernible_pair(s, {Subset(2, false)}, 1), Error);
}

TEST(ChoiceFunction, MinimumOnChain) {
    auto c = FinStructure::make_chain(element_names(5, "c"));
    auto v = check_choice_function(c, parse_formula(kMin, {"x", "X"}), {});
    EXPECT_TRUE(v.ok()) << v.name();
}

TEST(ChoiceFunction, MembershipChoosesSeveral) {
    auto c = FinStructure::make_chain(element_names(3, "c"));
    auto v = check_choice_function(c, parse_formula("(and (sing x) (member x X))", {"x", "X"}), {});
    EXPECT_EQ(v.kind, ChoiceVerdict::Kind::several_chosen);
    EXPECT_EQ(members_of(v.failing).size(), 2u);
}

TEST(ChoiceFunction, NoneAndOutside) {
    auto c = FinStructure::make_chain(element_names(3, "c"));
    auto none = check_choice_function(c, parse_formula("(and (sing x) (empty X))", {"x", "X"}), {});
    EXPECT_EQ(none.kind, ChoiceVerdict::Kind::none_chosen);
    // the parameter picks c2 whatever X is
    Subset p{false, false, true};
    auto out = check_choice_function(c, parse_formula("(and (sing x) (subset x P))", {"x", "X", "P"}), {p});
    EXPECT_EQ(out.kind, ChoiceVerdict::Kind::outside);
    EXPECT_EQ(out.chosen, std::vector<std::size_t>{2});
}

TEST(ChoiceFunction, ArityMismatch) {
    auto c = FinStructure::make_chain(element_names(3, "c"));
    EXPECT_THROW(check_choice_function(c, parse_formula(kMin, {"x", "X"}), {Subset(3, false)}), Error);
}

TEST(ChoiceFunction, WitnessDefeatsSuite) {
    // every suite formula with two free variables, read as (x, X), fails on
    // the witness set when its depth is within the witness depth
    auto s = FinStructure::make_set(element_names(3, "a"));
    auto w = find_indiscernible_pair(s, {}, 2);
    ASSERT_TRUE(w);
    Subset xs(3, false);
    xs[w->x] = xs[w->y] = true;
    std::vector<Subset> only{xs};
    std::size_t tried = 0;
    for (const auto& f : suite::formulas()) {
        if (f.arity() != 2 || f.depth() > w->depth) continue;
        ++tried;
        EXPECT_FALSE(check_choice_function(s, f, {}, &only).ok());
    }
    EXPECT_GT(tried, 5u);
}

TEST(Monochromatic, ConstantColoring) {
    auto c = FinStructure::make_chain(element_names(6, "c"));
    auto col = coloring_of(c, {}, 0);
    for (std::size_t k = 0; k <= 6; ++k) {
        auto r = find_monochromatic(col, k);
        ASSERT_TRUE(r);
        ASSERT_EQ(r->size(), k);
        for (std::size_t i = 0; i < k; ++i) EXPECT_EQ((*r)[i], i);
    }
    EXPECT_THROW(find_monochromatic(col, 7), Error);
}

TEST(Monochromatic, AllDistinctHasNoPair) {
    AdditiveColoring col;
    col.carrier = FinStructure::make_chain(element_names(4, "c"));
    std::size_t next = 0;
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a + 1; b < 4; ++b) {
            std::vector<bool> atoms(next + 1, false);
            atoms[next++] = true;
            col.color[{a, b}] = point_theory(atoms, 0);
        }
    EXPECT_FALSE(find_monochromatic(col, 3));
    auto two = find_monochromatic(col, 2);
    ASSERT_TRUE(two);  // any single pair is trivially monochromatic
    EXPECT_EQ(*two, (std::vector<std::size_t>{0, 1}));
}

TEST(Monochromatic, AgreesWithSubsetEnumeration) {
    auto c = FinStructure::make_chain(element_names(7, "c"));
    Subset p{true, false, true, false, true, false, true};
    for (std::size_t depth : {0u, 1u}) {
        auto col = coloring_of(c, {p}, depth);
        for (std::size_t k = 2; k <= 5; ++k) {
            // lexicographically first k-subset that is monochromatic
            std::optional<std::vector<std::size_t>> ref;
            std::vector<bool> pick(7, false);
            std::fill(pick.begin(), pick.begin() + k, true);
            do {
                std::vector<std::size_t> xs;
                for (std::size_t i = 0; i < 7; ++i)
                    if (pick[i]) xs.push_back(i);
                if (is_monochromatic(col, xs)) {
                    ref = xs;
                    break;
                }
            } while (std::prev_permutation(pick.begin(), pick.end()));
            auto r = find_monochromatic(col, k);
            ASSERT_EQ(r, ref) << depth << " " << k;
            if (r) EXPECT_TRUE(is_monochromatic(col, *r));
        }
    }
}
