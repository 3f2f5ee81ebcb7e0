#include <gtest/gtest.h>

#include <random>

#include "formula_suite.hpp"
#include "msow/formula.hpp"

using namespace msow;

namespace {

FinStructure chain(std::size_t n) { return FinStructure::make_chain(element_names(n)); }

Expr random_expr(std::mt19937_64& rng, std::vector<std::string>& scope, std::size_t depth_left, int size) {
    const int pick = static_cast<int>(rng() % 10);
    if (size <= 0 || scope.empty() || pick < 3) {
        if (scope.empty()) return f::truth(rng() & 1);
        auto v = [&] { return scope[rng() % scope.size()]; };
        switch (rng() % 6) {
        case 0: return f::sing(v());
        case 1: return f::empty(v());
        case 2: return f::subset(v(), v());
        case 3: return f::equal(v(), v());
        case 4: return f::member(v(), v());
        default: return f::le(v(), v());
        }
    }
    if (pick < 5 && depth_left > 0) {
        std::string name = "V" + std::to_string(scope.size());
        scope.push_back(name);
        auto body = random_expr(rng, scope, depth_left - 1, size - 1);
        scope.pop_back();
        return (rng() & 1) ? f::exists(name, body) : f::forall(name, body);
    }
    if (pick < 6) return f::neg(random_expr(rng, scope, depth_left, size - 1));
    std::vector<Expr> ks{random_expr(rng, scope, depth_left, size - 2), random_expr(rng, scope, depth_left, size - 2)};
    return (rng() & 1) ? f::conj(ks) : f::disj(ks);
}

FinStructure random_structure(std::mt19937_64& rng, std::size_t n) {
    auto names = element_names(n);
    switch (rng() % 3) {
    case 0: return FinStructure::make_set(names);
    case 1: return FinStructure::make_chain(names);
    default: {
        std::vector<std::size_t> pm(n, npos);
        for (std::size_t i = 1; i < n; ++i) pm[i] = (rng() % 4 == 0) ? npos : rng() % i;
        return FinStructure::make_tree_indexed(names, pm);
    }
    }
}

}  // namespace

TEST(Parse, RoundTripAndDepth) {
    auto fm = parse_formula("(exists X (and (sing X) (member X P0)))");
    EXPECT_EQ(fm.free, std::vector<std::string>{"P0"});
    EXPECT_EQ(fm.depth(), 1u);
    EXPECT_EQ(parse_formula(fm.str(), fm.free).str(), fm.str());
    EXPECT_EQ(parse_formula("(forall X (exists Y (subset X Y)))").depth(), 2u);
}

TEST(Parse, Errors) {
    EXPECT_THROW(parse_formula("(sing X Y)"), Error);
    EXPECT_THROW(parse_formula("(frob X)"), Error);
    EXPECT_THROW(parse_formula("(exists X (sing X)"), Error);
    EXPECT_THROW(parse_formula("(sing Z)", {"X"}), Error);
}

TEST(Direct, Examples) {
    auto ex = parse_formula("(exists X (sing X))");
    EXPECT_TRUE(eval_direct(ex, chain(2), {}));
    EXPECT_FALSE(eval_direct(ex, chain(0), {}));
    auto le = parse_formula("(le x y)", {"x", "y"});
    auto c = FinStructure::make_chain({"a", "b"});
    EXPECT_TRUE(eval_direct(le, c, {Subset{true, false}, Subset{false, true}}));
    EXPECT_FALSE(eval_direct(le, c, {Subset{false, true}, Subset{true, false}}));
    EXPECT_THROW(eval_direct(le, c, {Subset{true, false}}), Error);
}

TEST(OnTheory, Examples) {
    auto big = parse_formula("(exists X (and (not (sing X)) (not (empty X))))");
    EXPECT_TRUE(eval_on_theory(big, compute_theory(chain(2), 1)));
    EXPECT_FALSE(eval_on_theory(big, compute_theory(chain(1), 1)));
    auto deep = parse_formula("(forall X (exists Y (subset X Y)))");
    EXPECT_THROW(eval_on_theory(deep, compute_theory(chain(2), 1)), Error);
    EXPECT_THROW(eval_on_theory(parse_formula("(sing P)"), compute_theory(chain(2), 1)), Error);
}

TEST(OnTheory, SuiteAgreesExhaustivelyUpToThreeElements) {
    auto fs = suite::formulas();
    for (std::size_t n = 0; n <= 3; ++n)
        for (Kind k : {Kind::set, Kind::chain, Kind::tree})
            for (const auto& s : structures_of_size(k, n))
                for (const auto& fm : fs)
                    for_each_tuple(n, fm.arity(), [&](const std::vector<Mask>& m) {
                        std::vector<Subset> a;
                        for (auto x : m) a.push_back(from_mask(x, n));
                        auto t = compute_theory(s, a, 2);
                        ASSERT_EQ(eval_on_theory(fm, t), eval_direct(fm, s, a)) << fm.str() << " on " << s.fingerprint();
                    });
}

TEST(OnTheory, RandomFormulasAgree) {
    std::mt19937_64 rng(2024);
    int checked = 0;
    while (checked < 200) {
        const std::size_t arity = rng() % 3;
        std::vector<std::string> scope;
        for (std::size_t i = 0; i < arity; ++i) scope.push_back("F" + std::to_string(i));
        auto free = scope;
        auto e = random_expr(rng, scope, 2, 7);
        auto fm = make_formula(e, free.empty() ? std::vector<std::string>{} : free);
        if (fm.arity() != arity) continue;
        auto s = random_structure(rng, rng() % 6);
        std::vector<Subset> a;
        for (std::size_t i = 0; i < arity; ++i) {
            Subset x(s.size());
            for (std::size_t j = 0; j < s.size(); ++j) x[j] = rng() % 3 == 0;
            a.push_back(x);
        }
        auto t = compute_theory(s, a, fm.depth());
        ASSERT_EQ(eval_on_theory(fm, t), eval_direct(fm, s, a)) << fm.str();
        ++checked;
    }
}

TEST(OnTheory, HigherRankTheoryStillDecides) {
    auto fm = parse_formula("(exists X (sing X))");
    auto t = compute_theory(chain(3), 2);
    EXPECT_TRUE(eval_on_theory(fm, t));
}
