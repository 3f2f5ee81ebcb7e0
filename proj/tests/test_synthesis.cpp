#include <gtest/gtest.h>

#include <random>

#include "msow/synthesis.hpp"
#include "msow/treeterm.hpp"

using namespace msow;

namespace {

FinStructure random_forest(std::mt19937& rng, std::size_t n, bool rooted) {
    std::vector<std::size_t> parent(n, npos);
    for (std::size_t i = 1; i < n; ++i)
        if (rooted || rng() % 5 != 0) parent[i] = rng() % i;
    return FinStructure::make_tree_indexed(element_names(n, "t"), parent);
}

FinStructure complete_binary(std::size_t h) {
    std::vector<std::string> ids;
    std::vector<std::size_t> parent;
    std::function<void(std::size_t, std::size_t, std::string)> go = [&](std::size_t d, std::size_t p, std::string id) {
        ids.push_back(id);
        parent.push_back(p);
        const auto me = ids.size() - 1;
        if (d == h) return;
        go(d + 1, me, id + "0");
        go(d + 1, me, id + "1");
    };
    go(0, npos, "b");
    return FinStructure::make_tree_indexed(ids, parent);
}

// rk(x) >= a+1 iff two incomparable elements strictly above x both have rk >= a.
std::vector<std::size_t> rank_fixpoint(const FinStructure& t) {
    const std::size_t n = t.size();
    std::vector<bool> at_least(n, true);  // rk >= a
    std::vector<std::size_t> rk(n, 0);
    for (std::size_t a = 0;; ++a) {
        std::vector<bool> next(n, false);
        bool any = false;
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t u = 0; u < n && !next[x]; ++u)
                for (std::size_t v = 0; v < n && !next[x]; ++v)
                    if (t.lt(x, u) && t.lt(x, v) && !t.comparable(u, v) && at_least[u] && at_least[v]) next[x] = true;
        for (std::size_t x = 0; x < n; ++x)
            if (next[x]) {
                rk[x] = a + 1;
                any = true;
            }
        if (!any) return rk;
        at_least = next;
    }
}

// Random nested presentation of the given depth over fresh ids.
Presentation random_presentation(std::mt19937& rng, std::size_t depth, const std::vector<bool>& dirs, std::size_t& next,
                                 std::size_t max_width) {
    Presentation p;
    p.ascending = dirs[depth - 1];
    const std::size_t w = 1 + rng() % max_width;
    for (std::size_t i = 0; i < w; ++i) {
        if (depth == 1) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "e%03zu", next++);
            p.ids.push_back(buf);
        } else {
            p.parts.push_back(random_presentation(rng, depth - 1, dirs, next, max_width));
        }
    }
    return p;
}

FinStructure chain_of(const Presentation& p) {
    std::vector<std::string> order;
    p.flatten(order);
    return FinStructure::make_chain(order);
}

std::vector<std::string> evaluated_order(const FinStructure& c, const WellOrderCertificate& cert) {
    ChainOrderEvaluator ev(c, cert);
    std::vector<std::string> out;
    for (auto i : ev.sorted()) out.push_back(c.id(i));
    return out;
}

}  // namespace

TEST(Rank, Examples) {
    auto chain = FinStructure::make_tree_indexed(element_names(4, "c"), {npos, 0, 1, 2});
    for (auto r : rank_map(chain)) EXPECT_EQ(r, 0u);
    auto star = FinStructure::make_tree_indexed(element_names(4, "s"), {npos, 0, 0, 0});
    EXPECT_EQ(rank_map(star)[0], 1u);
    for (std::size_t h = 0; h <= 4; ++h) {
        auto t = complete_binary(h);
        EXPECT_EQ(rank_map(t)[t.index_of("b")], h);
        EXPECT_EQ(rank_fixpoint(t), rank_map(t));
    }
    EXPECT_THROW(rank_map(FinStructure::make_chain({"a"})), Error);
}

TEST(Rank, AgreesWithFixpointOnAllSmallTrees) {
    std::size_t count = 0;
    for (std::size_t n = 1; n <= 6; ++n)
        for (const auto& t : structures_of_size(Kind::tree, n)) {
            auto rk = rank_map(t);
            ASSERT_EQ(rk, rank_fixpoint(t)) << structure_to_json(t).dump();
            for (std::size_t x = 0; x < t.size(); ++x)
                for (std::size_t y = 0; y < t.size(); ++y)
                    if (t.lt(x, y)) ASSERT_LE(rk[y], rk[x]);
            ++count;
        }
    EXPECT_GT(count, 100u);
}

TEST(Classify, Examples) {
    EXPECT_EQ(classify(parse_tree_term("(full-binary)")).kind, Verdict::Kind::embeds_binary);
    auto v = classify(parse_tree_term("(spine (rational))"));
    EXPECT_EQ(v.name(), "wild_ii");
    EXPECT_EQ(path_str(v.witness), "$");
    EXPECT_EQ(classify(parse_tree_term("(omega-node (leaf))")).name(), "wild_i");
    v = classify(parse_tree_term("(node (leaf) (leaf))"));
    EXPECT_EQ(v.kind, Verdict::Kind::tame);
    EXPECT_EQ(v.n_star, 2u);
    EXPECT_EQ(v.k_star, 0u);
    EXPECT_EQ(classify(parse_tree_term("(spine (graded cn))")).name(), "wild_iii");
    EXPECT_EQ(classify(parse_tree_term("(graded-fan cn)")).name(), "wild_i");
    v = classify(parse_tree_term("(node (leaf) (spine (concat (fin 2) (rational))))"));
    EXPECT_EQ(v.name(), "wild_ii");
    EXPECT_EQ(path_str(v.witness), "$.1");
    v = classify(parse_tree_term("(node (spine (omega (omegastar (fin 1))) (leaf)) (full-binary))"));
    EXPECT_EQ(v.kind, Verdict::Kind::embeds_binary);
    EXPECT_EQ(path_str(v.witness), "$.1");
    v = classify(parse_tree_term("(spine (omega (omegastar (fin 1))) (node (leaf) (leaf) (leaf)))"));
    EXPECT_EQ(v.kind, Verdict::Kind::tame);
    EXPECT_EQ(v.n_star, 3u);
    EXPECT_EQ(v.k_star, 2u);
    EXPECT_THROW(parse_tree_term("(spine)"), Error);
    EXPECT_THROW(parse_tree_term("(tree)"), Error);
}

TEST(Classify, WitnessAddressesSubterm) {
    for (const char* s : {"(node (leaf) (omega-node (leaf)))", "(node (spine (omega (fin 1)) (spine (rational))))",
                          "(node (node (full-binary)))", "(node (leaf) (spine (graded cnstar)))"}) {
        auto t = parse_tree_term(s);
        auto v = classify(t);
        ASSERT_NE(v.kind, Verdict::Kind::tame);
        EXPECT_NO_THROW(subterm(t, v.witness)) << s;
    }
}

TEST(Classify, InvariantUnderPermutingChildren) {
    const std::vector<std::string> parts = {"(leaf)", "(node (leaf) (leaf))", "(spine (omega (fin 1)))",
                                            "(spine (concat (omegastar (fin 1)) (omega (fin 1))) (leaf))",
                                            "(node (leaf) (leaf) (leaf) (leaf))", "(spine (rational))", "(omega-node (leaf))"};
    std::mt19937 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::string> kids;
        for (std::size_t i = 0, k = 1 + rng() % 4; i < k; ++i) kids.push_back(parts[rng() % parts.size()]);
        auto text = [&] {
            std::string s = "(node";
            for (auto& k : kids) s += " " + k;
            return s + ")";
        };
        auto v = classify(parse_tree_term(text()));
        std::shuffle(kids.begin(), kids.end(), rng);
        EXPECT_TRUE(v.same_verdict(classify(parse_tree_term(text())))) << text();
    }
}

TEST(Classify, ClassBoundMatchesFiniteTruncations) {
    for (const char* s : {"(leaf)", "(node (leaf) (leaf))", "(node (node (leaf) (leaf) (leaf)) (leaf))",
                          "(spine (omega (fin 1)) (leaf))", "(spine (fin 3))", "(spine (fin 1) (node (leaf) (leaf)))",
                          "(node (spine (omegastar (fin 1)) (node (leaf) (leaf) (leaf))) (leaf))"}) {
        auto t = parse_tree_term(s);
        auto fin = realize_tree(t, 3, 5);
        EXPECT_EQ(classify(t).n_star, max_class_count(fin)) << s;
    }
    // omega many successors: the truncations grow with the width
    auto w = parse_tree_term("(omega-node (leaf))");
    EXPECT_EQ(max_class_count(realize_tree(w, 3, 4)), 3u);
    EXPECT_EQ(max_class_count(realize_tree(w, 6, 4)), 6u);
}

TEST(ChainSynthesis, DegreeOne) {
    auto c = FinStructure::make_chain({"a", "b", "c"});
    Presentation p;
    p.ids = {"a", "b", "c"};
    auto cert = synth_chain_wellorder(c, p, 1);
    EXPECT_TRUE(cert.params.empty());
    EXPECT_EQ(evaluated_order(c, cert), (std::vector<std::string>{"a", "b", "c"}));
    p.ascending = false;
    cert = synth_chain_wellorder(c, p, 1);
    EXPECT_EQ(evaluated_order(c, cert), (std::vector<std::string>{"c", "b", "a"}));
}

TEST(ChainSynthesis, CatalogTwoPrefix) {
    // C_2: omega many blocks, each of type omega*
    auto j = json::parse(R"({"direction":"asc","parts":[
        {"direction":"desc","parts":["a0","a1","a2"]},
        {"direction":"desc","parts":["b0","b1","b2"]},
        {"direction":"desc","parts":["c0","c1","c2"]}]})");
    auto p = presentation_from_json(j);
    auto c = chain_of(p);
    auto cert = synth_chain_wellorder(c, p, 2);
    ASSERT_EQ(cert.params.size(), 1u);
    EXPECT_EQ(cert.params[0].members, (std::vector<std::string>{"a0", "a1", "a2", "c0", "c1", "c2"}));
    EXPECT_EQ(evaluated_order(c, cert),
              (std::vector<std::string>{"a2", "a1", "a0", "b2", "b1", "b0", "c2", "c1", "c0"}));
    EXPECT_EQ(evaluated_order(c, cert), presentation_reference_order(p));
    EXPECT_TRUE(verify_certificate(c, cert).accepted);
}

TEST(ChainSynthesis, MatchesLexicographicReference) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + trial % 4;
        std::vector<bool> dirs;
        for (std::size_t k = 0; k < n; ++k) dirs.push_back(rng() % 2);
        std::size_t next = 0;
        auto p = random_presentation(rng, n, dirs, next, n <= 2 ? 5 : 3);
        auto c = chain_of(p);
        auto cert = synth_chain_wellorder(c, p, n);
        ASSERT_EQ(cert.params.size(), n - 1);
        ASSERT_EQ(evaluated_order(c, cert), presentation_reference_order(p)) << presentation_to_json(p).dump();
        ASSERT_TRUE(verify_certificate(c, cert).accepted);
    }
}

TEST(ChainSynthesis, Errors) {
    auto p = presentation_from_json(json::parse(R"({"parts":[{"parts":["a"]},{"parts":["b"]}]})"));
    auto c = chain_of(p);
    EXPECT_THROW(synth_chain_wellorder(c, p, 3), Error);
    EXPECT_THROW(synth_chain_wellorder(FinStructure::make_chain({"b", "a"}), p, 2), Error);
    auto mixed = presentation_from_json(
        json::parse(R"({"parts":[{"direction":"asc","parts":["a"]},{"direction":"desc","parts":["b"]}]})"));
    EXPECT_THROW(synth_chain_wellorder(c, mixed, 2), Error);
    EXPECT_THROW(presentation_from_json(json::parse(R"({"parts":["a",{"parts":["b"]}]})")), Error);
    EXPECT_THROW(presentation_from_json(json::parse(R"({"parts":["a"],"extra":1})")), Error);
}

TEST(TreeSynthesis, SingleChain) {
    auto t = FinStructure::make_tree_indexed(element_names(4, "c"), {npos, 0, 1, 2});
    auto s = synth_tree_wellorder(t);
    ASSERT_EQ(s.gamma.size(), 1u);
    EXPECT_EQ(s.gamma[0].branch.size(), 4u);
    auto rep = verify_certificate(t, s.cert);
    EXPECT_TRUE(rep.accepted);
}

TEST(TreeSynthesis, RootWithTwoLeaves) {
    auto t = FinStructure::make_tree_indexed({"r", "x", "y"}, {npos, 0, 0});
    auto s = synth_tree_wellorder(t);
    ASSERT_EQ(s.gamma.size(), 2u);  // main branch r-x, then y
    EXPECT_EQ(s.gamma[0].branch, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(s.gamma[1].branch, (std::vector<std::size_t>{2}));
    EXPECT_EQ(s.gamma[1].attach, 0u);
    VerifyReport rep;
    TreeOrderEvaluator ev(t, s.cert, rep);
    ASSERT_TRUE(rep.accepted);
    // clause (a): r < x on the main branch; clause (b): the branch below y's sub-branch
    EXPECT_TRUE(ev.less(0, 1));
    EXPECT_TRUE(ev.less(1, 2));
    EXPECT_TRUE(ev.less(0, 2));
}

TEST(TreeSynthesis, ForestUsesRootMarkers) {
    auto t = FinStructure::make_tree_indexed(element_names(5, "f"), {npos, 0, npos, 2, npos});
    auto s = synth_tree_wellorder(t);
    auto r = s.cert.param("R");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->members.size(), 2u);
    EXPECT_TRUE(verify_certificate(t, s.cert).accepted);
}

TEST(TreeSynthesis, EmptyTreeAccepted) {
    auto t = FinStructure::make_tree({}, {});
    auto s = synth_tree_wellorder(t);
    EXPECT_TRUE(verify_certificate(t, s.cert).accepted);
}

TEST(TreeSynthesis, RandomTreesVerify) {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        auto t = random_forest(rng, 1 + rng() % 8, trial % 3 != 0);
        auto s = synth_tree_wellorder(t);
        auto rep = verify_certificate(t, s.cert);
        ASSERT_TRUE(rep.accepted) << structure_to_json(t).dump() << " " << rep.violations.front();
        // the sub-branches partition the tree
        std::vector<int> seen(t.size(), 0);
        for (const auto& g : s.gamma)
            for (auto x : g.branch) ++seen[x];
        for (auto k : seen) ASSERT_EQ(k, 1);
        // largest class rank strictly drops along Gamma below the first level
        for (const auto& g : s.gamma)
            if (g.parent != npos && s.gamma[g.parent].parent != npos) ASSERT_LT(g.gamma, s.gamma[g.parent].gamma);
        ASSERT_LE(s.gamma.back().index.size(), t.size());
    }
}

TEST(TreeSynthesis, CertificateJsonRoundTrip) {
    std::mt19937 rng(4);
    auto t = random_forest(rng, 7, true);
    auto s = synth_tree_wellorder(t);
    auto j = certificate_to_json(s.cert);
    auto back = certificate_from_json(json::parse(j.dump()));
    EXPECT_EQ(certificate_to_json(back), j);
    EXPECT_TRUE(verify_certificate(t, back).accepted);
    j["bogus"] = 1;
    EXPECT_THROW(certificate_from_json(j), Error);
}

TEST(TreeSynthesis, MutationsAreRejected) {
    std::mt19937 rng(8);
    std::size_t total = 0;
    for (int trial = 0; trial < 60; ++trial) {
        auto t = random_forest(rng, 3 + rng() % 5, trial % 4 != 0);
        auto s = synth_tree_wellorder(t);
        for (const auto& m : certificate_mutations(t, s)) {
            auto rep = verify_certificate(t, m.cert);
            ASSERT_FALSE(rep.accepted) << m.description << " on " << structure_to_json(t).dump();
            ASSERT_FALSE(rep.violations.empty());
            ++total;
        }
    }
    EXPECT_GT(total, 100u);
}

TEST(TreeSynthesis, SiblingColourClashIsLocated) {
    auto t = FinStructure::make_tree_indexed({"r", "a", "b", "c"}, {npos, 0, 0, 0});
    auto s = synth_tree_wellorder(t);
    bool found = false;
    for (const auto& m : certificate_mutations(t, s)) {
        if (m.description.find("like its sibling") == std::string::npos) continue;
        auto rep = verify_certificate(t, m.cert);
        ASSERT_FALSE(rep.accepted);
        EXPECT_NE(rep.violations.front().find("same colour"), std::string::npos) << rep.violations.front();
        found = true;
    }
    EXPECT_TRUE(found);
}
