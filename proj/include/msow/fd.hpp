#pragma once

// Functional-dependency checks for the tree composition theorems.
//
// Each theorem says that some antecedent data (partial theories of pieces,
// labelled by the theories of other pieces) determines Th^n of the whole
// structure. We sample small instances, bucket them by antecedent, and report
// any bucket holding two different consequents.

#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "msow/composition.hpp"
#include "msow/io.hpp"

namespace msow {

enum class FDTheorem { chains, binary_graft, successors, branches, embeddings };

inline const char* fd_theorem_name(FDTheorem t) {
    switch (t) {
    case FDTheorem::chains: return "1.8";
    case FDTheorem::binary_graft: return "1.11";
    case FDTheorem::successors: return "1.12";
    case FDTheorem::branches: return "1.13";
    case FDTheorem::embeddings: return "1.15";
    }
    return "?";
}

inline FDTheorem parse_fd_theorem(const std::string& s) {
    for (auto t : {FDTheorem::chains, FDTheorem::binary_graft, FDTheorem::successors, FDTheorem::branches, FDTheorem::embeddings})
        if (s == fd_theorem_name(t)) return t;
    throw Error("unknown theorem '" + s + "' (expected 1.8, 1.11, 1.12, 1.13 or 1.15)");
}

struct SamplerConfig {
    std::size_t trials = 200;  // instance pairs
    std::uint64_t seed = 1;
    std::size_t max_elements = 6;
    std::size_t arity = 1;  // length of the sampled tuple X
    // 1.15 only. The literal antecedent Th^m(Bush_S(Y); y, Q) has counterexamples:
    // it forgets which image nodes are 0-successors and whether Bush_S(Y) nodes
    // lie in P. side_labels adds a 0-successor marker, trace_params adds P ∩ Bush_S(Y).
    bool side_labels = true;
    bool trace_params = true;
};

struct FDInstance {
    std::uint64_t seed = 0;
    json description;
    std::string antecedent;  // key; equal strings mean equal antecedent data
    Theory consequent;
};

struct FDViolation {
    FDInstance a, b;
};

struct FDReport {
    FDTheorem theorem = FDTheorem::chains;
    std::size_t n = 0, m = 0;
    SamplerConfig config;
    std::size_t instances = 0;
    std::size_t antecedent_classes = 0;
    std::size_t comparable_pairs = 0;  // pairs of distinct instances with equal antecedents
    std::vector<FDViolation> violations;

    bool ok() const { return violations.empty(); }
};

namespace detail {

inline std::uint64_t instance_seed(std::uint64_t base, std::size_t i) { return mix(base * 0x9e3779b97f4a7c15ull + i + 1); }

inline std::string key_of(const std::vector<Theory>& ts) {
    std::string k;
    for (auto t : ts) {
        k += std::to_string(t.id());
        k.push_back(',');
    }
    return k;
}

inline Subset random_subset(std::mt19937_64& rng, std::size_t n) {
    Subset x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rng() & 1;
    return x;
}

inline std::vector<Subset> random_tuple(std::mt19937_64& rng, std::size_t n, std::size_t arity) {
    std::vector<Subset> t;
    for (std::size_t i = 0; i < arity; ++i) t.push_back(random_subset(rng, n));
    return t;
}

inline FinStructure named(const FinStructure& s, const std::vector<Subset>& xs, const std::string& prefix = "X") {
    std::vector<Predicate> ps = s.predicates();
    for (std::size_t i = 0; i < xs.size(); ++i) ps.push_back({prefix + std::to_string(i), xs[i]});
    return s.with_predicates(ps);
}

inline FinStructure random_tree(std::mt19937_64& rng, std::size_t n, bool rooted) {
    std::vector<std::size_t> pm(n, npos);
    for (std::size_t i = 1; i < n; ++i) pm[i] = (!rooted && rng() % 4 == 0) ? npos : rng() % i;
    return FinStructure::make_tree_indexed(element_names(n), pm);
}

/// Theory of the sub-structure on `keep` with the structure's predicates restricted.
inline Theory piece_theory(const FinStructure& s, const std::vector<std::size_t>& keep, std::size_t depth) {
    return compute_theory(s.restrict_to(keep), depth);
}

/// Sorted distinct theories and, for each, the members of `domain` carrying it.
inline std::vector<Theory> distinct_sorted(std::vector<Theory> ts) {
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

inline FDInstance sample_chains(std::uint64_t seed, std::size_t n, std::size_t m, const SamplerConfig& cfg) {
    std::mt19937_64 rng(seed);
    const std::size_t cap = std::min<std::size_t>(3, cfg.max_elements);
    auto c = FinStructure::make_chain(element_names(rng() % (cap + 1), "c"));
    auto d = FinStructure::make_chain(element_names(rng() % (cap + 1), "d"));
    auto ca = named(c, random_tuple(rng, c.size(), cfg.arity));
    auto db = named(d, random_tuple(rng, d.size(), cfg.arity));
    FDInstance in;
    in.seed = seed;
    in.antecedent = key_of({compute_theory(ca, m), compute_theory(db, m)});
    in.consequent = compute_theory(concat_chains(ca, db), n);
    in.description = {{"left", structure_to_json(ca)}, {"right", structure_to_json(db)}};
    return in;
}

inline std::set<std::string> random_binary_tree(std::mt19937_64& rng, std::size_t size) {
    std::set<std::string> t{""};
    while (t.size() < size) {
        std::vector<std::string> slots;
        for (const auto& s : t)
            for (char d : {'0', '1'})
                if (!t.count(s + d)) slots.push_back(s + d);
        t.insert(slots[rng() % slots.size()]);
    }
    return t;
}

inline FDInstance sample_graft(std::uint64_t seed, std::size_t n, std::size_t m, const SamplerConfig& cfg) {
    std::mt19937_64 rng(seed);
    const std::size_t budget = std::max<std::size_t>(cfg.max_elements, 2);
    GraftSpec g;
    g.base = random_binary_tree(rng, 1 + rng() % std::min<std::size_t>(3, budget - 1));
    std::size_t used = g.base.size();
    std::vector<std::pair<std::string, int>> slots;
    for (const auto& x : g.base)
        for (int d = 0; d < 2; ++d)
            if (!g.base.count(x + char('0' + d))) slots.push_back({x, d});
    std::shuffle(slots.begin(), slots.end(), rng);
    for (const auto& s : slots) {
        if (used >= budget || rng() % 2) continue;
        std::size_t sz = 1 + rng() % std::min<std::size_t>(2, budget - used);
        g.graft[s] = random_binary_tree(rng, sz);
        used += sz;
    }
    auto nt = graft_compose(g);
    auto xs = random_tuple(rng, nt.size(), cfg.arity);
    auto nx = named(nt, xs);
    // label theories of grafted pieces
    std::map<std::pair<std::string, int>, Theory> label;
    for (const auto& [slot, sub] : g.graft) {
        std::vector<std::size_t> keep;
        std::string head = slot.first + char('0' + slot.second);
        for (const auto& y : sub) keep.push_back(nx.index_of(binary_id(head + y)));
        label[slot] = piece_theory(nx, keep, n);
    }
    std::vector<Theory> all;
    for (const auto& [s, t] : label) all.push_back(t);
    auto ts = distinct_sorted(all);
    std::vector<std::size_t> base_idx;
    for (const auto& x : g.base) base_idx.push_back(nx.index_of(binary_id(x)));
    auto mt = nx.restrict_to(base_idx);
    for (int side = 0; side < 2; ++side)
        for (std::size_t k = 0; k < ts.size(); ++k) {
            std::vector<std::string> members;
            for (const auto& [slot, t] : label)
                if (slot.second == side && t == ts[k]) members.push_back(binary_id(slot.first));
            mt = mt.add_predicate((side == 0 ? "L" : "R") + std::to_string(k), members);
        }
    auto key = ts;
    key.insert(key.begin(), compute_theory(mt, m));
    FDInstance in;
    in.seed = seed;
    in.antecedent = key_of(key);
    in.consequent = compute_theory(nx, n);
    json graft = json::array();
    for (const auto& [slot, sub] : g.graft) graft.push_back({{"node", slot.first}, {"direction", slot.second}, {"tree", sub}});
    in.description = {{"base", g.base}, {"graft", graft}, {"composed", structure_to_json(nx)}};
    return in;
}

inline FDInstance sample_successors(std::uint64_t seed, std::size_t n, std::size_t m, const SamplerConfig& cfg) {
    std::mt19937_64 rng(seed);
    const std::size_t size = 1 + rng() % cfg.max_elements;
    const bool rooted = rng() % 4 != 0;
    auto t = random_tree(rng, size, rooted);
    auto tx = named(t, random_tuple(rng, size, cfg.arity));
    std::vector<std::size_t> a;
    if (rng() % 5 != 0) a = t.ancestors(rng() % size);
    auto d = segment_decompose(tx, a);
    auto low = tx.restrict_to(d.below);
    {
        Subset in_a(low.size(), false);
        for (auto x : a) in_a[low.index_of(tx.id(x))] = true;
        low = low.with_predicates([&] {
            auto ps = low.predicates();
            ps.push_back({"A", in_a});
            return ps;
        }());
    }
    std::vector<Theory> labels;
    for (const auto& cls : d.classes) labels.push_back(piece_theory(tx, cls, n));
    auto ts = distinct_sorted(labels);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < d.classes.size(); ++i) {
        std::string id = std::to_string(i);
        ids.push_back("i" + std::string(3 - std::min<std::size_t>(3, id.size()), '0') + id);
    }
    auto ia = FinStructure::make_set(ids);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        std::vector<std::string> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == ts[k]) members.push_back(ids[i]);
        ia = ia.add_predicate("P" + std::to_string(k), members);
    }
    std::vector<Theory> key{compute_theory(low, m)};
    key.insert(key.end(), ts.begin(), ts.end());
    key.push_back(compute_theory(ia, m));
    FDInstance in;
    in.seed = seed;
    in.antecedent = key_of(key);
    in.consequent = compute_theory(tx, n);
    std::vector<std::string> seg;
    for (auto x : a) seg.push_back(tx.id(x));
    in.description = {{"structure", structure_to_json(tx)}, {"segment", seg}, {"classes", d.classes.size()}};
    return in;
}

inline FDInstance sample_branches(std::uint64_t seed, std::size_t n, std::size_t m, const SamplerConfig& cfg) {
    std::mt19937_64 rng(seed);
    const std::size_t size = 1 + rng() % cfg.max_elements;
    auto t = random_tree(rng, size, true);
    auto tx = named(t, random_tuple(rng, size, cfg.arity));
    std::vector<std::size_t> leaves;
    for (std::size_t x = 0; x < size; ++x)
        if (t.children(x).empty()) leaves.push_back(x);
    auto b = t.ancestors(leaves[rng() % leaves.size()]);
    auto d = branch_decompose(tx, b);
    std::vector<Theory> labels;
    for (auto x : d.branch) labels.push_back(piece_theory(tx, d.hang.at(x), n));
    auto ts = distinct_sorted(labels);
    auto chain = tx.restrict_to(d.branch);  // a one-path tree
    std::vector<std::string> order;
    for (auto x : d.branch) order.push_back(tx.id(x));
    auto bc = FinStructure::make_chain(order);
    std::vector<Predicate> ps;
    for (const auto& p : chain.predicates()) {
        Subset s(bc.size(), false);
        for (std::size_t i = 0; i < chain.size(); ++i) s[bc.index_of(chain.id(i))] = p.members[i];
        ps.push_back({p.name, s});
    }
    for (std::size_t k = 0; k < ts.size(); ++k) {
        Subset s(bc.size(), false);
        for (std::size_t i = 0; i < d.branch.size(); ++i)
            if (labels[i] == ts[k]) s[bc.index_of(tx.id(d.branch[i]))] = true;
        ps.push_back({"P" + std::to_string(k), s});
    }
    bc = bc.with_predicates(ps);
    std::vector<Theory> key{compute_theory(bc, m)};
    key.insert(key.end(), ts.begin(), ts.end());
    FDInstance in;
    in.seed = seed;
    in.antecedent = key_of(key);
    in.consequent = compute_theory(tx, n);
    in.description = {{"structure", structure_to_json(tx)}, {"branch", order}};
    return in;
}

inline FDInstance sample_embeddings(std::uint64_t seed, std::size_t n, std::size_t m, const SamplerConfig& cfg) {
    std::mt19937_64 rng(seed);
    // image of the binary tree of height 1 (height 2 when room allows)
    const int height = cfg.max_elements >= 9 && rng() % 2 ? 2 : 1;
    std::vector<std::string> ids{"n0"};
    std::map<std::string, std::string> parent;
    std::map<std::string, std::size_t> image_pos;  // seq -> index into ids
    image_pos[""] = 0;
    auto fresh = [&](std::string p) {
        std::string id = "n" + std::to_string(ids.size());
        ids.push_back(id);
        parent[id] = p;
        return id;
    };
    std::size_t budget = cfg.max_elements;
    std::vector<std::string> frontier{""};
    for (int h = 0; h < height; ++h) {
        std::vector<std::string> next;
        for (const auto& s : frontier) {
            std::string at = ids[image_pos[s]];
            const std::size_t need = (height - h) * 2;
            if (ids.size() + need + 1 <= budget && rng() % 2) at = fresh(at);  // split point above y
            for (char d : {'0', '1'}) {
                std::string below = at;
                if (ids.size() + need + 1 <= budget && rng() % 3 == 0) below = fresh(below);
                fresh(below);
                image_pos[s + d] = ids.size() - 1;
                next.push_back(s + d);
            }
        }
        frontier = next;
    }
    while (ids.size() < budget && rng() % 3 != 0) fresh(ids[rng() % ids.size()]);
    auto host = FinStructure::make_tree(ids, parent);
    std::map<std::string, std::size_t> image;
    for (const auto& [s, p] : image_pos) image[s] = host.index_of(ids[p]);
    EmbeddingFrame frame(host, image);
    auto ps = random_tuple(rng, host.size(), cfg.arity);
    auto hp = named(host, ps, "P");
    // an antichain Y of the image, and y in Y
    std::vector<std::vector<std::string>> antichains;
    std::vector<std::string> seqs;
    for (const auto& [s, x] : image) seqs.push_back(s);
    for (Mask bits = 1; bits < (Mask(1) << seqs.size()); ++bits) {
        std::vector<std::string> ys;
        for (std::size_t i = 0; i < seqs.size(); ++i)
            if (bits >> i & 1) ys.push_back(seqs[i]);
        bool anti = true;
        for (const auto& u : ys)
            for (const auto& v : ys)
                if (u != v && v.compare(0, u.size(), u) == 0) anti = false;
        if (anti) antichains.push_back(ys);
    }
    auto ys = antichains[rng() % antichains.size()];
    const std::string y = ys[rng() % ys.size()];
    std::vector<std::size_t> bush;
    for (const auto& [s, x] : image) {
        bool below = false;
        for (const auto& u : ys) below = below || u.compare(0, s.size(), s) == 0;
        if (below) bush.push_back(x);
    }
    std::sort(bush.begin(), bush.end());
    std::vector<std::vector<Theory>> labels;
    for (auto z : bush) {
        auto regions = region_decompose(frame, z);
        std::vector<Theory> lab;
        for (const auto& r : regions) lab.push_back(piece_theory(hp, r, n));
        labels.push_back(lab);
    }
    auto distinct = labels;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    auto bt = cfg.trace_params ? hp.restrict_to(bush) : host.restrict_to(bush);
    bt = bt.add_predicate("y", {host.id(image.at(y))});
    if (cfg.side_labels) {
        std::vector<std::string> left;
        for (const auto& [s, x] : image)
            if (!s.empty() && s.back() == '0' && std::binary_search(bush.begin(), bush.end(), x)) left.push_back(host.id(x));
        bt = bt.add_predicate("S0", left);
    }
    for (std::size_t k = 0; k < distinct.size(); ++k) {
        std::vector<std::string> members;
        for (std::size_t i = 0; i < bush.size(); ++i)
            if (labels[i] == distinct[k]) members.push_back(host.id(bush[i]));
        bt = bt.add_predicate("Q" + std::to_string(k), members);
    }
    std::vector<Theory> key{compute_theory(bt, m)};
    for (const auto& lab : distinct) key.insert(key.end(), lab.begin(), lab.end());
    std::vector<std::string> yids;
    for (const auto& u : ys) yids.push_back(host.id(image.at(u)));
    auto whole = host.add_predicate("y", {host.id(image.at(y))}).add_predicate("Y", yids);
    std::vector<Predicate> wp = whole.predicates();
    for (const auto& p : hp.predicates()) wp.push_back(p);
    FDInstance in;
    in.seed = seed;
    in.antecedent = key_of(key);
    in.consequent = compute_theory(whole.with_predicates(wp), n);
    json img = json::object();
    for (const auto& [s, x] : image) img[s.empty() ? "<root>" : s] = host.id(x);
    in.description = {{"host", structure_to_json(hp)}, {"image", img}, {"Y", yids}, {"y", host.id(image.at(y))}};
    return in;
}

}  // namespace detail

/// Regenerate one sampled instance; violations are re-checkable from seeds.
inline FDInstance sample_fd_instance(FDTheorem th, std::uint64_t seed, std::size_t n, std::size_t m, const SamplerConfig& cfg) {
    switch (th) {
    case FDTheorem::chains: return detail::sample_chains(seed, n, m, cfg);
    case FDTheorem::binary_graft: return detail::sample_graft(seed, n, m, cfg);
    case FDTheorem::successors: return detail::sample_successors(seed, n, m, cfg);
    case FDTheorem::branches: return detail::sample_branches(seed, n, m, cfg);
    case FDTheorem::embeddings: return detail::sample_embeddings(seed, n, m, cfg);
    }
    throw Error("unknown theorem");
}

inline void check_fd_bounds(std::size_t n, std::size_t m, const SamplerConfig& cfg) {
    if (m < n) throw Error("verify_fd: m must be at least n");
    if (cfg.max_elements > 8 || m > 4 || cfg.arity > 2)
        throw Error("verify_fd: bounds too large for enumeration (max 8 elements, m <= 4, arity <= 2)");
    if (cfg.max_elements == 0) throw Error("verify_fd: max_elements must be positive");
}

/// Bucket instances by antecedent and collect disagreeing consequents.
inline FDReport fd_report_from(FDTheorem th, std::size_t n, std::size_t m, const SamplerConfig& cfg, std::vector<FDInstance> inst) {
    FDReport r;
    r.theorem = th;
    r.n = n;
    r.m = m;
    r.config = cfg;
    r.instances = inst.size();
    std::map<std::string, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < inst.size(); ++i) buckets[inst[i].antecedent].push_back(i);
    r.antecedent_classes = buckets.size();
    for (const auto& [k, v] : buckets) {
        r.comparable_pairs += v.size() * (v.size() - 1) / 2;
        for (std::size_t j = 1; j < v.size(); ++j)
            if (inst[v[j]].consequent != inst[v[0]].consequent) r.violations.push_back({inst[v[0]], inst[v[j]]});
    }
    std::sort(r.violations.begin(), r.violations.end(),
              [](const FDViolation& x, const FDViolation& y) { return std::pair(x.a.seed, x.b.seed) < std::pair(y.a.seed, y.b.seed); });
    return r;
}

inline FDReport verify_fd(FDTheorem th, std::size_t n, std::size_t m, const SamplerConfig& cfg = {}) {
    check_fd_bounds(n, m, cfg);
    std::vector<FDInstance> inst;
    for (std::size_t i = 0; i < 2 * cfg.trials; ++i)
        inst.push_back(sample_fd_instance(th, detail::instance_seed(cfg.seed, i), n, m, cfg));
    return fd_report_from(th, n, m, cfg, std::move(inst));
}

/// Every pair of chains with at most `max_len` elements and every tuple of the
/// given arity (the sum theorem at desk scale, without sampling).
inline FDReport verify_chain_sums_exhaustive(std::size_t max_len, std::size_t arity, std::size_t m) {
    std::vector<std::pair<FinStructure, Theory>> parts;
    for (std::size_t len = 0; len <= max_len; ++len) {
        auto c = FinStructure::make_chain(element_names(len, "c"));
        for_each_tuple(len, arity, [&](const std::vector<Mask>& ms) {
            std::vector<Subset> xs;
            for (auto x : ms) xs.push_back(from_mask(x, len));
            auto cx = detail::named(c, xs);
            parts.push_back({cx, compute_theory(cx, m)});
        });
    }
    FDReport r;
    r.theorem = FDTheorem::chains;
    r.n = r.m = m;
    r.config.max_elements = 2 * max_len;
    r.config.arity = arity;
    r.config.trials = parts.size() * parts.size();
    std::size_t k = 0;
    for (const auto& [c, tc] : parts)
        for (const auto& [d, td] : parts) {
            ++r.instances;
            auto direct = compute_theory(concat_chains(c, d), m);
            if (sum(tc, td) != direct) {
                FDInstance a;
                a.seed = k;
                a.description = {{"left", structure_to_json(c)}, {"right", structure_to_json(d)}};
                a.consequent = direct;
                r.violations.push_back({a, a});
            }
            ++k;
        }
    return r;
}

inline json fd_report_to_json(const FDReport& r) {
    json v = json::array();
    for (const auto& x : r.violations) {
        auto inst = [](const FDInstance& i) {
            return json{{"seed", i.seed}, {"instance", i.description}, {"consequent_hash", i.consequent.valid() ? i.consequent.hash_hex() : ""}};
        };
        v.push_back({{"a", inst(x.a)}, {"b", inst(x.b)}});
    }
    return {{"theorem", fd_theorem_name(r.theorem)},
            {"n", r.n},
            {"m", r.m},
            {"trials", r.config.trials},
            {"seed", r.config.seed},
            {"max_elements", r.config.max_elements},
            {"arity", r.config.arity},
            {"side_labels", r.config.side_labels},
            {"trace_params", r.config.trace_params},
            {"instances", r.instances},
            {"antecedent_classes", r.antecedent_classes},
            {"comparable_pairs", r.comparable_pairs},
            {"violations", v},
            {"ok", r.ok()}};
}

}  // namespace msow
