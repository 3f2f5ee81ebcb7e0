#pragma once

// JSON encodings of structures and theories.
//
// Structure file:
//   {"kind": "chain"|"tree"|"set",
//    "elements": ["a", "b", ...],
//    "order": {"child": "parent", ...}    (tree)
//           | {"id": rank, ...}           (chain, integer ranks)
//           | {}                          (set, may be omitted)
//    "predicates": [{"name": "P", "members": ["a", ...]}, ...]}
//
// Theory file:
//   {"rank": n, "arity": l, "hash": "<16 hex>", "theory": BODY}
// where a rank-0 BODY is the atom vector as a string of '0'/'1' and a
// rank-(m+1) BODY is the array of member BODYs sorted by member hash.

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "msow/theory.hpp"

namespace msow {

using json = nlohmann::json;

namespace detail {
inline void only_fields(const json& j, std::initializer_list<const char*> allowed, const char* what) {
    if (!j.is_object()) throw Error(std::string(what) + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (auto a : allowed) ok = ok || it.key() == a;
        if (!ok) throw Error(std::string(what) + ": unknown field '" + it.key() + "'");
    }
}

inline std::vector<std::string> string_list(const json& j, const char* what) {
    if (!j.is_array()) throw Error(std::string(what) + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& x : j) {
        if (!x.is_string()) throw Error(std::string(what) + " must be an array of strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}
}  // namespace detail

inline std::vector<std::string> member_ids(const FinStructure& s, const Subset& x) {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (x[i]) v.push_back(s.id(i));
    return v;
}

inline Subset subset_from_ids(const FinStructure& s, const std::vector<std::string>& ids, const std::string& what = "subset") {
    Subset x(s.size(), false);
    for (const auto& id : ids) {
        auto i = s.find(id);
        if (i == npos) throw Error(what + " references unknown element '" + id + "'");
        x[i] = true;
    }
    return x;
}

inline json structure_to_json(const FinStructure& s) {
    json j;
    j["kind"] = kind_name(s.kind());
    j["elements"] = s.ids();
    json order = json::object();
    if (s.kind() == Kind::chain) {
        for (std::size_t i = 0; i < s.size(); ++i) order[s.id(i)] = s.position(i);
    } else if (s.kind() == Kind::tree) {
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s.parent(i) != npos) order[s.id(i)] = s.id(s.parent(i));
    }
    j["order"] = order;
    j["predicates"] = json::array();
    for (const auto& p : s.predicates()) j["predicates"].push_back({{"name", p.name}, {"members", member_ids(s, p.members)}});
    return j;
}

inline FinStructure structure_from_json(const json& j) {
    detail::only_fields(j, {"kind", "elements", "order", "predicates"}, "structure");
    if (!j.contains("kind") || !j["kind"].is_string()) throw Error("structure: missing \"kind\"");
    if (!j.contains("elements")) throw Error("structure: missing \"elements\"");
    const Kind kind = parse_kind(j["kind"].get<std::string>());
    auto ids = detail::string_list(j["elements"], "structure elements");
    json order = j.value("order", json::object());
    if (!order.is_object()) throw Error("structure: \"order\" must be an object");
    FinStructure s;
    switch (kind) {
    case Kind::set:
        if (!order.empty()) throw Error("structure: a set has no order");
        s = FinStructure::make_set(ids);
        break;
    case Kind::chain: {
        std::map<std::string, long long> ranks;
        for (auto it = order.begin(); it != order.end(); ++it) {
            if (!it.value().is_number_integer()) throw Error("structure: chain rank of '" + it.key() + "' must be an integer");
            ranks[it.key()] = it.value().get<long long>();
        }
        std::set<std::string> known(ids.begin(), ids.end());
        if (known.size() != ids.size()) throw Error("structure: duplicate element id");
        for (const auto& [id, r] : ranks)
            if (!known.count(id)) throw Error("structure: order references unknown element '" + id + "'");
        for (const auto& id : ids)
            if (!ranks.count(id)) throw Error("structure: chain element '" + id + "' has no rank");
        s = FinStructure::make_chain_ranked(ranks);
        break;
    }
    case Kind::tree: {
        std::map<std::string, std::string> parent;
        for (auto it = order.begin(); it != order.end(); ++it) {
            if (!it.value().is_string()) throw Error("structure: parent of '" + it.key() + "' must be an element id");
            parent[it.key()] = it.value().get<std::string>();
        }
        s = FinStructure::make_tree(ids, parent);
        break;
    }
    }
    if (j.contains("predicates")) {
        if (!j["predicates"].is_array()) throw Error("structure: \"predicates\" must be an array");
        for (const auto& p : j["predicates"]) {
            detail::only_fields(p, {"name", "members"}, "predicate");
            if (!p.contains("name") || !p["name"].is_string()) throw Error("predicate: missing \"name\"");
            s = s.add_predicate(p["name"].get<std::string>(), detail::string_list(p.value("members", json::array()), "predicate members"));
        }
    }
    return s;
}

// ---------------------------------------------------------------------------

namespace detail {
inline json theory_body(Theory t) {
    if (t.rank() == 0) {
        std::string s;
        for (char c : t.atom_bits()) s.push_back(c ? '1' : '0');
        return s;
    }
    json arr = json::array();
    for (auto m : t.canonical_members()) arr.push_back(theory_body(m));
    return arr;
}

inline Theory theory_from_body(const json& b, std::size_t rank, std::size_t arity) {
    if (rank == 0) {
        if (!b.is_string()) throw Error("theory: rank-0 body must be a bit string");
        const auto& s = b.get_ref<const std::string&>();
        std::string bits;
        for (char c : s) {
            if (c != '0' && c != '1') throw Error("theory: bad atom bit");
            bits.push_back(c == '1');
        }
        return Theory::from_atoms(arity, std::move(bits));
    }
    if (!b.is_array()) throw Error("theory: body of positive rank must be an array");
    std::vector<Theory> ms;
    for (const auto& x : b) ms.push_back(theory_from_body(x, rank - 1, arity + 1));
    return Theory::from_members(rank, arity, ms);
}
}  // namespace detail

inline json theory_to_json(Theory t) {
    return {{"rank", t.rank()}, {"arity", t.arity()}, {"hash", t.hash_hex()}, {"theory", detail::theory_body(t)}};
}

inline Theory theory_from_json(const json& j) {
    detail::only_fields(j, {"rank", "arity", "hash", "theory"}, "theory");
    for (auto k : {"rank", "arity", "theory"})
        if (!j.contains(k)) throw Error(std::string("theory: missing \"") + k + "\"");
    auto t = detail::theory_from_body(j["theory"], j["rank"].get<std::size_t>(), j["arity"].get<std::size_t>());
    if (j.contains("hash") && j["hash"].get<std::string>() != t.hash_hex()) throw Error("theory: content hash mismatch");
    return t;
}

inline std::string serialize_theory(Theory t) { return theory_to_json(t).dump(); }
inline Theory parse_theory(const std::string& text) { return theory_from_json(json::parse(text)); }

// ---------------------------------------------------------------------------

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json read_json_file(const std::string& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw Error("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline FinStructure load_structure(const std::string& path) { return structure_from_json(read_json_file(path)); }

/// Short stable fingerprint of an input text (FNV-1a, hex).
inline std::string text_fingerprint(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static const char* d = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 0; i < 16; ++i) out[15 - i] = d[(h >> (4 * i)) & 0xf];
    return out;
}

}  // namespace msow
