#pragma once

// Minimal s-expression reader used by the formula and term syntaxes.

#include <cctype>
#include <string>
#include <vector>

#include "msow/structures.hpp"

namespace msow {

struct SExpr {
    std::string atom;  // non-empty for atoms
    std::vector<SExpr> list;

    bool is_atom() const { return !atom.empty(); }
    const std::string& head() const {
        if (is_atom() || list.empty() || !list[0].is_atom()) throw Error("s-expression: expected (head ...)");
        return list[0].atom;
    }
    std::string str() const {
        if (is_atom()) return atom;
        std::string s = "(";
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (i) s += ' ';
            s += list[i].str();
        }
        return s + ")";
    }
};

namespace detail {
inline void skip_ws(const std::string& s, std::size_t& i) {
    while (i < s.size()) {
        if (std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
        } else if (s[i] == ';') {
            while (i < s.size() && s[i] != '\n') ++i;
        } else {
            break;
        }
    }
}

inline SExpr read_sexpr(const std::string& s, std::size_t& i) {
    skip_ws(s, i);
    if (i >= s.size()) throw Error("s-expression: unexpected end of input");
    if (s[i] == ')') throw Error("s-expression: unexpected ')' at offset " + std::to_string(i));
    if (s[i] == '(') {
        ++i;
        SExpr e;
        while (true) {
            skip_ws(s, i);
            if (i >= s.size()) throw Error("s-expression: missing ')'");
            if (s[i] == ')') {
                ++i;
                return e;
            }
            e.list.push_back(read_sexpr(s, i));
        }
    }
    SExpr e;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '(' && s[i] != ')' && s[i] != ';')
        e.atom.push_back(s[i++]);
    return e;
}
}  // namespace detail

inline SExpr parse_sexpr(const std::string& text) {
    std::size_t i = 0;
    SExpr e = detail::read_sexpr(text, i);
    detail::skip_ws(text, i);
    if (i != text.size()) throw Error("s-expression: trailing input at offset " + std::to_string(i));
    return e;
}

}  // namespace msow
