#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "occinv/synthesis/system.hpp"

namespace occinv {

namespace detail {

inline std::string smt_rational(const Rational& q)
{
    auto nat = [](const Integer& z) { return Integer(abs(z)).get_str(); };
    std::string body = q.get_den() == 1 ? nat(q.get_num()) : "(/ " + nat(q.get_num()) + " " + nat(q.get_den()) + ")";
    return sgn(q) < 0 ? "(- " + body + ")" : body;
}

inline std::string smt_term(const Monomial& m, const Rational& c)
{
    std::vector<std::string> factors;
    if (c != 1 || m.is_one())
        factors.push_back(smt_rational(c));
    for (const auto& [v, e] : m.powers())
        for (std::uint32_t i = 0; i < e; ++i)
            factors.push_back(var_name(v));
    if (factors.size() == 1)
        return factors[0];
    std::string s = "(*";
    for (const auto& f : factors)
        s += " " + f;
    return s + ")";
}

inline std::string smt_poly(const Poly& p)
{
    if (p.is_zero_poly())
        return "0";
    if (p.size() == 1)
        return smt_term(p.terms().begin()->first, p.terms().begin()->second);
    std::string s = "(+";
    for (const auto& [m, c] : p.terms())
        s += " " + smt_term(m, c);
    return s + ")";
}

struct SExpr {
    std::string atom;
    std::vector<SExpr> list;
    bool isList = false;
};

inline SExpr parse_sexpr(const std::string& s, std::size_t& i)
{
    auto skip = [&] {
        while (i < s.size()) {
            if (std::isspace(static_cast<unsigned char>(s[i])))
                ++i;
            else if (s[i] == ';')
                while (i < s.size() && s[i] != '\n')
                    ++i;
            else
                break;
        }
    };
    skip();
    if (i >= s.size())
        throw Error(ErrorKind::SyntaxError, "unexpected end of SMT-LIB model");
    SExpr e;
    if (s[i] == '(') {
        e.isList = true;
        ++i;
        for (;;) {
            skip();
            if (i >= s.size())
                throw Error(ErrorKind::SyntaxError, "unbalanced parentheses in SMT-LIB model");
            if (s[i] == ')') {
                ++i;
                return e;
            }
            e.list.push_back(parse_sexpr(s, i));
        }
    }
    if (s[i] == ')')
        throw Error(ErrorKind::SyntaxError, "unexpected ')' in SMT-LIB model");
    std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '(' && s[i] != ')')
        ++i;
    e.atom = s.substr(start, i - start);
    return e;
}

inline Rational smt_value(const SExpr& e)
{
    if (!e.isList) {
        auto dot = e.atom.find('.');
        if (dot == std::string::npos)
            return Rational(Integer(e.atom));
        std::string digits = e.atom.substr(0, dot) + e.atom.substr(dot + 1);
        Integer scale = 1;
        for (std::size_t k = dot + 1; k < e.atom.size(); ++k)
            scale *= 10;
        Rational r(Integer(digits), scale);
        r.canonicalize();
        return r;
    }
    if (e.list.size() == 2 && e.list[0].atom == "-")
        return -smt_value(e.list[1]);
    if (e.list.size() == 3 && e.list[0].atom == "/") {
        Rational d = smt_value(e.list[2]);
        if (sgn(d) == 0)
            throw Error(ErrorKind::InvalidArgument, "division by zero in SMT-LIB model");
        return smt_value(e.list[1]) / d;
    }
    throw Error(ErrorKind::UnsupportedExpression, "unsupported value in SMT-LIB model");
}

inline void collect_definitions(const SExpr& e, Valuation& out)
{
    if (!e.isList)
        return;
    if (e.list.size() == 5 && e.list[0].atom == "define-fun" && e.list[2].isList && e.list[2].list.empty()) {
        out[parameter(e.list[1].atom)] = smt_value(e.list[4]);
        return;
    }
    for (const auto& c : e.list)
        collect_definitions(c, out);
}

} // namespace detail

/// QF_NRA script: one real constant per parameter, one assertion per equation.
inline std::string export_smtlib(const PolySystem& sys)
{
    std::ostringstream out;
    out << "(set-logic QF_NRA)\n";
    std::set<Var> declared(sys.parameters.begin(), sys.parameters.end());
    for (const Poly& e : sys.equations)
        for (Var v : e.variables())
            declared.insert(v);
    for (Var v : declared)
        out << "(declare-const " << var_name(v) << " Real)\n";
    for (const Poly& e : sys.equations)
        out << "(assert (= " << detail::smt_poly(e) << " 0))\n";
    out << "(check-sat)\n(get-model)\n";
    return out.str();
}

/// Reads `(define-fun p () Real v)` entries from a solver model.
inline Valuation import_smtlib_model(const std::string& text)
{
    Valuation out;
    std::size_t i = 0;
    auto more = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
            ++i;
        return i < text.size();
    };
    while (more()) {
        if (text[i] != '(') {
            // bare status words such as "sat"
            while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])))
                ++i;
            continue;
        }
        detail::collect_definitions(detail::parse_sexpr(text, i), out);
    }
    return out;
}

} // namespace occinv
