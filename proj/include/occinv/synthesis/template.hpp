#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "occinv/algebra/closed_form.hpp"
#include "occinv/algebra/expr_parser.hpp"

namespace occinv {

struct Template {
    RationalClosedForm form;
    std::vector<Var> parameters; // ordered: numerator first, then denominator
    std::optional<std::uint32_t> denDegree; // set for enumerated templates
    std::string source;                     // user text, empty for enumerated
    std::vector<std::string> constraints;   // applied pins and links, as text

    bool is_user() const { return !denDegree.has_value(); }
    std::string provenance() const
    {
        return is_user() ? "User" : "Auto(denDegree=" + std::to_string(*denDegree) + ")";
    }
};

using Valuation = std::map<Var, Rational>;

inline std::vector<Var> form_parameters(const RationalClosedForm& f)
{
    std::vector<Var> out;
    for (const Poly* p : {&f.num(), &f.den()})
        for (Var v : p->variables())
            if (is_parameter(v) && std::find(out.begin(), out.end(), v) == out.end())
                out.push_back(v);
    return out;
}

/// Substitutes a (complete) valuation; throws InvalidDenominator when the
/// denominator vanishes.
inline RationalClosedForm instantiate(const Template& t, const Valuation& tau)
{
    Poly num = t.form.num();
    Poly den = t.form.den();
    for (Var p : t.parameters) {
        auto it = tau.find(p);
        Rational value = it == tau.end() ? Rational(0) : it->second;
        num = num.substitute(p, value);
        den = den.substitute(p, value);
    }
    return RationalClosedForm::normalize(num, den);
}

/// Template with denominator 1 + sum_{1 <= deg m <= d} b_i m and numerator
/// sum_{deg m <= d} a_i m.
inline Template make_template(const std::vector<Var>& vars, std::uint32_t d)
{
    Template t;
    t.denDegree = d;
    Poly num;
    Poly den(1);
    std::size_t ai = 0;
    std::vector<Var> denParams;
    for (std::uint32_t k = 0; k <= d; ++k)
        for (const Monomial& m : monomials_of_degree(vars, k)) {
            Var a = parameter("a" + std::to_string(ai++));
            t.parameters.push_back(a);
            num += Poly(Monomial::of(a, 1) * m, Rational(1));
            if (k > 0) {
                Var b = parameter("b" + std::to_string(denParams.size() + 1));
                denParams.push_back(b);
                den += Poly(Monomial::of(b, 1) * m, Rational(1));
            }
        }
    t.parameters.insert(t.parameters.end(), denParams.begin(), denParams.end());
    ReductionScope raw(ReductionPolicy{false, {}});
    t.form = RationalClosedForm::normalize(num, den);
    return t;
}

/// One template per denominator degree 0..maxDenDegree, each with full
/// numerator support of degree <= d.
inline std::vector<Template> enumerate_templates(const std::vector<Var>& vars, std::uint32_t maxDenDegree)
{
    std::vector<Template> out;
    for (std::uint32_t d = 0; d <= maxDenDegree; ++d)
        out.push_back(make_template(vars, d));
    return out;
}

/// Parses a user template:
///
///     (a + b*X + c*X^2)/(d - e*X^3)
///     link a = 4*f
///     pin d = 1
///
/// Upper-case names are program indeterminates, lower-case names parameters.
/// `link p = expr` replaces p by a polynomial in other parameters; `pin p = q`
/// fixes p to a rational constant. Lines starting with `#` are ignored.
inline Template parse_template(const std::string& text, const NameResolver& resolve)
{
    Template t;
    t.source = text;
    std::optional<RationalClosedForm> form;
    std::vector<std::pair<Var, Poly>> replacements;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        line = line.substr(first);
        bool isLink = line.rfind("link ", 0) == 0;
        bool isPin = line.rfind("pin ", 0) == 0;
        if (isLink || isPin) {
            std::string body = line.substr(isLink ? 5 : 4);
            auto eq = body.find('=');
            if (eq == std::string::npos)
                throw Error(ErrorKind::SyntaxError, "expected '=' in template constraint: " + line);
            Poly lhs = parse_polynomial(body.substr(0, eq), resolve);
            RationalClosedForm rhs = parse_closed_form(body.substr(eq + 1), resolve);
            if (lhs.size() != 1 || lhs.terms().begin()->second != 1 || lhs.total_degree() != 1
                || !is_parameter(*lhs.variables().begin()))
                throw Error(ErrorKind::InvalidArgument, "constraint must define a single parameter: " + line);
            if (rhs.den() != Poly(1) || (isPin && !rhs.num().is_constant()))
                throw Error(ErrorKind::InvalidArgument,
                            std::string(isPin ? "pin needs a rational constant: " : "link needs a polynomial: ")
                                + line);
            for (Var v : rhs.num().variables())
                if (!is_parameter(v))
                    throw Error(ErrorKind::InvalidArgument, "constraint may only mention parameters: " + line);
            replacements.emplace_back(*lhs.variables().begin(), rhs.num());
            t.constraints.push_back(line);
            continue;
        }
        if (line.rfind("template ", 0) == 0)
            line = line.substr(9);
        if (form)
            throw Error(ErrorKind::SyntaxError, "template has more than one closed form: " + line);
        ReductionScope raw(ReductionPolicy{false, {}});
        form = parse_closed_form(line, resolve);
    }
    if (!form)
        throw Error(ErrorKind::SyntaxError, "template text has no closed form");
    Poly num = form->num();
    Poly den = form->den();
    for (const auto& [p, value] : replacements) {
        num = num.substitute(p, value);
        den = den.substitute(p, value);
    }
    ReductionScope raw(ReductionPolicy{false, {}});
    t.form = RationalClosedForm::normalize(num, den);
    t.parameters = form_parameters(t.form);
    return t;
}

/// Scales every parameter by k (used to check that scaling is a quotient).
inline Valuation scale_valuation(const Valuation& tau, const Rational& k)
{
    Valuation out;
    for (const auto& [p, v] : tau)
        out[p] = v * k;
    return out;
}

} // namespace occinv
