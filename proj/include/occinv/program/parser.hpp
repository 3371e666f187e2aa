#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "occinv/algebra/expr_parser.hpp"
#include "occinv/program/ast.hpp"
#include "occinv/program/classify.hpp"

namespace occinv {

namespace detail {

inline bool is_reserved_word(const std::string& w)
{
    static const std::set<std::string> words = {"skip", "diverge", "if", "else", "while", "nat", "iid", "mod",
                                                "bernoulli", "geometric", "uniform", "dirac", "pgf"};
    return words.count(w) > 0;
}

inline bool is_dist_name(const std::string& w)
{
    return w == "bernoulli" || w == "geometric" || w == "uniform" || w == "dirac" || w == "pgf";
}

inline std::string at(const text::Token& t)
{
    return std::to_string(t.line) + ":" + std::to_string(t.col) + ": ";
}

class ProgramParser {
public:
    explicit ProgramParser(std::string_view src) : ts_(src) {}

    Program program()
    {
        Program prog;
        while (ts_.peek().is_keyword("nat")) {
            ts_.next();
            do {
                const auto& name = ts_.expect_kind(text::TokenKind::Ident, "variable name");
                if (is_reserved_word(name.text))
                    throw SyntaxError(name.line, name.col, "variable name (found keyword '" + name.text + "')");
                declare(name.text);
            } while (ts_.accept(","));
            ts_.expect(";");
            declared_ = true;
        }
        prog.explicitDeclarations = declared_;
        prog.body = sequence();
        if (!ts_.at_end())
            ts_.fail("';' or end of program");
        prog.variables = vars_;
        prog.flags = classify(prog);
        return prog;
    }

    /// Parses a standalone guard expression over already-known variables.
    GuardPtr standalone_guard()
    {
        GuardPtr g = guard();
        if (!ts_.at_end())
            ts_.fail("end of guard");
        return g;
    }

    void predeclare(const std::vector<std::string>& vars)
    {
        for (const auto& v : vars)
            declare(v);
        declared_ = true;
    }

private:
    void declare(const std::string& v)
    {
        if (std::find(vars_.begin(), vars_.end(), v) == vars_.end()) {
            vars_.push_back(v);
            indeterminate_of(v);
        }
    }

    std::string use(const text::Token& t)
    {
        if (is_reserved_word(t.text))
            throw SyntaxError(t.line, t.col, "variable (found keyword '" + t.text + "')");
        if (std::find(vars_.begin(), vars_.end(), t.text) == vars_.end()) {
            if (declared_)
                throw Error(ErrorKind::UndeclaredVariable, at(t) + "variable '" + t.text + "' is not declared");
            declare(t.text);
        }
        return t.text;
    }

    StmtPtr sequence()
    {
        std::vector<StmtPtr> items;
        items.push_back(simple());
        while (ts_.accept(";")) {
            if (ts_.peek().is("}") || ts_.at_end())
                break;
            items.push_back(simple());
        }
        return Statement::seq(std::move(items));
    }

    StmtPtr block()
    {
        ts_.expect("{");
        StmtPtr s = sequence();
        ts_.expect("}");
        return s;
    }

    StmtPtr simple()
    {
        const auto& t = ts_.peek();
        if (ts_.accept_keyword("skip"))
            return Statement::skip();
        if (ts_.accept_keyword("diverge"))
            return Statement::diverge();
        if (t.is("{")) {
            StmtPtr left = block();
            if (!ts_.accept("["))
                return left;
            Rational p = rational_literal(true);
            ts_.expect("]");
            StmtPtr right = block();
            return Statement::choice(p, left, right);
        }
        if (ts_.accept_keyword("if"))
            return if_rest();
        if (ts_.accept_keyword("while")) {
            ts_.expect("(");
            GuardPtr g = guard();
            ts_.expect(")");
            return Statement::loop(g, block());
        }
        if (t.kind == text::TokenKind::Ident)
            return assignment();
        ts_.fail("statement");
    }

    StmtPtr if_rest()
    {
        ts_.expect("(");
        GuardPtr g = guard();
        ts_.expect(")");
        StmtPtr thenBranch = block();
        StmtPtr elseBranch = Statement::skip();
        if (ts_.accept_keyword("else")) {
            if (ts_.accept_keyword("if"))
                elseBranch = if_rest();
            else
                elseBranch = block();
        }
        return Statement::ite(g, thenBranch, elseBranch);
    }

    StmtPtr assignment()
    {
        const text::Token target = ts_.next();
        std::string v = use(target);
        if (ts_.accept("--"))
            return Statement::decrement(v);
        if (ts_.accept("+=")) {
            if (ts_.accept_keyword("iid")) {
                ts_.expect("(");
                Dist d = dist();
                std::string count;
                if (ts_.accept(","))
                    count = use(ts_.expect_kind(text::TokenKind::Ident, "count variable"));
                ts_.expect(")");
                return Statement::iid(v, d, count);
            }
            auto [constant, terms] = linear_expression();
            terms.insert(terms.begin(), {1, v});
            return make_linear(v, constant, terms, target);
        }
        if (!ts_.accept(":="))
            ts_.fail("':=', '+=' or '--'");
        const auto& next = ts_.peek();
        if (next.kind == text::TokenKind::Ident && is_dist_name(next.text) && ts_.peek(1).is("("))
            return Statement::sample(v, dist());
        auto [constant, terms] = linear_expression();
        return make_linear(v, constant, terms, target);
    }

    StmtPtr make_linear(const std::string& v, std::int64_t constant,
                        const std::vector<std::pair<std::int64_t, std::string>>& raw, const text::Token& where)
    {
        std::vector<std::pair<std::int64_t, std::string>> merged;
        for (const auto& [k, name] : raw) {
            auto it = std::find_if(merged.begin(), merged.end(), [&](const auto& e) { return e.second == name; });
            if (it == merged.end())
                merged.emplace_back(k, name);
            else
                it->first += k;
        }
        std::erase_if(merged, [](const auto& e) { return e.first == 0; });
        for (const auto& [k, name] : merged)
            if (k < 0)
                throw Error(ErrorKind::UnsupportedExpression,
                            at(where) + "negative coefficient of variable '" + name + "'");
        if (merged.empty()) {
            if (constant < 0)
                throw Error(ErrorKind::UnsupportedExpression, at(where) + "negative constant assignment");
            return Statement::assign_const(v, static_cast<std::uint64_t>(constant));
        }
        return Statement::assign_linear(v, constant, merged);
    }

    /// constant + sum coef*var with integer coefficients.
    std::pair<std::int64_t, std::vector<std::pair<std::int64_t, std::string>>> linear_expression()
    {
        std::int64_t constant = 0;
        std::vector<std::pair<std::int64_t, std::string>> terms;
        int sign = 1;
        if (ts_.accept("-"))
            sign = -1;
        else
            ts_.accept("+");
        while (true) {
            auto [k, var] = linear_term();
            if (var.empty())
                constant += sign * k;
            else
                terms.emplace_back(sign * k, var);
            if (ts_.accept("+"))
                sign = 1;
            else if (ts_.accept("-"))
                sign = -1;
            else
                break;
        }
        const auto& t = ts_.peek();
        if (t.is("/") || t.is("^") || t.is("(") || t.is("*"))
            throw Error(ErrorKind::UnsupportedExpression, at(t) + "only linear expressions are supported");
        return {constant, terms};
    }

    std::pair<std::int64_t, std::string> linear_term()
    {
        std::int64_t coef = 1;
        std::string var;
        bool any = false;
        while (true) {
            const auto& t = ts_.peek();
            if (t.kind == text::TokenKind::Number) {
                if (t.text.find('.') != std::string::npos)
                    throw Error(ErrorKind::UnsupportedExpression, at(t) + "non-integer constant");
                coef *= std::stoll(t.text);
                ts_.next();
            } else if (t.kind == text::TokenKind::Ident && !is_reserved_word(t.text)) {
                if (!var.empty())
                    throw Error(ErrorKind::UnsupportedExpression, at(t) + "product of variables is not linear");
                var = use(t);
                ts_.next();
            } else if (t.is("(") || t.is("/") || t.is("^")) {
                throw Error(ErrorKind::UnsupportedExpression, at(t) + "only linear expressions are supported");
            } else {
                if (!any)
                    ts_.fail("number or variable");
                break;
            }
            any = true;
            if (ts_.accept("*"))
                continue;
            const auto& n = ts_.peek();
            bool juxtaposed = n.kind == text::TokenKind::Ident && !is_reserved_word(n.text);
            if (!juxtaposed)
                break;
        }
        return {coef, var};
    }

    Rational rational_literal(bool probability)
    {
        const auto& t = ts_.expect_kind(text::TokenKind::Number, probability ? "probability" : "rational number");
        Rational r = parse_rational(t.text);
        if (ts_.accept("/")) {
            const auto& d = ts_.expect_kind(text::TokenKind::Number, "denominator");
            Rational den = parse_rational(d.text);
            if (sgn(den) == 0)
                throw Error(ErrorKind::InvalidProbability, at(d) + "zero denominator");
            r /= den;
        }
        if (probability && (sgn(r) < 0 || r > 1))
            throw Error(ErrorKind::InvalidProbability, at(t) + "probability " + r.get_str() + " outside [0,1]");
        return r;
    }

    std::uint64_t natural()
    {
        const auto& t = ts_.expect_kind(text::TokenKind::Number, "natural number");
        if (t.text.find('.') != std::string::npos)
            throw SyntaxError(t.line, t.col, "natural number");
        return std::stoull(t.text);
    }

    Dist dist()
    {
        const auto& name = ts_.expect_kind(text::TokenKind::Ident, "distribution");
        ts_.expect("(");
        Dist d;
        if (name.text == "bernoulli" || name.text == "geometric") {
            const auto& pt = ts_.peek();
            Rational p = rational_literal(false);
            if (sgn(p) <= 0 || p >= 1)
                throw Error(ErrorKind::InvalidProbability,
                            at(pt) + name.text + " parameter " + p.get_str() + " outside (0,1)");
            d = name.text == "bernoulli" ? Dist::bernoulli(p) : Dist::geometric(p);
        } else if (name.text == "uniform") {
            std::uint64_t lo = natural();
            ts_.expect(",");
            std::uint64_t hi = natural();
            if (lo > hi)
                throw Error(ErrorKind::InvalidProbability, at(name) + "uniform range is empty");
            d = Dist::uniform(lo, hi);
        } else if (name.text == "dirac") {
            d = Dist::dirac(natural());
        } else if (name.text == "pgf") {
            const auto& start = ts_.peek();
            RationalClosedForm f = parse_closed_form(ts_, [](const std::string& id, const text::Token& tok) {
                if (id != "T")
                    throw SyntaxError(tok.line, tok.col, "indeterminate T in pgf");
                return pgf_variable();
            });
            if (!nonnegative_shape(f))
                throw Error(ErrorKind::InvalidProbability, at(start) + "pgf coefficients not certified nonnegative");
            ExtendedMass m = mass(f);
            if (!m.is_finite() || m.value() != 1)
                throw Error(ErrorKind::InvalidProbability, at(start) + "pgf does not have mass 1");
            d = Dist::raw(f);
        } else {
            throw SyntaxError(name.line, name.col, "distribution name");
        }
        ts_.expect(")");
        return d;
    }

    GuardPtr guard()
    {
        GuardPtr g = guard_and();
        while (ts_.accept("||"))
            g = Guard::disj(g, guard_and());
        return g;
    }

    GuardPtr guard_and()
    {
        GuardPtr g = guard_unary();
        while (ts_.accept("&&"))
            g = Guard::conj(g, guard_unary());
        return g;
    }

    GuardPtr guard_unary()
    {
        if (ts_.accept("!"))
            return Guard::neg(guard_unary());
        if (ts_.accept("(")) {
            GuardPtr g = guard();
            ts_.expect(")");
            return g;
        }
        const auto& t = ts_.expect_kind(text::TokenKind::Ident, "guard");
        std::string v = use(t);
        const auto& op = ts_.peek();
        if (op.kind != text::TokenKind::Symbol)
            ts_.fail("comparison operator");
        std::string sym = op.text;
        ts_.next();
        const auto& rhs = ts_.peek();
        if (rhs.kind == text::TokenKind::Ident)
            throw Error(ErrorKind::UnsupportedExpression,
                        at(rhs) + "guards compare variables with constants only");
        std::uint64_t n = natural();
        if (sym == "<")
            return Guard::lt(v, n);
        if (sym == "<=")
            return Guard::lt(v, n + 1);
        if (sym == ">")
            return Guard::geq(v, n + 1);
        if (sym == ">=")
            return Guard::geq(v, n);
        if (sym == "!=")
            return Guard::neq(v, n);
        if (sym == "=" || sym == "==") {
            if (ts_.accept_keyword("mod")) {
                const auto& mt = ts_.peek();
                std::uint64_t d = natural();
                if (d < 2 || n >= d)
                    throw SyntaxError(mt.line, mt.col, "modulus >= 2 exceeding the residue");
                return Guard::mod(v, n, d);
            }
            return Guard::eq(v, n);
        }
        throw SyntaxError(op.line, op.col, "comparison operator");
    }

    text::TokenStream ts_;
    std::vector<std::string> vars_;
    bool declared_ = false;
};

} // namespace detail

/// Parses a program text; raises SyntaxError, UndeclaredVariable,
/// InvalidProbability or UnsupportedExpression.
inline Program parse_program(std::string_view source)
{
    detail::ProgramParser parser(source);
    return parser.program();
}

/// Parses a guard such as `x > 0 && y = 1 mod 3`.
inline GuardPtr parse_guard(std::string_view source, const std::vector<std::string>& vars = {})
{
    detail::ProgramParser parser(source);
    if (!vars.empty())
        parser.predeclare(vars);
    return parser.standalone_guard();
}

/// Resolver for closed forms over a program: indeterminates of the declared
/// variables; with `allowParameters`, any other name becomes a parameter.
inline NameResolver program_resolver(const Program& prog, bool allowParameters)
{
    std::map<std::string, Var> names;
    for (const auto& v : prog.variables)
        names.emplace(indeterminate_name(v), indeterminate_of(v));
    return [names, allowParameters](const std::string& id, const text::Token& tok) {
        if (auto it = names.find(id); it != names.end())
            return it->second;
        if (!allowParameters)
            throw Error(ErrorKind::UndeclaredVariable,
                        detail::at(tok) + "indeterminate '" + id + "' does not belong to a program variable");
        return parameter(id);
    };
}

} // namespace occinv
