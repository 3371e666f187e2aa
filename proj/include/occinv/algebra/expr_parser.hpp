#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "occinv/algebra/closed_form.hpp"
#include "occinv/text/lexer.hpp"

namespace occinv {

/// Maps an identifier in a closed-form expression to an indeterminate.
using NameResolver = std::function<Var(const std::string&, const text::Token&)>;

/// Known names resolve to their interned indeterminate; unknown names become
/// program indeterminates.
inline Var default_resolver(const std::string& name, const text::Token&)
{
    if (auto v = Symbols::instance().lookup(name))
        return *v;
    return program_var(name);
}

namespace detail {

class ClosedFormParser {
public:
    ClosedFormParser(text::TokenStream& ts, NameResolver resolve) : ts_(ts), resolve_(std::move(resolve)) {}

    RationalClosedForm expression()
    {
        RationalClosedForm acc = term();
        while (true) {
            if (ts_.accept("+"))
                acc = acc + term();
            else if (ts_.accept("-"))
                acc = acc - term();
            else
                return acc;
        }
    }

private:
    bool starts_atom() const
    {
        const auto& t = ts_.peek();
        return t.kind == text::TokenKind::Ident || t.kind == text::TokenKind::Number || t.is("(");
    }

    RationalClosedForm term()
    {
        RationalClosedForm acc = unary();
        while (true) {
            if (ts_.accept("*")) {
                acc = acc * unary();
            } else if (ts_.peek().is("/")) {
                const auto& at = ts_.next();
                RationalClosedForm d = unary();
                try {
                    acc = acc / d;
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::InvalidDenominator)
                        throw;
                    throw Error(ErrorKind::InvalidDenominator,
                                std::to_string(at.line) + ":" + std::to_string(at.col) + ": " + e.message());
                }
            } else if (starts_atom()) {
                acc = acc * power(); // juxtaposition, e.g. 2X
            } else {
                return acc;
            }
        }
    }

    RationalClosedForm unary()
    {
        if (ts_.accept("-"))
            return -unary();
        if (ts_.accept("+"))
            return unary();
        return power();
    }

    RationalClosedForm power()
    {
        RationalClosedForm base = atom();
        if (ts_.accept("^")) {
            const auto& e = ts_.expect_kind(text::TokenKind::Number, "natural exponent");
            if (e.text.find('.') != std::string::npos)
                throw SyntaxError(e.line, e.col, "natural exponent");
            unsigned long k = std::stoul(e.text);
            if (k > 10000)
                throw SyntaxError(e.line, e.col, "exponent at most 10000");
            base = base.pow(static_cast<std::uint32_t>(k));
        }
        return base;
    }

    RationalClosedForm atom()
    {
        const auto& t = ts_.peek();
        if (t.kind == text::TokenKind::Number) {
            ts_.next();
            return RationalClosedForm(parse_rational(t.text));
        }
        if (t.kind == text::TokenKind::Ident) {
            ts_.next();
            return RationalClosedForm(Poly::variable(resolve_(t.text, t)));
        }
        if (ts_.accept("(")) {
            RationalClosedForm inner = expression();
            ts_.expect(")");
            return inner;
        }
        ts_.fail("number, indeterminate or '('");
    }

    text::TokenStream& ts_;
    NameResolver resolve_;
};

} // namespace detail

/// Parses an expression from an existing token stream (used for embedded forms).
inline RationalClosedForm parse_closed_form(text::TokenStream& ts, const NameResolver& resolve = default_resolver)
{
    detail::ClosedFormParser parser(ts, resolve);
    return parser.expression();
}

/// Parses a complete closed-form expression such as `(1+2*X)/(2-C)`.
inline RationalClosedForm parse_closed_form(std::string_view src, const NameResolver& resolve = default_resolver)
{
    text::TokenStream ts(src);
    RationalClosedForm f = parse_closed_form(ts, resolve);
    if (!ts.at_end())
        ts.fail("end of expression");
    return f;
}

/// Parses a polynomial; rejects expressions with a non-constant denominator.
inline Poly parse_polynomial(std::string_view src, const NameResolver& resolve = default_resolver)
{
    RationalClosedForm f = parse_closed_form(src, resolve);
    if (!f.is_polynomial())
        throw Error(ErrorKind::InvalidArgument, "expected a polynomial, got " + to_string(f));
    return f.num();
}

} // namespace occinv
