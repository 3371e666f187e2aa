#pragma once

#include <string>

#include "occinv/program/ast.hpp"

namespace occinv {

/// Closed form rendered with the formal distribution variable written as T.
inline std::string pgf_to_string(const RationalClosedForm& f)
{
    std::string s = to_string(f);
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '$' && i + 1 < s.size() && s[i + 1] == 'T')
            continue;
        out += s[i];
    }
    return out;
}

inline std::string to_string(const Dist& d)
{
    switch (d.kind) {
    case Dist::Kind::Bernoulli: return "bernoulli(" + d.p.get_str() + ")";
    case Dist::Kind::Geometric: return "geometric(" + d.p.get_str() + ")";
    case Dist::Kind::Uniform: return "uniform(" + std::to_string(d.a) + ", " + std::to_string(d.b) + ")";
    case Dist::Kind::Dirac: return "dirac(" + std::to_string(d.a) + ")";
    case Dist::Kind::Pgf: return "pgf(" + pgf_to_string(d.pgf) + ")";
    }
    return "?";
}

inline std::string to_string(const Guard& g)
{
    switch (g.kind) {
    case Guard::Kind::Lt: return g.var + " < " + std::to_string(g.n);
    case Guard::Kind::Geq: return g.var + " >= " + std::to_string(g.n);
    case Guard::Kind::Eq: return g.var + " = " + std::to_string(g.n);
    case Guard::Kind::Neq: return g.var + " != " + std::to_string(g.n);
    case Guard::Kind::Mod: return g.var + " = " + std::to_string(g.n) + " mod " + std::to_string(g.modulus);
    case Guard::Kind::And: return "(" + to_string(*g.lhs) + " && " + to_string(*g.rhs) + ")";
    case Guard::Kind::Or: return "(" + to_string(*g.lhs) + " || " + to_string(*g.rhs) + ")";
    case Guard::Kind::Not: return "!(" + to_string(*g.lhs) + ")";
    }
    return "?";
}

namespace detail {

inline void print_statement(const Statement& s, int indent, std::string& out)
{
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    using K = Statement::Kind;
    switch (s.kind) {
    case K::Skip: out += "skip"; return;
    case K::Diverge: out += "diverge"; return;
    case K::AssignConst: out += s.var + " := " + std::to_string(s.n); return;
    case K::Decrement: out += s.var + "--"; return;
    case K::IidIncrement:
        out += s.var + " += iid(" + to_string(s.dist);
        if (!s.countVar.empty())
            out += ", " + s.countVar;
        out += ")";
        return;
    case K::SampleAssign: out += s.var + " := " + to_string(s.dist); return;
    case K::AssignLinear: {
        out += s.var + " := ";
        bool first = true;
        for (const auto& [k, v] : s.linear) {
            if (!first)
                out += " + ";
            first = false;
            if (k != 1)
                out += std::to_string(k) + "*";
            out += v;
        }
        if (s.constant > 0)
            out += " + " + std::to_string(s.constant);
        else if (s.constant < 0)
            out += " - " + std::to_string(-s.constant);
        return;
    }
    case K::Choice:
        out += "{ ";
        print_statement(s.left(), indent, out);
        out += " } [" + s.prob.get_str() + "] { ";
        print_statement(s.right(), indent, out);
        out += " }";
        return;
    case K::Seq:
        for (std::size_t i = 0; i < s.children.size(); ++i) {
            if (i > 0)
                out += ";\n" + pad;
            print_statement(*s.children[i], indent, out);
        }
        return;
    case K::IfThenElse:
        out += "if (" + to_string(*s.guard) + ") {\n" + pad + "  ";
        print_statement(s.left(), indent + 1, out);
        out += "\n" + pad + "} else {\n" + pad + "  ";
        print_statement(s.right(), indent + 1, out);
        out += "\n" + pad + "}";
        return;
    case K::While:
        out += "while (" + to_string(*s.guard) + ") {\n" + pad + "  ";
        print_statement(s.body(), indent + 1, out);
        out += "\n" + pad + "}";
        return;
    }
}

} // namespace detail

inline std::string to_string(const Statement& s)
{
    std::string out;
    detail::print_statement(s, 0, out);
    return out;
}

/// Source text that parses back to the same AST.
inline std::string to_string(const Program& p)
{
    std::string out;
    if (p.explicitDeclarations)
        for (const auto& v : p.variables)
            out += "nat " + v + ";\n";
    out += to_string(*p.body);
    out += "\n";
    return out;
}

} // namespace occinv
