#pragma once

#include "occinv/program/ast.hpp"

namespace occinv {

/// Rewrites equality and disequality atoms into Lt/Geq combinations.
inline GuardPtr desugar_guard(const GuardPtr& g)
{
    switch (g->kind) {
    case Guard::Kind::Eq: return Guard::conj(Guard::geq(g->var, g->n), Guard::lt(g->var, g->n + 1));
    case Guard::Kind::Neq: return Guard::disj(Guard::lt(g->var, g->n), Guard::geq(g->var, g->n + 1));
    case Guard::Kind::And: return Guard::conj(desugar_guard(g->lhs), desugar_guard(g->rhs));
    case Guard::Kind::Or: return Guard::disj(desugar_guard(g->lhs), desugar_guard(g->rhs));
    case Guard::Kind::Not: return Guard::neg(desugar_guard(g->lhs));
    default: return g;
    }
}

namespace detail {

/// var := k*var + sum c_i*y_i + constant, lowered to primitive increments.
inline StmtPtr lower_linear(const Statement& s)
{
    std::int64_t self = 0;
    std::vector<StmtPtr> out;
    for (const auto& [k, v] : s.linear)
        if (v == s.var)
            self += k;
    if (self == 1 && s.linear.size() == 1 && s.constant == 0)
        return Statement::skip();
    if (self == 0)
        out.push_back(Statement::assign_const(s.var, 0));
    else if (self >= 2)
        out.push_back(Statement::iid(s.var, Dist::dirac(static_cast<std::uint64_t>(self - 1)), s.var));
    for (const auto& [k, v] : s.linear)
        if (v != s.var)
            out.push_back(Statement::iid(s.var, Dist::dirac(static_cast<std::uint64_t>(k)), v));
    if (s.constant > 0)
        out.push_back(Statement::iid(s.var, Dist::dirac(static_cast<std::uint64_t>(s.constant))));
    for (std::int64_t i = 0; i < -s.constant; ++i)
        out.push_back(Statement::decrement(s.var));
    return Statement::seq(std::move(out));
}

} // namespace detail

/// Lowers surface syntax to the primitive statement set (semantics-preserving).
inline StmtPtr desugar(const StmtPtr& s)
{
    using K = Statement::Kind;
    switch (s->kind) {
    case K::AssignLinear: return detail::lower_linear(*s);
    case K::Choice: return Statement::choice(s->prob, desugar(s->children[0]), desugar(s->children[1]));
    case K::Seq: {
        std::vector<StmtPtr> items;
        for (const auto& c : s->children) {
            StmtPtr d = desugar(c);
            if (d->kind != K::Skip)
                items.push_back(d);
        }
        return Statement::seq(std::move(items));
    }
    case K::IfThenElse:
        return Statement::ite(desugar_guard(s->guard), desugar(s->children[0]), desugar(s->children[1]));
    case K::While: return Statement::loop(desugar_guard(s->guard), desugar(s->children[0]));
    default: return s;
    }
}

inline Program desugar(const Program& p)
{
    Program out = p;
    out.body = desugar(p.body);
    return out;
}

} // namespace occinv
