#pragma once

#include "occinv/program/ast.hpp"
#include "occinv/program/desugar.hpp"

namespace occinv {

namespace detail {

struct StatementFacts {
    int maxLoopDepth = 0;
    bool diverge = false;
    bool assignments = false;
};

inline StatementFacts facts(const Statement& s)
{
    using K = Statement::Kind;
    StatementFacts f;
    switch (s.kind) {
    case K::Diverge: f.diverge = true; break;
    case K::AssignConst:
    case K::SampleAssign: f.assignments = true; break;
    case K::AssignLinear: {
        bool selfRef = false;
        for (const auto& [k, v] : s.linear)
            selfRef = selfRef || v == s.var;
        f.assignments = !selfRef;
        break;
    }
    default: break;
    }
    for (const auto& c : s.children) {
        StatementFacts sub = facts(*c);
        f.maxLoopDepth = std::max(f.maxLoopDepth, sub.maxLoopDepth);
        f.diverge = f.diverge || sub.diverge;
        f.assignments = f.assignments || sub.assignments;
    }
    if (s.kind == K::While)
        f.maxLoopDepth += 1;
    return f;
}

} // namespace detail

inline Classification classify(const Program& p)
{
    Classification c;
    auto all = detail::facts(*p.body);
    c.isLoopFree = all.maxLoopDepth == 0;
    c.isRedip = !all.diverge;
    c.hasNestedLoops = all.maxLoopDepth > 1;
    c.isSingleLoop = p.body->kind == Statement::Kind::While && detail::facts(p.body->body()).maxLoopDepth == 0;
    if (c.isSingleLoop)
        c.bodyHasAssignments = detail::facts(p.body->body()).assignments;
    else
        c.bodyHasAssignments = all.assignments;
    c.isClRedip = c.isRedip && !all.assignments;
    return c;
}

} // namespace occinv
