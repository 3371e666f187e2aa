#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "occinv/algebra/closed_form.hpp"

namespace occinv {

/// Formal variable of distribution generating functions.
inline Var pgf_variable() { return program_var("$T"); }

struct Dist {
    enum class Kind { Bernoulli, Geometric, Uniform, Dirac, Pgf };
    Kind kind = Kind::Dirac;
    Rational p;           // Bernoulli, Geometric
    std::uint64_t a = 0;  // Uniform lower bound, Dirac point
    std::uint64_t b = 0;  // Uniform upper bound
    RationalClosedForm pgf; // Pgf, in pgf_variable()

    static Dist bernoulli(const Rational& p) { return {Kind::Bernoulli, p, 0, 0, {}}; }
    static Dist geometric(const Rational& p) { return {Kind::Geometric, p, 0, 0, {}}; }
    static Dist uniform(std::uint64_t lo, std::uint64_t hi) { return {Kind::Uniform, 0, lo, hi, {}}; }
    static Dist dirac(std::uint64_t n) { return {Kind::Dirac, 0, n, 0, {}}; }
    static Dist raw(const RationalClosedForm& f) { return {Kind::Pgf, 0, 0, 0, f}; }

    bool operator==(const Dist& o) const
    {
        return kind == o.kind && p == o.p && a == o.a && b == o.b && equal(pgf, o.pgf);
    }
};

/// Probability generating function of `d` in pgf_variable().
inline RationalClosedForm dist_pgf(const Dist& d)
{
    Var t = pgf_variable();
    switch (d.kind) {
    case Dist::Kind::Bernoulli:
        return RationalClosedForm(Poly(Rational(1 - d.p)) + Poly(Monomial::of(t), d.p));
    case Dist::Kind::Geometric:
        return RationalClosedForm::normalize(Poly(d.p), Poly(1) - Poly(Monomial::of(t), Rational(1 - d.p)));
    case Dist::Kind::Uniform: {
        Poly sum;
        for (std::uint64_t k = d.a; k <= d.b; ++k)
            sum.add_term(Monomial::of(t, static_cast<std::uint32_t>(k)), Rational(1));
        Rational w = make_rational(1, static_cast<long>(d.b - d.a + 1));
        return RationalClosedForm(sum * w);
    }
    case Dist::Kind::Dirac:
        return RationalClosedForm(Poly(Monomial::of(t, static_cast<std::uint32_t>(d.a))));
    case Dist::Kind::Pgf:
        return d.pgf;
    }
    return {};
}

struct Guard;
using GuardPtr = std::shared_ptr<const Guard>;

/// Rectangular guard over natural-valued variables.
struct Guard {
    enum class Kind { Lt, Geq, Eq, Neq, Mod, And, Or, Not };
    Kind kind = Kind::Lt;
    std::string var;
    std::uint64_t n = 0;       // bound, or residue for Mod
    std::uint64_t modulus = 0; // Mod only
    GuardPtr lhs;
    GuardPtr rhs;

    static GuardPtr atom(Kind k, std::string v, std::uint64_t n)
    {
        auto g = std::make_shared<Guard>();
        g->kind = k;
        g->var = std::move(v);
        g->n = n;
        return g;
    }
    static GuardPtr lt(std::string v, std::uint64_t n) { return atom(Kind::Lt, std::move(v), n); }
    static GuardPtr geq(std::string v, std::uint64_t n) { return atom(Kind::Geq, std::move(v), n); }
    static GuardPtr eq(std::string v, std::uint64_t n) { return atom(Kind::Eq, std::move(v), n); }
    static GuardPtr neq(std::string v, std::uint64_t n) { return atom(Kind::Neq, std::move(v), n); }
    static GuardPtr mod(std::string v, std::uint64_t residue, std::uint64_t modulus)
    {
        if (modulus < 2 || residue >= modulus)
            throw Error(ErrorKind::InvalidArgument, "modulo guard needs residue < modulus and modulus >= 2");
        auto g = std::make_shared<Guard>();
        g->kind = Kind::Mod;
        g->var = std::move(v);
        g->n = residue;
        g->modulus = modulus;
        return g;
    }
    static GuardPtr binary(Kind k, GuardPtr l, GuardPtr r)
    {
        auto g = std::make_shared<Guard>();
        g->kind = k;
        g->lhs = std::move(l);
        g->rhs = std::move(r);
        return g;
    }
    static GuardPtr conj(GuardPtr l, GuardPtr r) { return binary(Kind::And, std::move(l), std::move(r)); }
    static GuardPtr disj(GuardPtr l, GuardPtr r) { return binary(Kind::Or, std::move(l), std::move(r)); }
    static GuardPtr neg(GuardPtr g) { return binary(Kind::Not, std::move(g), nullptr); }

    bool is_atom() const { return kind != Kind::And && kind != Kind::Or && kind != Kind::Not; }
};

inline bool operator==(const Guard& a, const Guard& b)
{
    if (a.kind != b.kind)
        return false;
    if (a.is_atom())
        return a.var == b.var && a.n == b.n && a.modulus == b.modulus;
    auto same = [](const GuardPtr& x, const GuardPtr& y) { return (!x && !y) || (x && y && *x == *y); };
    return same(a.lhs, b.lhs) && same(a.rhs, b.rhs);
}

/// Truth value of a guard on a concrete state.
template <class Lookup>
bool holds(const Guard& g, const Lookup& value)
{
    switch (g.kind) {
    case Guard::Kind::Lt: return value(g.var) < g.n;
    case Guard::Kind::Geq: return value(g.var) >= g.n;
    case Guard::Kind::Eq: return value(g.var) == g.n;
    case Guard::Kind::Neq: return value(g.var) != g.n;
    case Guard::Kind::Mod: return value(g.var) % g.modulus == g.n;
    case Guard::Kind::And: return holds(*g.lhs, value) && holds(*g.rhs, value);
    case Guard::Kind::Or: return holds(*g.lhs, value) || holds(*g.rhs, value);
    case Guard::Kind::Not: return !holds(*g.lhs, value);
    }
    return false;
}

struct Statement;
using StmtPtr = std::shared_ptr<const Statement>;

struct Statement {
    enum class Kind {
        Skip,
        Diverge,
        AssignConst,  // var := n
        Decrement,    // var--
        IidIncrement, // var += iid(dist, countVar); empty countVar means a single sample
        SampleAssign, // var := dist
        AssignLinear, // var := constant + sum coef*v (surface syntax, removed by desugar)
        Choice,
        Seq,
        IfThenElse,
        While,
    };
    Kind kind = Kind::Skip;
    std::string var;
    std::uint64_t n = 0;
    Dist dist;
    std::string countVar;
    std::int64_t constant = 0;
    std::vector<std::pair<std::int64_t, std::string>> linear;
    Rational prob;
    GuardPtr guard;
    std::vector<StmtPtr> children; // Choice/IfThenElse: {left, right}; While: {body}; Seq: items

    static StmtPtr make(Kind k)
    {
        auto s = std::make_shared<Statement>();
        s->kind = k;
        return s;
    }
    static StmtPtr skip() { return make(Kind::Skip); }
    static StmtPtr diverge() { return make(Kind::Diverge); }
    static StmtPtr assign_const(std::string v, std::uint64_t n)
    {
        auto s = std::make_shared<Statement>();
        s->kind = Kind::AssignConst;
        s->var = std::move(v);
        s->n = n;
        return s;
    }
    static StmtPtr decrement(std::string v)
    {
        auto s = std::make_shared<Statement>();
        s->kind = Kind::Decrement;
        s->var = std::move(v);
        return s;
    }
    static StmtPtr iid(std::string v, Dist d, std::string countVar = {})
    {
        auto s = std::make_shared<Statement>();
        s->kind = Kind::IidIncrement;
        s->var = std::move(v);
        s->dist = std::move(d);
        s->countVar = std::move(countVar);
        return s;
    }
    static StmtPtr sample(std::string v, Dist d)
    {
        auto s = std::make_shared<Statement>();
        s->kind = Kind::SampleAssign;
        s->var = std::move(v);
        s->dist = std::move(d);
        return s;
    }
    static StmtPtr assign_linear(std::string v, std::int64_t constant,
                                 std::vector<std::pair<std::int64_t, std::string>> terms)
    {
        auto s = std::make_shared<Statement>();
        s->kind = Kind::AssignLinear;
        s->var = std::move(v);
        s->constant = constant;
        s->linear = std::move(terms);
        return s;
    }
    static StmtPtr choice(const Rational& p, StmtPtr l, StmtPtr r)
    {
        if (sgn(p) < 0 || p > 1)
            throw Error(ErrorKind::InvalidProbability, "choice probability " + p.get_str() + " outside [0,1]");
        auto s = std::make_shared<Statement>();
        s->kind = Kind::Choice;
        s->prob = p;
        s->children = {std::move(l), std::move(r)};
        return s;
    }
    static StmtPtr seq(std::vector<StmtPtr> items)
    {
        if (items.empty())
            return skip();
        if (items.size() == 1)
            return items.front();
        auto s = std::make_shared<Statement>();
        s->kind = Kind::Seq;
        for (auto& it : items) {
            if (it->kind == Kind::Seq)
                s->children.insert(s->children.end(), it->children.begin(), it->children.end());
            else
                s->children.push_back(std::move(it));
        }
        return s;
    }
    static StmtPtr ite(GuardPtr g, StmtPtr t, StmtPtr e)
    {
        auto s = std::make_shared<Statement>();
        s->kind = Kind::IfThenElse;
        s->guard = std::move(g);
        s->children = {std::move(t), std::move(e)};
        return s;
    }
    static StmtPtr loop(GuardPtr g, StmtPtr body)
    {
        auto s = std::make_shared<Statement>();
        s->kind = Kind::While;
        s->guard = std::move(g);
        s->children = {std::move(body)};
        return s;
    }

    const Statement& left() const { return *children.at(0); }
    const Statement& right() const { return *children.at(1); }
    const Statement& body() const { return *children.at(0); }
};

inline bool operator==(const Statement& a, const Statement& b)
{
    if (a.kind != b.kind || a.var != b.var || a.n != b.n || a.countVar != b.countVar || a.constant != b.constant
        || a.linear != b.linear || a.prob != b.prob || a.children.size() != b.children.size())
        return false;
    if ((a.kind == Statement::Kind::IidIncrement || a.kind == Statement::Kind::SampleAssign) && !(a.dist == b.dist))
        return false;
    if ((a.guard == nullptr) != (b.guard == nullptr) || (a.guard && !(*a.guard == *b.guard)))
        return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!(*a.children[i] == *b.children[i]))
            return false;
    return true;
}

struct Classification {
    bool isLoopFree = false;
    bool isRedip = false;
    bool isClRedip = false;
    bool isSingleLoop = false;
    /// Constant or sampling assignments occur (in the loop body for single loops).
    bool bodyHasAssignments = false;
    bool hasNestedLoops = false;
};

struct Program {
    std::vector<std::string> variables; // declaration (or first-use) order
    bool explicitDeclarations = false;
    StmtPtr body;
    Classification flags;

    /// Indeterminate of a program variable.
    static Var indeterminate(const std::string& v) { return indeterminate_of(v); }
};

} // namespace occinv
