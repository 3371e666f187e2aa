#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "occinv/oracle/sparse.hpp"
#include "occinv/semantics/semantics.hpp"

namespace occinv {

namespace detail {

/// Point masses of `dist`, truncated at `cap` support points for unbounded
/// distributions.
inline std::vector<Rational> dist_pmf(const Dist& d, std::uint64_t cap)
{
    std::uint64_t top;
    switch (d.kind) {
    case Dist::Kind::Bernoulli: top = 1; break;
    case Dist::Kind::Uniform: top = d.b; break;
    case Dist::Kind::Dirac: top = d.a; break;
    default: top = cap == 0 ? 0 : cap - 1; break;
    }
    std::vector<Rational> pmf(top + 1, Rational(0));
    Var t = pgf_variable();
    for (const auto& [m, c] : series_expand(dist_pgf(d), static_cast<std::uint32_t>(top))) {
        std::uint32_t e = m.exponent(t);
        if (e <= top)
            pmf[e] += c;
    }
    while (!pmf.empty() && sgn(pmf.back()) == 0)
        pmf.pop_back();
    return pmf;
}

inline std::vector<Rational> convolve(const std::vector<Rational>& a, const std::vector<Rational>& b)
{
    if (a.empty() || b.empty())
        return {};
    std::vector<Rational> out(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        if (sgn(a[i]) != 0)
            for (std::size_t j = 0; j < b.size(); ++j)
                out[i + j] += a[i] * b[j];
    return out;
}

class Executor {
public:
    explicit Executor(std::uint64_t cap) : cap_(cap) {}

    SparseMeasure run(const Statement& s, const SparseMeasure& m)
    {
        using K = Statement::Kind;
        switch (s.kind) {
        case K::Skip: return m;
        case K::Diverge: {
            SparseMeasure out = m.empty_like();
            out.residual = m.residual;
            return out;
        }
        case K::AssignConst:
            return map_states(m, [&](State st) {
                st[m.index(s.var)] = s.n;
                return st;
            });
        case K::Decrement:
            return map_states(m, [&](State st) {
                auto& x = st[m.index(s.var)];
                if (x > 0)
                    --x;
                return st;
            });
        case K::AssignLinear:
            return map_states(m, [&](State st) {
                std::int64_t value = s.constant;
                for (const auto& [k, v] : s.linear)
                    value += k * static_cast<std::int64_t>(st[m.index(v)]);
                st[m.index(s.var)] = value > 0 ? static_cast<std::uint64_t>(value) : 0;
                return st;
            });
        case K::IidIncrement:
        case K::SampleAssign: return sample(s, m);
        case K::Choice: {
            SparseMeasure out = run(s.left(), m);
            SparseMeasure right = run(s.right(), m);
            for (auto& [st, w] : out.entries)
                w *= s.prob;
            out.residual *= s.prob;
            out.add(right, 1 - s.prob);
            return out;
        }
        case K::Seq: {
            SparseMeasure cur = m;
            for (const auto& c : s.children)
                cur = run(*c, cur);
            return cur;
        }
        case K::IfThenElse: {
            SparseMeasure thenPart = restrict_guard(m, *s.guard);
            SparseMeasure elsePart = restrict_guard(m, *s.guard, true);
            elsePart.residual = m.residual;
            SparseMeasure out = run(s.left(), thenPart);
            out.add(run(s.right(), elsePart));
            return out;
        }
        case K::While: throw Error(ErrorKind::NestedLoop, "the oracle executes loop-free statements only");
        }
        return m;
    }

private:
    std::uint64_t cap_;
    std::map<std::pair<const Statement*, std::uint64_t>, std::vector<Rational>> convCache_;

    template <class F>
    static SparseMeasure map_states(const SparseMeasure& m, F&& f)
    {
        SparseMeasure out = m.empty_like();
        out.residual = m.residual;
        for (const auto& [st, w] : m.entries)
            out.add(f(st), w);
        return out;
    }

    const std::vector<Rational>& iid_pmf(const Statement& s, std::uint64_t count)
    {
        auto key = std::make_pair(&s, count);
        auto it = convCache_.find(key);
        if (it != convCache_.end())
            return it->second;
        std::vector<Rational> r{Rational(1)};
        std::vector<Rational> base = dist_pmf(s.dist, cap_);
        for (std::uint64_t i = 0; i < count; ++i)
            r = convolve(r, base);
        return convCache_.emplace(key, std::move(r)).first->second;
    }

    SparseMeasure sample(const Statement& s, const SparseMeasure& m)
    {
        SparseMeasure out = m.empty_like();
        out.residual = m.residual;
        std::size_t xi = m.index(s.var);
        bool assign = s.kind == Statement::Kind::SampleAssign;
        Rational lost = 0;
        for (const auto& [st, w] : m.entries) {
            std::uint64_t count = 1;
            if (!assign && !s.countVar.empty())
                count = st[m.index(s.countVar)];
            const auto& pmf = iid_pmf(s, count);
            Rational kept = 0;
            for (std::size_t k = 0; k < pmf.size(); ++k) {
                if (sgn(pmf[k]) == 0)
                    continue;
                State next = st;
                next[xi] = (assign ? 0 : st[xi]) + k;
                out.add(next, w * pmf[k]);
                kept += pmf[k];
            }
            lost += w * (1 - kept);
        }
        out.residual += lost;
        return out;
    }
};

} // namespace detail

/// Exact pushforward of a loop-free statement. Unbounded distributions keep
/// `supportCap` support points; the truncated tail mass is added to the residual.
inline SparseMeasure exec_loopfree(const Statement& stmt, const SparseMeasure& m, std::uint64_t supportCap = 64)
{
    return detail::Executor(supportCap).run(stmt, m);
}

struct KleeneResult {
    SparseMeasure occLower;
    SparseMeasure postLower;
    /// Mass still inside the loop after the last step plus truncated mass.
    Rational residual;
    /// residualTrace[k] is the residual after k steps.
    std::vector<Rational> residualTrace;
};

/// occLower = sum_{k=0..K} T^k(g) with T = body o [guard]; the guard-violating
/// part of the last iterate is still counted, the guarded part is residual.
inline KleeneResult kleene_iterate(const Statement& loop, const SparseMeasure& g, std::size_t steps,
                                   std::uint64_t supportCap = 64)
{
    if (loop.kind != Statement::Kind::While)
        throw Error(ErrorKind::InvalidArgument, "kleene_iterate needs a while loop");
    detail::Executor exec(supportCap);
    KleeneResult r;
    r.occLower = g.empty_like();
    SparseMeasure cur = g;
    cur.residual = 0;
    Rational truncated = g.residual;
    for (std::size_t k = 0;; ++k) {
        for (const auto& [s, w] : cur.entries)
            r.occLower.add(s, w);
        SparseMeasure inside = restrict_guard(cur, *loop.guard);
        r.residualTrace.push_back(truncated + inside.mass());
        if (k == steps)
            break;
        cur = exec.run(loop.body(), inside);
        truncated += cur.residual;
        cur.residual = 0;
    }
    r.residual = r.residualTrace.back();
    r.occLower.residual = r.residual;
    r.postLower = restrict_guard(r.occLower, *loop.guard, true);
    r.postLower.residual = r.residual;
    return r;
}

struct CrosscheckEntry {
    Monomial monomial;
    Rational symbolic;
    Rational oracle;
};

struct CrosscheckReport {
    std::vector<CrosscheckEntry> violations; // symbolic below the oracle lower bound
    std::vector<CrosscheckEntry> warnings;   // gap above the oracle residual
    Rational maxGap = 0;  // largest per-monomial gap
    std::optional<Rational> massGap; // |f| - tracked oracle mass, when |f| is finite
    Rational residual = 0;
    std::size_t compared = 0;

    bool sound() const { return violations.empty(); }
    bool tight() const { return warnings.empty(); }
};

/// Compares the series of f up to total degree K with an oracle lower bound.
inline CrosscheckReport crosscheck(const RationalClosedForm& f, const SparseMeasure& m, std::uint32_t K)
{
    CrosscheckReport r;
    r.residual = m.residual;
    SeriesCoefficients sym = series_expand(f, K);
    SeriesCoefficients orc = m.to_series();
    std::set<Monomial, GrlexLess> keys;
    for (const auto& [mono, c] : sym)
        keys.insert(mono);
    for (const auto& [mono, c] : orc)
        if (mono.degree() <= K)
            keys.insert(mono);
    for (const Monomial& mono : keys) {
        auto si = sym.find(mono);
        auto oi = orc.find(mono);
        Rational s = si == sym.end() ? Rational(0) : si->second;
        Rational o = oi == orc.end() ? Rational(0) : oi->second;
        ++r.compared;
        Rational gap = s - o;
        if (sgn(gap) < 0) {
            r.violations.push_back({mono, s, o});
            continue;
        }
        r.maxGap = std::max(r.maxGap, gap);
        if (gap > m.residual)
            r.warnings.push_back({mono, s, o});
    }
    if (nonnegative_shape(f) && !f.has_parameters())
        if (ExtendedMass total = mass(f); total.is_finite())
            r.massGap = total.value() - m.mass();
    return r;
}

/// A guarded state reachable within `steps` iterations that the body maps to
/// itself with probability one: its occupation is infinite.
inline std::optional<State> find_stuck_state(const Statement& loop, const SparseMeasure& g, std::size_t steps = 32,
                                             std::uint64_t supportCap = 16)
{
    detail::Executor exec(supportCap);
    SparseMeasure cur = g;
    std::set<State> tried;
    for (std::size_t k = 0; k <= steps && !cur.entries.empty(); ++k) {
        SparseMeasure inside = restrict_guard(cur, *loop.guard);
        for (const auto& [s, w] : inside.entries) {
            if (!tried.insert(s).second)
                continue;
            SparseMeasure img = exec.run(loop.body(), point_mass(g.vars, s));
            if (img.entries.size() == 1 && img.entries.begin()->first == s && img.entries.begin()->second == 1)
                return s;
        }
        cur = exec.run(loop.body(), inside);
    }
    return std::nullopt;
}

} // namespace occinv
