#pragma once

#include <algorithm>
#include <string>

#include "occinv/algebra/closed_form.hpp"
#include "occinv/algebra/cyclotomic.hpp"
#include "occinv/program/ast.hpp"
#include "occinv/program/desugar.hpp"
#include "occinv/program/printer.hpp"

namespace occinv {

/// Generating function of a measure over program states.
using GfMeasure = RationalClosedForm;

/// Largest modulus accepted by the modulo-guard filter.
inline constexpr std::uint64_t kMaxFilterModulus = 64;

/// Terms of f whose exponent of X_v is below n.
inline GfMeasure restrict(const GfMeasure& f, Var v, std::uint64_t n)
{
    if (n == 0 || f.is_zero())
        return GfMeasure();
    const Poly& num = f.num();
    const Poly& den = f.den();
    if (!den.contains(v)) {
        Poly kept;
        for (const auto& [m, c] : num.terms())
            if (m.exponent(v) < n)
                kept.add_term(m, c);
        return GfMeasure::normalize(kept, den);
    }
    // Series in X_v with coefficients P_i / D0^{i+1}:
    // P_i = N_i D0^i - sum_{j=1..i} D_j P_{i-j} D0^{j-1}.
    auto N = num.coefficients_in(v);
    auto D = den.coefficients_in(v);
    auto part = [](const std::map<std::uint32_t, Poly>& parts, std::uint64_t k) {
        auto it = parts.find(static_cast<std::uint32_t>(k));
        return it == parts.end() ? Poly() : it->second;
    };
    Poly d0 = part(D, 0);
    std::vector<Poly> d0pow{Poly(1)};
    for (std::uint64_t i = 1; i <= n; ++i)
        d0pow.push_back(d0pow.back() * d0);
    std::vector<Poly> P;
    for (std::uint64_t i = 0; i < n; ++i) {
        Poly pi = part(N, i) * d0pow[i];
        for (std::uint64_t j = 1; j <= i; ++j) {
            Poly dj = part(D, j);
            if (!dj.is_zero_poly())
                pi -= dj * P[i - j] * d0pow[j - 1];
        }
        P.push_back(std::move(pi));
    }
    Poly outNum;
    for (std::uint64_t i = 0; i < n; ++i)
        if (!P[i].is_zero_poly())
            outNum += (P[i] * d0pow[n - 1 - i]).times_monomial(Monomial::of(v, static_cast<std::uint32_t>(i)));
    return GfMeasure::normalize(outNum, d0pow[n]);
}

/// Terms of f with exponent of X_v congruent to c modulo d, via the norm
/// Q = prod_{j=1}^{d-1} D(zeta^j X_v): D*Q only involves powers X_v^d.
inline GfMeasure filter_modulo(const GfMeasure& f, Var v, std::uint64_t c, std::uint64_t d)
{
    if (d < 2 || c >= d)
        throw Error(ErrorKind::InvalidArgument, "modulo filter needs c < d and d >= 2");
    if (d > kMaxFilterModulus)
        throw Error(ErrorKind::UnsupportedModFilter, "modulus " + std::to_string(d) + " exceeds the filter limit");
    if (f.is_zero())
        return f;
    Poly num = f.num();
    Poly den = f.den();
    bool denInPowers = true;
    for (const auto& [m, coef] : den.terms())
        if (m.exponent(v) % d != 0)
            denInPowers = false;
    if (!denInPowers) {
        auto order = static_cast<std::uint32_t>(d);
        using CPoly = Polynomial<Cyclotomic>;
        CPoly q(1);
        for (std::uint64_t j = 1; j < d; ++j) {
            CPoly rotated;
            for (const auto& [m, coef] : den.terms())
                rotated.add_term(m, Cyclotomic::zeta(order, j * m.exponent(v)) * Cyclotomic(coef));
            q = q * rotated;
        }
        Poly qr;
        for (const auto& [m, coef] : q.terms()) {
            if (!coef.is_rational())
                throw Error(ErrorKind::UnsupportedModFilter, "norm polynomial has irrational coefficients");
            qr.add_term(m, coef.rational_part());
        }
        num = num * qr;
        den = den * qr;
        for (const auto& [m, coef] : den.terms())
            if (m.exponent(v) % d != 0)
                throw Error(ErrorKind::UnsupportedModFilter, "denominator norm is not a polynomial in X^d");
    }
    Poly kept;
    for (const auto& [m, coef] : num.terms())
        if (m.exponent(v) % d == c)
            kept.add_term(m, coef);
    return GfMeasure::normalize(kept, den);
}

/// [g]·f for a rectangular or modulo guard.
inline GfMeasure restrict_guard(const GfMeasure& f, const Guard& g)
{
    if (f.is_zero())
        return f;
    switch (g.kind) {
    case Guard::Kind::Lt: return restrict(f, indeterminate_of(g.var), g.n);
    case Guard::Kind::Geq: return f - restrict(f, indeterminate_of(g.var), g.n);
    case Guard::Kind::Eq:
    case Guard::Kind::Neq: return restrict_guard(f, *desugar_guard(std::make_shared<Guard>(g)));
    case Guard::Kind::Mod: return filter_modulo(f, indeterminate_of(g.var), g.n, g.modulus);
    case Guard::Kind::And: return restrict_guard(restrict_guard(f, *g.lhs), *g.rhs);
    case Guard::Kind::Or: {
        GfMeasure a = restrict_guard(f, *g.lhs);
        GfMeasure rest = f - a;
        return a + restrict_guard(rest, *g.rhs);
    }
    case Guard::Kind::Not: return f - restrict_guard(f, *g.lhs);
    }
    return f;
}

namespace detail {

/// p[X_v / hn/hd] scaled by hd^deg_v(p); returns {scaled, deg_v(p)}.
inline std::pair<Poly, std::uint32_t> substitute_cleared(const Poly& p, Var v, const Poly& hn, const Poly& hd)
{
    auto parts = p.coefficients_in(v);
    std::uint32_t deg = parts.empty() ? 0 : parts.rbegin()->first;
    if (hd == Poly(1))
        return {p.substitute(v, hn), deg};
    std::vector<Poly> hnPow{Poly(1)};
    std::vector<Poly> hdPow{Poly(1)};
    for (std::uint32_t i = 1; i <= deg; ++i) {
        hnPow.push_back(hnPow.back() * hn);
        hdPow.push_back(hdPow.back() * hd);
    }
    Poly out;
    for (const auto& [i, coeff] : parts)
        out += coeff * hnPow[i] * hdPow[deg - i];
    return {out, deg};
}

inline bool program_constant_is_zero(const Poly& p) { return program_constant_part(p).is_zero_poly(); }

/// Splits p by repeatedly extracting contents with respect to single variables.
inline std::vector<Poly> content_factors(const Poly& p)
{
    std::vector<Poly> work{p}, out;
    GcdBudget budget;
    while (!work.empty()) {
        Poly q = std::move(work.back());
        work.pop_back();
        bool split = false;
        for (Var v : q.variables()) {
            if (q.degree(v) == 0)
                continue;
            std::optional<Poly> c;
            try {
                c = content_in(q, v, budget);
            } catch (const GcdAborted&) {
                break;
            }
            if (c->is_constant())
                continue;
            work.push_back(*c);
            work.push_back(*divide_exact(q, *c));
            split = true;
            break;
        }
        if (!split)
            out.push_back(std::move(q));
    }
    return out;
}

/// Schur-Cohn: all roots of the univariate polynomial a[0] + ... + a[n] z^n
/// lie strictly outside the closed unit disk.
inline bool roots_outside_unit_disk(std::vector<Rational> a)
{
    while (!a.empty() && sgn(a.back()) == 0)
        a.pop_back();
    // Reversal maps roots outside the disk to roots inside.
    std::reverse(a.begin(), a.end());
    while (a.size() > 1) {
        std::size_t n = a.size() - 1;
        const Rational lead = a[n];
        const Rational low = a[0];
        if (abs(lead) <= abs(low))
            return false;
        std::vector<Rational> next(n);
        for (std::size_t k = 1; k <= n; ++k)
            next[k - 1] = lead * a[k] - low * a[n - k];
        while (next.size() > 1 && sgn(next.back()) == 0)
            next.pop_back();
        a = std::move(next);
    }
    return true;
}

/// Whether summing out v from a series with denominator factor q converges.
inline bool factor_converges_at_one(Poly q, Var v)
{
    if (!q.contains(v))
        return true;
    if (sgn(q.constant_term()) < 0)
        q = -q;
    bool shape = sgn(q.constant_term()) > 0;
    for (const auto& [m, c] : q.terms())
        if (!m.is_one() && sgn(c) > 0)
            shape = false;
    if (shape)
        return sgn(q.substitute(v, Rational(1)).constant_term()) > 0;
    if (q.variables().size() != 1)
        return false;
    std::vector<Rational> coeffs(q.degree(v) + 1);
    for (const auto& [k, c] : q.coefficients_in(v))
        coeffs[k] = c.constant_term();
    return roots_outside_unit_disk(std::move(coeffs));
}

} // namespace detail

/// f[X_v / 1]: sums out variable v. Instantiated forms are checked for
/// convergence; parametric forms are only required to keep a valid
/// denominator (their instances are re-checked concretely).
inline GfMeasure marginalize(const GfMeasure& f, Var v)
{
    if (f.is_zero())
        return f;
    if (!f.den().contains(v))
        return GfMeasure::normalize(f.num().substitute(v, Rational(1)), f.den());
    Poly den1 = f.den().substitute(v, Rational(1));
    Poly num1 = f.num().substitute(v, Rational(1));
    auto diverges = [&] {
        return Error(ErrorKind::DivergentMarginalization,
                     "summing out " + var_name(v) + " in " + to_string(f) + " does not converge");
    };
    if (!f.has_parameters()) {
        for (const auto& q : detail::content_factors(f.den()))
            if (!detail::factor_converges_at_one(q, v))
                throw diverges();
    } else if (detail::program_constant_is_zero(den1)) {
        throw diverges();
    }
    return GfMeasure::normalize(num1, den1);
}

/// f[X_v / h]; h must have zero constant term, or be the constant 1.
inline GfMeasure substitute(const GfMeasure& f, Var v, const GfMeasure& h)
{
    if (h.is_polynomial() && h.num() == Poly(1))
        return marginalize(f, v);
    if (!detail::program_constant_is_zero(h.num()))
        throw Error(ErrorKind::ConstantTermNonzero, "substitute " + to_string(h) + " has a nonzero constant term");
    if (f.is_zero())
        return f;
    auto [a, dn] = detail::substitute_cleared(f.num(), v, h.num(), h.den());
    auto [b, dd] = detail::substitute_cleared(f.den(), v, h.num(), h.den());
    if (dn >= dd)
        return GfMeasure::normalize(a, b * h.den().pow(dn - dd));
    return GfMeasure::normalize(a * h.den().pow(dd - dn), b);
}

/// Coefficient-wise derivative in X_v (quotient rule).
inline GfMeasure formal_derivative(const GfMeasure& f, Var v)
{
    const Poly& n = f.num();
    const Poly& d = f.den();
    return GfMeasure::normalize(n.derivative(v) * d - n * d.derivative(v), d * d);
}

/// Distribution generating function in the indeterminate X_v.
inline GfMeasure dist_in(const Dist& dist, Var v)
{
    return substitute(dist_pgf(dist), pgf_variable(), GfMeasure(Poly::variable(v)));
}

namespace detail {

/// Effect of `v := v - 1` with truncation at zero.
inline GfMeasure decrement(const GfMeasure& f, Var v)
{
    if (f.is_zero())
        return f;
    GfMeasure low = restrict(f, v, 1);
    GfMeasure high = f - low;
    if (high.is_zero())
        return low;
    GfMeasure shifted = GfMeasure::normalize(high.num().shift_down(v, 1), high.den());
    return shifted + low;
}

} // namespace detail

/// pm-semantics of a loop-free statement on generating functions.
inline GfMeasure apply_statement(const Statement& s, const GfMeasure& f)
{
    using K = Statement::Kind;
    switch (s.kind) {
    case K::Skip: return f;
    case K::Diverge: return GfMeasure();
    case K::AssignConst: {
        Var v = indeterminate_of(s.var);
        return marginalize(f, v) * GfMeasure(Poly(Monomial::of(v, static_cast<std::uint32_t>(s.n))));
    }
    case K::Decrement: return detail::decrement(f, indeterminate_of(s.var));
    case K::IidIncrement: {
        Var v = indeterminate_of(s.var);
        GfMeasure sample = dist_in(s.dist, v);
        if (s.countVar.empty())
            return f * sample;
        Var y = indeterminate_of(s.countVar);
        return substitute(f, y, GfMeasure(Poly::variable(y)) * sample);
    }
    case K::SampleAssign: {
        Var v = indeterminate_of(s.var);
        return marginalize(f, v) * dist_in(s.dist, v);
    }
    case K::AssignLinear: return apply_statement(*desugar(std::make_shared<Statement>(s)), f);
    case K::Choice: {
        GfMeasure out;
        if (sgn(s.prob) > 0)
            out = out + apply_statement(s.left(), f * s.prob);
        Rational q = 1 - s.prob;
        if (sgn(q) > 0)
            out = out + apply_statement(s.right(), f * q);
        return out;
    }
    case K::Seq: {
        GfMeasure cur = f;
        for (const auto& c : s.children)
            cur = apply_statement(*c, cur);
        return cur;
    }
    case K::IfThenElse: {
        GfMeasure yes = restrict_guard(f, *s.guard);
        GfMeasure no = f - yes;
        return apply_statement(s.left(), yes) + apply_statement(s.right(), no);
    }
    case K::While:
        throw Error(ErrorKind::NestedLoop, "loops have no closed-form transformer: " + to_string(*s.guard));
    }
    return f;
}

/// Phi_{g,C}(I) = g + pm[body]([guard] I).
inline GfMeasure char_functional(const Statement& loop, const GfMeasure& g, const GfMeasure& inv)
{
    if (loop.kind != Statement::Kind::While)
        throw Error(ErrorKind::InvalidArgument, "characteristic functional needs a while loop");
    return g + apply_statement(loop.body(), restrict_guard(inv, *loop.guard));
}

} // namespace occinv
