#pragma once

#include <optional>

#include "occinv/algebra/polynomial.hpp"

namespace occinv {

/// Term-count limit for the recursive gcd; exceeding it aborts the gcd and
/// callers fall back to monomial-content reduction.
struct GcdBudget {
    std::size_t maxTerms = 600;
    std::size_t maxSteps = 4000;
    std::size_t steps = 0;
};

namespace detail {

struct GcdAborted {};

inline void check_budget(const Poly& p, GcdBudget& budget)
{
    if (p.size() > budget.maxTerms || ++budget.steps > budget.maxSteps)
        throw GcdAborted{};
}

inline Poly make_monic(const Poly& p)
{
    if (p.is_zero_poly())
        return p;
    Rational lc = p.leading().second;
    if (lc == 1)
        return p;
    Rational inv = 1 / lc;
    return p * inv;
}

} // namespace detail

/// Exact multivariate division; nullopt when `divisor` does not divide `dividend`.
inline std::optional<Poly> divide_exact(const Poly& dividend, const Poly& divisor)
{
    if (divisor.is_zero_poly())
        throw Error(ErrorKind::InvalidArgument, "division by zero polynomial");
    Poly quotient;
    Poly rest = dividend;
    const auto& [lm, lc] = divisor.leading();
    while (!rest.is_zero_poly()) {
        const auto& [m, c] = rest.leading();
        if (!lm.divides(m))
            return std::nullopt;
        Rational q = c / lc;
        Monomial qm = m.quotient(lm);
        quotient.add_term(qm, q);
        rest -= divisor.times_monomial(qm) * q;
    }
    return quotient;
}

inline Poly gcd(const Poly& a, const Poly& b, GcdBudget& budget);

namespace detail {

/// Gcd of the coefficients of `p` viewed as a polynomial in `v`.
inline Poly content_in(const Poly& p, Var v, GcdBudget& budget)
{
    Poly g;
    for (const auto& [k, coeff] : p.coefficients_in(v)) {
        g = g.is_zero_poly() ? make_monic(coeff) : gcd(g, coeff, budget);
        if (g.is_constant())
            return Poly(1);
    }
    return g;
}

inline Poly primitive_part_in(const Poly& p, Var v, GcdBudget& budget)
{
    Poly c = content_in(p, v, budget);
    if (c.is_constant())
        return make_monic(p);
    return make_monic(*divide_exact(p, c));
}

/// Pseudo-remainder of a by b with respect to v.
inline Poly pseudo_remainder(Poly a, const Poly& b, Var v, GcdBudget& budget)
{
    auto db = b.degree(v);
    Poly lcb = b.coefficient_of(v, db);
    while (!a.is_zero_poly() && a.degree(v) >= db) {
        auto da = a.degree(v);
        Poly lca = a.coefficient_of(v, da);
        a = lcb * a - (lca * b).times_monomial(Monomial::of(v, da - db));
        a = make_monic(a);
        check_budget(a, budget);
    }
    return a;
}

/// Sound coprimality test: for each variable x, evaluates every other variable
/// at a point where neither leading coefficient in x vanishes; a constant
/// univariate image gcd for every x proves gcd(a, b) has degree 0 throughout.
inline bool coprime_by_evaluation(const Poly& a, const Poly& b, const std::set<Var>& vars, GcdBudget& budget)
{
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (Var x : vars) {
        bool decided = false;
        for (int attempt = 0; attempt < 3 && !decided; ++attempt) {
            Poly ia = a, ib = b;
            std::size_t k = static_cast<std::size_t>(attempt);
            for (Var y : vars) {
                if (y == x)
                    continue;
                Rational value(primes[k % 12] + attempt * 37, 1 + static_cast<long>(k / 12));
                ia = ia.substitute(y, value);
                ib = ib.substitute(y, value);
                ++k;
            }
            if (ia.degree(x) != a.degree(x) || ib.degree(x) != b.degree(x))
                continue;
            if (!gcd(ia, ib, budget).is_constant())
                return false;
            decided = true;
        }
        if (!decided)
            return false;
    }
    return true;
}

} // namespace detail

/// Greatest common divisor, monic in graded lexicographic order. Computed by
/// recursive content / primitive-part reduction one variable at a time.
/// Throws detail::GcdAborted when the term budget is exceeded.
inline Poly gcd(const Poly& a, const Poly& b, GcdBudget& budget)
{
    using namespace detail;
    if (a.is_zero_poly())
        return make_monic(b);
    if (b.is_zero_poly())
        return make_monic(a);
    if (a.is_constant() || b.is_constant())
        return Poly(1);
    check_budget(a, budget);
    check_budget(b, budget);

    Monomial ma = a.monomial_content();
    Monomial mb = b.monomial_content();
    Poly monomialPart(Monomial::gcd(ma, mb));
    Poly pa = a.divide_monomial(ma);
    Poly pb = b.divide_monomial(mb);
    if (pa.is_constant() || pb.is_constant())
        return monomialPart;

    auto va = pa.variables();
    auto vb = pb.variables();
    for (Var v : va)
        if (!vb.count(v))
            return monomialPart * gcd(content_in(pa, v, budget), pb, budget);
    for (Var v : vb)
        if (!va.count(v))
            return monomialPart * gcd(pa, content_in(pb, v, budget), budget);

    if (va.size() > 1 && coprime_by_evaluation(pa, pb, va, budget))
        return monomialPart;

    Var x = *va.begin();
    Poly ca = content_in(pa, x, budget);
    Poly cb = content_in(pb, x, budget);
    Poly contentGcd = gcd(ca, cb, budget);
    Poly f = ca.is_constant() ? make_monic(pa) : *divide_exact(pa, ca);
    Poly g = cb.is_constant() ? make_monic(pb) : *divide_exact(pb, cb);
    if (f.degree(x) < g.degree(x))
        std::swap(f, g);
    while (true) {
        Poly r = pseudo_remainder(f, g, x, budget);
        if (r.is_zero_poly())
            break;
        if (r.degree(x) == 0) {
            g = Poly(1);
            break;
        }
        f = std::move(g);
        g = primitive_part_in(r, x, budget);
    }
    if (!g.is_constant())
        g = primitive_part_in(g, x, budget);
    return make_monic(monomialPart * contentGcd * g);
}

inline Poly gcd(const Poly& a, const Poly& b)
{
    GcdBudget budget{std::size_t(-1), std::size_t(-1)};
    return gcd(a, b, budget);
}

/// Gcd with a fallback: nullopt when the budget was exceeded.
inline std::optional<Poly> try_gcd(const Poly& a, const Poly& b, GcdBudget budget = {})
{
    try {
        return gcd(a, b, budget);
    } catch (const detail::GcdAborted&) {
        return std::nullopt;
    }
}

} // namespace occinv
