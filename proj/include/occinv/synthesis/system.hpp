#pragma once

#include <set>
#include <vector>

#include "occinv/semantics/semantics.hpp"
#include "occinv/synthesis/template.hpp"

namespace occinv {

struct PolySystem {
    std::vector<Poly> equations; // each constrained = 0, over parameters only
    std::vector<Var> parameters;
};

namespace detail {

/// Integer-primitive with positive leading coefficient.
inline Poly primitive_equation(const Poly& p)
{
    if (p.is_zero_poly())
        return p;
    Integer lcmDen = 1;
    Integer gcdNum = 0;
    for (const auto& [m, c] : p.terms()) {
        mpz_lcm(lcmDen.get_mpz_t(), lcmDen.get_mpz_t(), c.get_den_mpz_t());
        mpz_gcd(gcdNum.get_mpz_t(), gcdNum.get_mpz_t(), c.get_num_mpz_t());
    }
    Rational scale(lcmDen, gcdNum);
    scale.canonicalize();
    if (sgn(p.leading().second) < 0)
        scale = -scale;
    return p * scale;
}

inline void add_equation(PolySystem& sys, std::set<Poly, bool (*)(const Poly&, const Poly&)>& seen, const Poly& e)
{
    Poly q = primitive_equation(e);
    if (q.is_zero_poly() || !seen.insert(q).second)
        return;
    sys.equations.push_back(q);
}

inline bool poly_less(const Poly& a, const Poly& b)
{
    return std::lexicographical_compare(a.terms().begin(), a.terms().end(), b.terms().begin(), b.terms().end(),
                                        [](const auto& x, const auto& y) {
                                            if (x.first != y.first)
                                                return GrlexLess{}(x.first, y.first);
                                            return x.second < y.second;
                                        });
}

} // namespace detail

/// Coefficient comparison of N_Phi * D_I - N_I * D_Phi after cancelling the
/// common factor of the two denominators.
inline PolySystem build_system(const Template& t, const Statement& loop, const GfMeasure& g)
{
    GfMeasure phi = char_functional(loop, g, t.form);
    const Poly& ni = t.form.num();
    const Poly& di = t.form.den();
    Poly lhs = phi.num();
    Poly rhs = ni;
    if (auto q = divide_exact(phi.den(), di)) {
        rhs = ni * *q;
    } else if (auto gg = try_gcd(phi.den(), di); gg && !gg->is_constant()) {
        lhs = phi.num() * *divide_exact(di, *gg);
        rhs = ni * *divide_exact(phi.den(), *gg);
    } else {
        lhs = phi.num() * di;
        rhs = ni * phi.den();
    }
    Poly diff = lhs - rhs;
    PolySystem sys;
    sys.parameters = t.parameters;
    std::set<Poly, bool (*)(const Poly&, const Poly&)> seen(detail::poly_less);
    for (const auto& [m, coeff] : diff.group_by([](Var v) { return !is_parameter(v); }))
        detail::add_equation(sys, seen, coeff);
    return sys;
}

inline bool satisfies(const PolySystem& sys, const Valuation& tau)
{
    for (const Poly& e : sys.equations) {
        Rational v = evaluate(e, [&](Var p) {
            auto it = tau.find(p);
            return it == tau.end() ? Rational(0) : it->second;
        });
        if (sgn(v) != 0)
            return false;
    }
    return true;
}

} // namespace occinv
