#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "occinv/algebra/monomial.hpp"
#include "occinv/algebra/rational.hpp"

namespace occinv {

/// Sparse multivariate polynomial over a commutative coefficient ring.
/// Terms are kept in graded lexicographic order and never hold a zero
/// coefficient. `Coeff` needs `is_zero(const Coeff&)` found by ADL and
/// construction from int.
template <class Coeff>
class Polynomial {
public:
    using Terms = std::map<Monomial, Coeff, GrlexLess>;

    Polynomial() = default;
    Polynomial(int c) : Polynomial(Coeff(c)) {}
    Polynomial(const Coeff& c)
    {
        if (!is_zero(c))
            terms_.emplace(Monomial{}, c);
    }
    Polynomial(const Monomial& m, const Coeff& c = Coeff(1))
    {
        if (!is_zero(c))
            terms_.emplace(m, c);
    }

    static Polynomial variable(Var v, std::uint32_t exponent = 1) { return Polynomial(Monomial::of(v, exponent)); }

    const Terms& terms() const noexcept { return terms_; }
    bool is_zero_poly() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }

    bool is_constant() const noexcept
    {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
    }

    Coeff coefficient(const Monomial& m) const
    {
        auto it = terms_.find(m);
        return it == terms_.end() ? Coeff(0) : it->second;
    }

    Coeff constant_term() const { return coefficient(Monomial{}); }

    /// Highest term in graded lexicographic order; requires a nonzero polynomial.
    const std::pair<const Monomial, Coeff>& leading() const { return *terms_.rbegin(); }

    std::uint32_t total_degree() const
    {
        return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
    }

    std::uint32_t degree(Var v) const
    {
        std::uint32_t d = 0;
        for (const auto& [m, c] : terms_)
            d = std::max(d, m.exponent(v));
        return d;
    }

    std::uint32_t min_degree(Var v) const
    {
        if (terms_.empty())
            return 0;
        std::uint32_t d = UINT32_MAX;
        for (const auto& [m, c] : terms_)
            d = std::min(d, m.exponent(v));
        return d;
    }

    std::set<Var> variables() const
    {
        std::set<Var> vars;
        for (const auto& [m, c] : terms_)
            for (const auto& [v, e] : m.powers())
                vars.insert(v);
        return vars;
    }

    bool contains(Var v) const
    {
        for (const auto& [m, c] : terms_)
            if (m.contains(v))
                return true;
        return false;
    }

    void add_term(const Monomial& m, const Coeff& c)
    {
        if (is_zero(c))
            return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (is_zero(it->second))
                terms_.erase(it);
        }
    }

    Polynomial& operator+=(const Polynomial& o)
    {
        for (const auto& [m, c] : o.terms_)
            add_term(m, c);
        return *this;
    }

    Polynomial& operator-=(const Polynomial& o)
    {
        for (const auto& [m, c] : o.terms_)
            add_term(m, -c);
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

    friend Polynomial operator-(const Polynomial& a)
    {
        Polynomial r;
        for (const auto& [m, c] : a.terms_)
            r.terms_.emplace_hint(r.terms_.end(), m, -c);
        return r;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        Polynomial r;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) {
                Coeff prod = ca * cb;
                r.add_term(ma * mb, prod);
            }
        return r;
    }

    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    friend Polynomial operator*(const Polynomial& a, const Coeff& s)
    {
        if (is_zero(s))
            return {};
        Polynomial r;
        for (const auto& [m, c] : a.terms_) {
            Coeff prod = c * s;
            r.terms_.emplace_hint(r.terms_.end(), m, prod);
        }
        return r;
    }

    friend Polynomial operator*(const Coeff& s, const Polynomial& a) { return a * s; }

    Polynomial times_monomial(const Monomial& mono) const
    {
        Polynomial r;
        for (const auto& [m, c] : terms_)
            r.terms_.emplace(m * mono, c);
        return r;
    }

    Polynomial pow(std::uint32_t e) const
    {
        Polynomial result(Coeff(1));
        Polynomial base = *this;
        while (e > 0) {
            if (e & 1U)
                result *= base;
            e >>= 1U;
            if (e > 0)
                base *= base;
        }
        return result;
    }

    bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }

    /// Coefficients with respect to `v`: exponent -> polynomial free of `v`.
    std::map<std::uint32_t, Polynomial> coefficients_in(Var v) const
    {
        std::map<std::uint32_t, Polynomial> out;
        for (const auto& [m, c] : terms_)
            out[m.exponent(v)].add_term(m.without(v), c);
        return out;
    }

    /// Coefficient of v^k as a polynomial in the remaining variables.
    Polynomial coefficient_of(Var v, std::uint32_t k) const
    {
        Polynomial out;
        for (const auto& [m, c] : terms_)
            if (m.exponent(v) == k)
                out.add_term(m.without(v), c);
        return out;
    }

    /// Groups terms by the part of the monomial selected by `keep`.
    std::map<Monomial, Polynomial, GrlexLess> group_by(const std::function<bool(Var)>& keep) const
    {
        std::map<Monomial, Polynomial, GrlexLess> out;
        for (const auto& [m, c] : terms_) {
            Monomial kept;
            Monomial rest;
            for (const auto& [v, e] : m.powers()) {
                if (keep(v))
                    kept = kept * Monomial::of(v, e);
                else
                    rest = rest * Monomial::of(v, e);
            }
            out[kept].add_term(rest, c);
        }
        return out;
    }

    /// Polynomial with X_v replaced by `value`.
    Polynomial substitute(Var v, const Polynomial& value) const
    {
        auto parts = coefficients_in(v);
        Polynomial result;
        Polynomial power(Coeff(1));
        std::uint32_t current = 0;
        for (const auto& [k, coeff] : parts) {
            while (current < k) {
                power *= value;
                ++current;
            }
            result += coeff * power;
        }
        return result;
    }

    Polynomial substitute(Var v, const Coeff& value) const { return substitute(v, Polynomial(value)); }

    Polynomial derivative(Var v) const
    {
        Polynomial r;
        for (const auto& [m, c] : terms_) {
            auto e = m.exponent(v);
            if (e == 0)
                continue;
            Coeff scaled = c * Coeff(static_cast<int>(e));
            r.add_term(m.with(v, e - 1), scaled);
        }
        return r;
    }

    /// Divides every term by X_v^k; requires all exponents of v to be >= k.
    Polynomial shift_down(Var v, std::uint32_t k) const
    {
        Polynomial r;
        for (const auto& [m, c] : terms_) {
            auto e = m.exponent(v);
            if (e < k)
                throw Error(ErrorKind::InvalidArgument, "shift_down: term not divisible");
            r.terms_.emplace(m.with(v, e - k), c);
        }
        return r;
    }

    /// Applies `f` to every coefficient (used for ring changes).
    template <class Out, class F>
    Polynomial<Out> map_coefficients(F&& f) const
    {
        Polynomial<Out> r;
        for (const auto& [m, c] : terms_)
            r.add_term(m, f(c));
        return r;
    }

    /// Gcd of all monomials (largest monomial dividing every term).
    Monomial monomial_content() const
    {
        if (terms_.empty())
            return {};
        Monomial g = terms_.begin()->first;
        for (const auto& [m, c] : terms_)
            g = Monomial::gcd(g, m);
        return g;
    }

    Polynomial divide_monomial(const Monomial& d) const
    {
        Polynomial r;
        for (const auto& [m, c] : terms_)
            r.terms_.emplace(m.quotient(d), c);
        return r;
    }

private:
    Terms terms_;
};

using Poly = Polynomial<Rational>;

/// Canonical ASCII rendering: terms ascending in graded lexicographic order,
/// coefficients as p/q, e.g. `2-3*C+1/2*X^2`.
inline std::string to_string(const Poly& p)
{
    if (p.is_zero_poly())
        return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : p.terms()) {
        Rational mag = abs(c);
        bool neg = sgn(c) < 0;
        if (first) {
            if (neg)
                out += '-';
        } else {
            out += neg ? '-' : '+';
        }
        first = false;
        if (m.is_one()) {
            out += mag.get_str();
        } else {
            if (mag != 1)
                out += mag.get_str() + "*";
            out += m.str();
        }
    }
    return out;
}

inline Rational evaluate(const Poly& p, const std::function<Rational(Var)>& value)
{
    Rational total = 0;
    for (const auto& [m, c] : p.terms()) {
        Rational t = c;
        for (const auto& [v, e] : m.powers()) {
            Rational x = value(v);
            Rational px = 1;
            for (std::uint32_t i = 0; i < e; ++i)
                px *= x;
            t *= px;
        }
        total += t;
    }
    return total;
}

/// Value at X = (1,...,1): the sum of all coefficients.
inline Rational evaluate_at_ones(const Poly& p)
{
    Rational total = 0;
    for (const auto& [m, c] : p.terms())
        total += c;
    return total;
}

inline bool has_parameters(const Poly& p)
{
    for (const auto& [m, c] : p.terms())
        for (const auto& [v, e] : m.powers())
            if (is_parameter(v))
                return true;
    return false;
}

/// Part of `p` that is constant in all program indeterminates (a polynomial
/// in the template parameters only).
inline Poly program_constant_part(const Poly& p)
{
    Poly out;
    for (const auto& [m, c] : p.terms()) {
        bool constant = true;
        for (const auto& [v, e] : m.powers())
            if (!is_parameter(v)) {
                constant = false;
                break;
            }
        if (constant)
            out.add_term(m, c);
    }
    return out;
}

} // namespace occinv
