#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "occinv/algebra/gcd.hpp"

namespace occinv {

/// Total mass of a nonnegative measure: a nonnegative rational or infinity.
class ExtendedMass {
public:
    static ExtendedMass finite(const Rational& value)
    {
        if (sgn(value) < 0)
            throw Error(ErrorKind::InvalidArgument, "negative mass");
        ExtendedMass m;
        m.value_ = value;
        return m;
    }
    static ExtendedMass infinite() { return ExtendedMass{}; }

    bool is_finite() const noexcept { return value_.has_value(); }
    bool is_infinite() const noexcept { return !value_.has_value(); }
    const Rational& value() const
    {
        if (!value_)
            throw Error(ErrorKind::InvalidArgument, "infinite mass has no rational value");
        return *value_;
    }
    std::string str() const { return value_ ? value_->get_str() : "inf"; }
    bool operator==(const ExtendedMass&) const = default;

private:
    std::optional<Rational> value_;
};

/// Controls how aggressively common factors are cancelled.
struct ReductionPolicy {
    bool fullGcd = true;
    GcdBudget budget{};
};

namespace detail {
inline ReductionPolicy& reduction_policy()
{
    thread_local ReductionPolicy policy;
    return policy;
}
} // namespace detail

/// Temporarily replaces the reduction policy of the current thread.
class ReductionScope {
public:
    explicit ReductionScope(ReductionPolicy policy) : saved_(detail::reduction_policy())
    {
        detail::reduction_policy() = policy;
    }
    ~ReductionScope() { detail::reduction_policy() = saved_; }
    ReductionScope(const ReductionScope&) = delete;
    ReductionScope& operator=(const ReductionScope&) = delete;

private:
    ReductionPolicy saved_;
};

/// Formal power series num/den with den invertible. Values are always stored
/// normalized: common factors cancelled, integer-primitive coefficients, and a
/// positive denominator constant term (or, for a polynomial denominator,
/// folded into the numerator).
class RationalClosedForm {
public:
    RationalClosedForm() : num_(), den_(1) {}
    RationalClosedForm(int c) : num_(c), den_(1) {}
    RationalClosedForm(const Rational& c) : num_(c), den_(1) {}
    RationalClosedForm(const Poly& p) : num_(p), den_(1) {}

    static RationalClosedForm normalize(const Poly& num, const Poly& den)
    {
        return normalize(num, den, detail::reduction_policy());
    }

    static RationalClosedForm normalize(Poly num, Poly den, ReductionPolicy policy)
    {
        if (den.is_zero_poly())
            throw Error(ErrorKind::InvalidDenominator, "denominator is zero");
        if (num.is_zero_poly())
            return RationalClosedForm();

        Monomial common = Monomial::gcd(num.monomial_content(), den.monomial_content());
        if (!common.is_one()) {
            num = num.divide_monomial(common);
            den = den.divide_monomial(common);
        }
        if (policy.fullGcd && !den.is_constant() && !num.is_constant()) {
            if (auto g = try_gcd(num, den, policy.budget); g && !g->is_constant()) {
                num = *divide_exact(num, *g);
                den = *divide_exact(den, *g);
            }
        }

        Poly pc = program_constant_part(den);
        if (pc.is_zero_poly())
            throw Error(ErrorKind::InvalidDenominator,
                        "denominator " + to_string(den) + " has zero constant term");

        RationalClosedForm f;
        if (den.is_constant()) {
            Rational inv = 1 / den.constant_term();
            f.num_ = num * inv;
            f.den_ = Poly(1);
            return f;
        }

        Integer lcmDen = 1;
        Integer gcdNum = 0;
        for (const auto* p : {&num, &den})
            for (const auto& [m, c] : p->terms()) {
                mpz_lcm(lcmDen.get_mpz_t(), lcmDen.get_mpz_t(), c.get_den_mpz_t());
                mpz_gcd(gcdNum.get_mpz_t(), gcdNum.get_mpz_t(), c.get_num_mpz_t());
            }
        Rational scale(lcmDen, gcdNum);
        scale.canonicalize();
        Rational pivot = sgn(pc.constant_term()) != 0 ? pc.constant_term() : pc.leading().second;
        if (sgn(pivot) < 0)
            scale = -scale;
        f.num_ = num * scale;
        f.den_ = den * scale;
        return f;
    }

    const Poly& num() const noexcept { return num_; }
    const Poly& den() const noexcept { return den_; }
    bool is_zero() const noexcept { return num_.is_zero_poly(); }
    bool is_polynomial() const { return den_.is_constant(); }

    std::set<Var> variables() const
    {
        auto vars = num_.variables();
        auto dv = den_.variables();
        vars.insert(dv.begin(), dv.end());
        return vars;
    }

    bool has_parameters() const { return occinv::has_parameters(num_) || occinv::has_parameters(den_); }

    friend RationalClosedForm operator+(const RationalClosedForm& a, const RationalClosedForm& b)
    {
        if (a.is_zero())
            return b;
        if (b.is_zero())
            return a;
        if (a.den_ == b.den_)
            return normalize(a.num_ + b.num_, a.den_);
        const ReductionPolicy& policy = detail::reduction_policy();
        if (policy.fullGcd && !a.den_.is_constant() && !b.den_.is_constant()) {
            if (auto g = try_gcd(a.den_, b.den_, policy.budget); g && !g->is_constant()) {
                Poly ca = *divide_exact(b.den_, *g);
                Poly cb = *divide_exact(a.den_, *g);
                return normalize(a.num_ * ca + b.num_ * cb, a.den_ * ca);
            }
        }
        return normalize(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }

    friend RationalClosedForm operator-(const RationalClosedForm& a)
    {
        RationalClosedForm r = a;
        r.num_ = -r.num_;
        return r;
    }

    friend RationalClosedForm operator-(const RationalClosedForm& a, const RationalClosedForm& b) { return a + (-b); }

    friend RationalClosedForm operator*(const RationalClosedForm& a, const RationalClosedForm& b)
    {
        if (a.is_zero() || b.is_zero())
            return RationalClosedForm();
        return normalize(a.num_ * b.num_, a.den_ * b.den_);
    }

    friend RationalClosedForm operator*(const RationalClosedForm& a, const Rational& s)
    {
        if (sgn(s) == 0)
            return RationalClosedForm();
        RationalClosedForm r = a;
        if (r.den_.is_constant())
            r.num_ = r.num_ * s;
        else
            r = normalize(r.num_ * s, r.den_);
        return r;
    }

    friend RationalClosedForm operator*(const Rational& s, const RationalClosedForm& a) { return a * s; }

    /// Division; fails with InvalidDenominator if the result is not a power series.
    friend RationalClosedForm operator/(const RationalClosedForm& a, const RationalClosedForm& b)
    {
        if (b.is_zero())
            throw Error(ErrorKind::InvalidDenominator, "division by zero closed form");
        return normalize(a.num_ * b.den_, a.den_ * b.num_);
    }

    RationalClosedForm pow(std::uint32_t e) const
    {
        RationalClosedForm r(1);
        for (std::uint32_t i = 0; i < e; ++i)
            r = r * *this;
        return r;
    }

    /// Structural equality of the normalized representation.
    bool operator==(const RationalClosedForm& o) const { return num_ == o.num_ && den_ == o.den_; }

private:
    Poly num_;
    Poly den_;
};

using ClosedForm = RationalClosedForm;

/// Equality of the encoded power series, decided by cross-multiplication.
inline bool equal(const RationalClosedForm& f, const RationalClosedForm& g)
{
    return f.num() * g.den() == g.num() * f.den();
}

inline std::string to_string(const RationalClosedForm& f)
{
    std::string num = to_string(f.num());
    if (f.den() == Poly(1))
        return num;
    auto wrap = [](const Poly& p, const std::string& s) { return p.size() > 1 ? "(" + s + ")" : s; };
    return wrap(f.num(), num) + "/" + wrap(f.den(), to_string(f.den()));
}

using SeriesCoefficients = std::map<Monomial, Rational, GrlexLess>;

namespace detail {

inline void monomials_of_degree(const std::vector<Var>& vars, std::size_t index, std::uint32_t remaining,
                                Monomial current, std::vector<Monomial>& out)
{
    if (index + 1 == vars.size()) {
        out.push_back(current * Monomial::of(vars[index], remaining));
        return;
    }
    for (std::uint32_t e = remaining + 1; e-- > 0;)
        monomials_of_degree(vars, index + 1, remaining - e, current * Monomial::of(vars[index], e), out);
}

} // namespace detail

/// All monomials of total degree exactly d over `vars`.
inline std::vector<Monomial> monomials_of_degree(const std::vector<Var>& vars, std::uint32_t d)
{
    std::vector<Monomial> out;
    if (vars.empty()) {
        if (d == 0)
            out.emplace_back();
        return out;
    }
    detail::monomials_of_degree(vars, 0, d, Monomial{}, out);
    return out;
}

/// Nonzero series coefficients of total degree <= K.
inline SeriesCoefficients series_expand(const RationalClosedForm& f, std::uint32_t K)
{
    if (f.has_parameters())
        throw Error(ErrorKind::InvalidArgument, "series_expand needs an instantiated closed form");
    SeriesCoefficients out;
    if (f.is_zero())
        return out;
    auto varSet = f.variables();
    std::vector<Var> vars(varSet.begin(), varSet.end());
    Rational c0 = f.den().constant_term();
    Rational invC0 = 1 / c0;
    std::vector<std::pair<Monomial, Rational>> denTail;
    for (const auto& [m, c] : f.den().terms())
        if (!m.is_one())
            denTail.emplace_back(m, c);

    SeriesCoefficients all;
    for (std::uint32_t d = 0; d <= K; ++d) {
        for (const auto& s : monomials_of_degree(vars, d)) {
            Rational value = f.num().coefficient(s);
            for (const auto& [t, c] : denTail) {
                if (t.degree() > d || !t.divides(s))
                    continue;
                auto it = all.find(s.quotient(t));
                if (it != all.end())
                    value -= c * it->second;
            }
            if (sgn(value) != 0) {
                value *= invC0;
                all.emplace(s, value);
            }
        }
    }
    return all;
}

/// Sufficient syntactic criterion for a series with only nonnegative
/// coefficients: nonnegative numerator, positive denominator constant term,
/// nonpositive remaining denominator coefficients (or the same for -num/-den).
inline bool nonnegative_shape(const RationalClosedForm& f)
{
    auto matches = [](const Poly& num, const Poly& den) {
        for (const auto& [m, c] : num.terms())
            if (sgn(c) < 0)
                return false;
        if (sgn(den.constant_term()) <= 0)
            return false;
        for (const auto& [m, c] : den.terms())
            if (!m.is_one() && sgn(c) > 0)
                return false;
        return true;
    };
    if (f.has_parameters())
        return false;
    return matches(f.num(), f.den()) || matches(-f.num(), -f.den());
}

/// Total mass |f| = f(1,...,1) in the extended sense.
inline ExtendedMass mass(const RationalClosedForm& f)
{
    if (f.is_zero())
        return ExtendedMass::finite(0);
    if (f.has_parameters())
        throw Error(ErrorKind::InvalidArgument, "mass needs an instantiated closed form");
    if (!nonnegative_shape(f))
        throw Error(ErrorKind::UnknownSign, "cannot certify nonnegativity of " + to_string(f));
    // Normalized forms have a positive denominator constant term, so the
    // shape check above pins the direct pattern.
    Rational d1 = evaluate_at_ones(f.den());
    Rational n1 = evaluate_at_ones(f.num());
    if (sgn(d1) <= 0)
        return ExtendedMass::infinite();
    return ExtendedMass::finite(n1 / d1);
}

} // namespace occinv
