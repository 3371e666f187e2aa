#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "occinv/algebra/rational.hpp"

namespace occinv {

namespace detail {

using DenseIntPoly = std::vector<Integer>; // index = exponent

/// d-th cyclotomic polynomial via x^d - 1 = prod_{e | d} Phi_e(x).
inline const DenseIntPoly& cyclotomic_polynomial(std::uint32_t d)
{
    static std::map<std::uint32_t, DenseIntPoly> cache;
    static std::recursive_mutex mutex;
    std::scoped_lock lock(mutex);
    if (auto it = cache.find(d); it != cache.end())
        return it->second;
    DenseIntPoly num(d + 1, Integer(0));
    num[0] = -1;
    num[d] = 1;
    for (std::uint32_t e = 1; e < d; ++e) {
        if (d % e != 0)
            continue;
        const DenseIntPoly& divisor = cyclotomic_polynomial(e);
        // monic long division
        std::size_t dn = num.size() - 1;
        std::size_t dd = divisor.size() - 1;
        DenseIntPoly quotient(dn - dd + 1, Integer(0));
        for (std::size_t k = dn + 1; k-- > dd;) {
            Integer q = num[k];
            quotient[k - dd] = q;
            if (q != 0)
                for (std::size_t j = 0; j <= dd; ++j)
                    num[k - dd + j] -= q * divisor[j];
        }
        num = std::move(quotient);
    }
    return cache.emplace(d, std::move(num)).first->second;
}

} // namespace detail

/// Element of Q(zeta_d) in the power basis 1, zeta, ..., zeta^{phi(d)-1}.
/// Order 1 doubles as the embedding of plain rationals; mixing order 1 with
/// order d promotes to order d.
class Cyclotomic {
public:
    Cyclotomic() : Cyclotomic(0) {}
    Cyclotomic(int c) : order_(1), coeffs_{Rational(c)} {}
    Cyclotomic(const Rational& c) : order_(1), coeffs_{c} {}

    /// zeta_d^k.
    static Cyclotomic zeta(std::uint32_t d, std::uint64_t k = 1)
    {
        if (d == 0)
            throw Error(ErrorKind::InvalidArgument, "cyclotomic order must be positive");
        Cyclotomic z;
        z.order_ = d;
        z.coeffs_.assign(basis_size(d), Rational(0));
        std::vector<Rational> raw(static_cast<std::size_t>(k % d) + 1, Rational(0));
        raw.back() = 1;
        z.reduce_from(raw);
        return z;
    }

    static Cyclotomic of_order(std::uint32_t d, const Rational& c)
    {
        Cyclotomic r(c);
        r.promote(d);
        return r;
    }

    std::uint32_t order() const noexcept { return order_; }
    const std::vector<Rational>& coefficients() const noexcept { return coeffs_; }

    bool is_rational() const
    {
        for (std::size_t i = 1; i < coeffs_.size(); ++i)
            if (sgn(coeffs_[i]) != 0)
                return false;
        return true;
    }

    /// Rational value; requires is_rational().
    Rational rational_part() const { return coeffs_[0]; }

    friend bool is_zero(const Cyclotomic& c)
    {
        for (const auto& x : c.coeffs_)
            if (sgn(x) != 0)
                return false;
        return true;
    }

    Cyclotomic& operator+=(const Cyclotomic& o)
    {
        Cyclotomic rhs = o;
        unify(rhs);
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            coeffs_[i] += rhs.coeffs_[i];
        return *this;
    }

    Cyclotomic& operator-=(const Cyclotomic& o)
    {
        Cyclotomic rhs = o;
        unify(rhs);
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            coeffs_[i] -= rhs.coeffs_[i];
        return *this;
    }

    friend Cyclotomic operator+(Cyclotomic a, const Cyclotomic& b) { return a += b; }
    friend Cyclotomic operator-(Cyclotomic a, const Cyclotomic& b) { return a -= b; }

    friend Cyclotomic operator-(const Cyclotomic& a)
    {
        Cyclotomic r = a;
        for (auto& x : r.coeffs_)
            x = -x;
        return r;
    }

    friend Cyclotomic operator*(const Cyclotomic& a, const Cyclotomic& b)
    {
        Cyclotomic x = a;
        Cyclotomic y = b;
        x.unify(y);
        std::vector<Rational> raw(x.coeffs_.size() + y.coeffs_.size() - 1, Rational(0));
        for (std::size_t i = 0; i < x.coeffs_.size(); ++i) {
            if (sgn(x.coeffs_[i]) == 0)
                continue;
            for (std::size_t j = 0; j < y.coeffs_.size(); ++j)
                raw[i + j] += x.coeffs_[i] * y.coeffs_[j];
        }
        x.reduce_from(raw);
        return x;
    }

    Cyclotomic& operator*=(const Cyclotomic& o) { return *this = *this * o; }

    bool operator==(const Cyclotomic& o) const
    {
        Cyclotomic a = *this;
        Cyclotomic b = o;
        a.unify(b);
        return a.coeffs_ == b.coeffs_;
    }

    std::string str() const
    {
        std::string out;
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (sgn(coeffs_[i]) == 0)
                continue;
            if (!out.empty())
                out += " + ";
            out += "(" + coeffs_[i].get_str() + ")";
            if (i > 0)
                out += "*z" + std::to_string(order_) + "^" + std::to_string(i);
        }
        return out.empty() ? "0" : out;
    }

private:
    static std::size_t basis_size(std::uint32_t d) { return detail::cyclotomic_polynomial(d).size() - 1; }

    void promote(std::uint32_t d)
    {
        if (order_ == d)
            return;
        if (order_ != 1)
            throw Error(ErrorKind::InvalidArgument, "mixing cyclotomic fields of different orders");
        if (!is_rational())
            throw Error(ErrorKind::InvalidArgument, "cannot promote non-rational cyclotomic element");
        Rational c = coeffs_[0];
        order_ = d;
        coeffs_.assign(basis_size(d), Rational(0));
        coeffs_[0] = c;
    }

    void unify(Cyclotomic& o)
    {
        if (order_ == o.order_)
            return;
        if (order_ == 1)
            promote(o.order_);
        else
            o.promote(order_);
    }

    /// Sets coeffs_ to raw(zeta) reduced modulo Phi_order.
    void reduce_from(std::vector<Rational> raw)
    {
        const auto& phi = detail::cyclotomic_polynomial(order_);
        std::size_t n = phi.size() - 1;
        for (std::size_t k = raw.size(); k-- > n;) {
            if (sgn(raw[k]) == 0)
                continue;
            Rational q = raw[k];
            for (std::size_t j = 0; j <= n; ++j)
                raw[k - n + j] -= q * Rational(phi[j]);
        }
        raw.resize(n, Rational(0));
        coeffs_ = std::move(raw);
    }

    std::uint32_t order_;
    std::vector<Rational> coeffs_;
};

} // namespace occinv
