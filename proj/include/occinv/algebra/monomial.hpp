#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "occinv/algebra/symbols.hpp"

namespace occinv {

/// Power product X_1^e_1 ... X_n^e_n, stored sparsely and sorted by variable id.
class Monomial {
public:
    using Power = std::pair<Var, std::uint32_t>;

    Monomial() = default;

    Monomial(std::initializer_list<Power> powers)
    {
        for (const auto& [v, e] : powers)
            *this = *this * Monomial::of(v, e);
    }

    static Monomial of(Var v, std::uint32_t exponent = 1)
    {
        Monomial m;
        if (exponent > 0)
            m.powers_.emplace_back(v, exponent);
        return m;
    }

    const std::vector<Power>& powers() const noexcept { return powers_; }
    bool is_one() const noexcept { return powers_.empty(); }

    std::uint32_t degree() const noexcept
    {
        std::uint32_t d = 0;
        for (const auto& p : powers_)
            d += p.second;
        return d;
    }

    std::uint32_t exponent(Var v) const noexcept
    {
        auto it = std::lower_bound(powers_.begin(), powers_.end(), v,
                                   [](const Power& p, Var x) { return p.first < x; });
        return (it != powers_.end() && it->first == v) ? it->second : 0;
    }

    bool contains(Var v) const noexcept { return exponent(v) > 0; }

    /// Copy with the exponent of `v` replaced.
    Monomial with(Var v, std::uint32_t exponent) const
    {
        Monomial m;
        bool placed = false;
        for (const auto& p : powers_) {
            if (!placed && v < p.first) {
                if (exponent > 0)
                    m.powers_.emplace_back(v, exponent);
                placed = true;
            }
            if (p.first == v) {
                if (exponent > 0)
                    m.powers_.emplace_back(v, exponent);
                placed = true;
            } else {
                m.powers_.push_back(p);
            }
        }
        if (!placed && exponent > 0)
            m.powers_.emplace_back(v, exponent);
        return m;
    }

    Monomial without(Var v) const { return with(v, 0); }

    friend Monomial operator*(const Monomial& a, const Monomial& b)
    {
        Monomial m;
        m.powers_.reserve(a.powers_.size() + b.powers_.size());
        auto i = a.powers_.begin();
        auto j = b.powers_.begin();
        while (i != a.powers_.end() || j != b.powers_.end()) {
            if (j == b.powers_.end() || (i != a.powers_.end() && i->first < j->first)) {
                m.powers_.push_back(*i++);
            } else if (i == a.powers_.end() || j->first < i->first) {
                m.powers_.push_back(*j++);
            } else {
                m.powers_.emplace_back(i->first, i->second + j->second);
                ++i;
                ++j;
            }
        }
        return m;
    }

    bool divides(const Monomial& other) const
    {
        for (const auto& [v, e] : powers_)
            if (other.exponent(v) < e)
                return false;
        return true;
    }

    /// this / divisor; requires divisor.divides(*this).
    Monomial quotient(const Monomial& divisor) const
    {
        Monomial m;
        for (const auto& [v, e] : powers_) {
            auto r = e - divisor.exponent(v);
            if (r > 0)
                m.powers_.emplace_back(v, r);
        }
        return m;
    }

    static Monomial gcd(const Monomial& a, const Monomial& b)
    {
        Monomial m;
        for (const auto& [v, e] : a.powers_) {
            auto f = std::min(e, b.exponent(v));
            if (f > 0)
                m.powers_.emplace_back(v, f);
        }
        return m;
    }

    static Monomial lcm(const Monomial& a, const Monomial& b)
    {
        Monomial m = a;
        for (const auto& [v, e] : b.powers_)
            if (e > m.exponent(v))
                m = m.with(v, e);
        return m;
    }

    bool operator==(const Monomial&) const = default;

    std::string str() const
    {
        if (powers_.empty())
            return "1";
        std::string out;
        for (const auto& [v, e] : powers_) {
            if (!out.empty())
                out += '*';
            out += var_name(v);
            if (e > 1)
                out += '^' + std::to_string(e);
        }
        return out;
    }

private:
    std::vector<Power> powers_;
};

/// Graded lexicographic order; among equal total degree, a larger exponent on
/// an earlier-registered variable ranks higher.
struct GrlexLess {
    bool operator()(const Monomial& a, const Monomial& b) const
    {
        auto da = a.degree();
        auto db = b.degree();
        if (da != db)
            return da < db;
        const auto& pa = a.powers();
        const auto& pb = b.powers();
        std::size_t i = 0;
        std::size_t j = 0;
        while (i < pa.size() && j < pb.size()) {
            if (pa[i].first != pb[j].first)
                return pb[j].first < pa[i].first;
            if (pa[i].second != pb[j].second)
                return pa[i].second < pb[j].second;
            ++i;
            ++j;
        }
        return i == pa.size() && j < pb.size();
    }
};

} // namespace occinv
