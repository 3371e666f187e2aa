#pragma once

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>

#include "occinv/error.hpp"

namespace occinv {

// GMP rationals are kept canonical by every arithmetic operator; only the
// two-argument constructor needs an explicit canonicalize().
using Integer = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(const Integer& num, const Integer& den)
{
    if (den == 0)
        throw Error(ErrorKind::InvalidArgument, "rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational make_rational(long num, long den = 1)
{
    return make_rational(Integer(num), Integer(den));
}

inline bool is_zero(const Rational& r) { return sgn(r) == 0; }

inline std::string to_string(const Rational& r) { return r.get_str(); }

/// Accepts "p", "p/q" and finite decimals such as "0.25".
inline Rational parse_rational(std::string_view text)
{
    std::string s(text);
    auto bad = [&] { return Error(ErrorKind::InvalidArgument, "malformed rational '" + s + "'"); };
    if (s.empty())
        throw bad();
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    auto digits = [&](std::size_t from, std::size_t to) {
        if (from >= to)
            return false;
        for (std::size_t i = from; i < to; ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i])))
                return false;
        return true;
    };
    bool negative = s[0] == '-';
    Rational value;
    if (auto slash = s.find('/'); slash != std::string::npos) {
        if (!digits(start, slash) || !digits(slash + 1, s.size()))
            throw bad();
        value = make_rational(Integer(s.substr(start, slash - start)), Integer(s.substr(slash + 1)));
    } else if (auto dot = s.find('.'); dot != std::string::npos) {
        bool intPart = dot == start || digits(start, dot);
        if (!intPart || !digits(dot + 1, s.size()))
            throw bad();
        std::string whole = s.substr(start, dot - start) + s.substr(dot + 1);
        Integer scale = 1;
        for (std::size_t i = dot + 1; i < s.size(); ++i)
            scale *= 10;
        value = make_rational(Integer(whole.empty() ? "0" : whole), scale);
    } else {
        if (!digits(start, s.size()))
            throw bad();
        value = Rational(Integer(s.substr(start)));
    }
    if (negative)
        value = -value;
    return value;
}

} // namespace occinv
