#pragma once

#include <map>
#include <string>
#include <vector>

#include "occinv/algebra/closed_form.hpp"
#include "occinv/program/ast.hpp"

namespace occinv {

using State = std::vector<std::uint64_t>;

/// Finite measure over program states plus an exact bound on mass that was
/// truncated away.
struct SparseMeasure {
    std::vector<std::string> vars;
    std::map<State, Rational> entries;
    Rational residual = 0;

    SparseMeasure() = default;
    explicit SparseMeasure(std::vector<std::string> names) : vars(std::move(names)) {}

    std::size_t index(const std::string& v) const
    {
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (vars[i] == v)
                return i;
        throw Error(ErrorKind::UndeclaredVariable, "oracle state has no variable '" + v + "'");
    }

    void add(const State& s, const Rational& w)
    {
        if (sgn(w) == 0)
            return;
        auto [it, inserted] = entries.try_emplace(s, w);
        if (!inserted) {
            it->second += w;
            if (sgn(it->second) == 0)
                entries.erase(it);
        }
    }

    void add(const SparseMeasure& o, const Rational& scale = 1)
    {
        for (const auto& [s, w] : o.entries)
            add(s, w * scale);
        residual += o.residual * scale;
    }

    Rational mass() const
    {
        Rational m = 0;
        for (const auto& [s, w] : entries)
            m += w;
        return m;
    }

    Rational at(const State& s) const
    {
        auto it = entries.find(s);
        return it == entries.end() ? Rational(0) : it->second;
    }

    SparseMeasure empty_like() const { return SparseMeasure(vars); }

    Monomial monomial(const State& s) const
    {
        Monomial m;
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (s[i] > 0)
                m = m * Monomial::of(indeterminate_of(vars[i]), static_cast<std::uint32_t>(s[i]));
        return m;
    }

    SeriesCoefficients to_series() const
    {
        SeriesCoefficients out;
        for (const auto& [s, w] : entries)
            out[monomial(s)] += w;
        return out;
    }
};

inline SparseMeasure point_mass(const std::vector<std::string>& vars, const State& s, const Rational& w = 1)
{
    SparseMeasure m(vars);
    m.add(s, w);
    return m;
}

/// [guard] m, or [not guard] m when `negate` is set.
inline SparseMeasure restrict_guard(const SparseMeasure& m, const Guard& g, bool negate = false)
{
    SparseMeasure out = m.empty_like();
    for (const auto& [s, w] : m.entries) {
        bool in = holds(g, [&](const std::string& v) { return s[m.index(v)]; });
        if (in != negate)
            out.entries.emplace(s, w);
    }
    return out;
}

/// Sums out the named variables (sets their coordinate to 0).
inline SparseMeasure marginalize(const SparseMeasure& m, const std::vector<std::string>& names)
{
    std::vector<std::size_t> idx;
    for (const auto& n : names)
        idx.push_back(m.index(n));
    SparseMeasure out = m.empty_like();
    out.residual = m.residual;
    for (const auto& [key, w] : m.entries) {
        State s = key;
        for (std::size_t i : idx)
            s[i] = 0;
        out.add(s, w);
    }
    return out;
}

/// Truncated series of a nonnegative closed form; the untracked tail goes to
/// the residual when the mass is finite.
inline SparseMeasure from_closed_form(const RationalClosedForm& f, const std::vector<std::string>& vars,
                                      std::uint32_t degree)
{
    SparseMeasure m(vars);
    std::map<Var, std::size_t> pos;
    for (std::size_t i = 0; i < vars.size(); ++i)
        pos[indeterminate_of(vars[i])] = i;
    for (const auto& [mono, c] : series_expand(f, degree)) {
        if (sgn(c) < 0)
            throw Error(ErrorKind::UnknownSign, "closed form has a negative coefficient");
        State s(vars.size(), 0);
        for (const auto& [v, e] : mono.powers()) {
            auto it = pos.find(v);
            if (it == pos.end())
                throw Error(ErrorKind::UndeclaredVariable, "indeterminate " + var_name(v) + " has no oracle variable");
            s[it->second] = e;
        }
        m.add(s, c);
    }
    ExtendedMass total = mass(f);
    if (total.is_finite())
        m.residual = total.value() - m.mass();
    return m;
}

} // namespace occinv
