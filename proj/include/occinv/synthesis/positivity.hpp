#pragma once

#include <optional>

#include "occinv/algebra/closed_form.hpp"

namespace occinv {

enum class Positivity { Nonneg, Unknown, Refuted };

inline const char* to_string(Positivity p)
{
    switch (p) {
    case Positivity::Nonneg: return "Nonneg";
    case Positivity::Unknown: return "Unknown";
    case Positivity::Refuted: return "Refuted";
    }
    return "?";
}

struct PositivityReport {
    Positivity verdict = Positivity::Unknown;
    bool shapeNonneg = false;
    /// First negative series coefficient found by the scan, if any.
    std::optional<std::pair<Monomial, Rational>> witness;
};

/// Shape heuristic plus a bounded series scan up to total degree `scanDegree`.
/// Nonneg only from the shape; Refuted only from an exact negative coefficient.
inline PositivityReport positivity_check(const RationalClosedForm& f, std::uint32_t scanDegree = 15)
{
    PositivityReport r;
    r.shapeNonneg = nonnegative_shape(f);
    if (r.shapeNonneg) {
        r.verdict = Positivity::Nonneg;
        return r;
    }
    for (const auto& [m, c] : series_expand(f, scanDegree))
        if (sgn(c) < 0) {
            r.witness = std::make_pair(m, c);
            r.verdict = Positivity::Refuted;
            return r;
        }
    r.verdict = Positivity::Unknown;
    return r;
}

} // namespace occinv
