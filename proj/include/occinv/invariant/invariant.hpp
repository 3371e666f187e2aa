#pragma once

#include <optional>
#include <string>
#include <vector>

#include "occinv/semantics/semantics.hpp"
#include "occinv/synthesis/positivity.hpp"

namespace occinv {

enum class VerifyOutcome { Exact, Super, Unknown, Refuted };

inline const char* to_string(VerifyOutcome v)
{
    switch (v) {
    case VerifyOutcome::Exact: return "Exact";
    case VerifyOutcome::Super: return "Super";
    case VerifyOutcome::Unknown: return "Unknown";
    case VerifyOutcome::Refuted: return "Refuted";
    }
    return "?";
}

struct VerifyOptions {
    std::uint32_t refuteDegree = 25;
};

struct VerifyResult {
    VerifyOutcome outcome = VerifyOutcome::Unknown;
    GfMeasure phi;        // Phi_{g,C}(I)
    GfMeasure difference; // I - Phi_{g,C}(I)
    std::optional<std::pair<Monomial, Rational>> witness;
};

/// Checks Phi_{g,C}(I) = I (Exact) or Phi_{g,C}(I) <= I (Super).
inline VerifyResult verify(const Statement& loop, const GfMeasure& g, const GfMeasure& inv,
                           const VerifyOptions& options = {})
{
    if (inv.has_parameters() || g.has_parameters())
        throw Error(ErrorKind::InvalidArgument, "verify needs instantiated closed forms");
    VerifyResult r;
    r.phi = char_functional(loop, g, inv);
    if (equal(r.phi, inv)) {
        r.outcome = VerifyOutcome::Exact;
        return r;
    }
    r.difference = inv - r.phi;
    auto pos = positivity_check(r.difference, options.refuteDegree);
    r.witness = pos.witness;
    switch (pos.verdict) {
    case Positivity::Nonneg: r.outcome = VerifyOutcome::Super; break;
    case Positivity::Refuted: r.outcome = VerifyOutcome::Refuted; break;
    case Positivity::Unknown: r.outcome = VerifyOutcome::Unknown; break;
    }
    return r;
}

/// [not guard]·I, an upper bound on the posterior of a verified superinvariant.
inline GfMeasure posterior_upper_bound(const Statement& loop, const GfMeasure& inv)
{
    return inv - restrict_guard(inv, *loop.guard);
}

/// Expected number of guard evaluations bound |I|.
inline ExtendedMass ert_upper_bound(const GfMeasure& inv) { return mass(inv); }

enum class CertificateKind { ExactInvariant, Superinvariant, ExactPosterior, PastWitness, UpperBoundOnly };

inline const char* to_string(CertificateKind k)
{
    switch (k) {
    case CertificateKind::ExactInvariant: return "ExactInvariant";
    case CertificateKind::Superinvariant: return "Superinvariant";
    case CertificateKind::ExactPosterior: return "ExactPosterior";
    case CertificateKind::PastWitness: return "PastWitness";
    case CertificateKind::UpperBoundOnly: return "UpperBoundOnly";
    }
    return "?";
}

/// ExactPosterior: finite |I| and |[not guard] I| = |g|, so the bound is the
/// posterior. UpperBoundOnly: infinite |I| or a strict mass gap. PastWitness:
/// finite |I| but the posterior mass could not be certified. ExactInvariant and
/// Superinvariant: not even |I| could be certified.
struct Certificate {
    CertificateKind kind = CertificateKind::Superinvariant;
    VerifyOutcome invariantKind = VerifyOutcome::Super;
    StmtPtr loop;
    GfMeasure initial;
    GfMeasure invariant;
    std::optional<GfMeasure> posterior;
    std::optional<ExtendedMass> massI;
    Rational massG;
    std::optional<ExtendedMass> massPosterior;
    std::optional<ExtendedMass> ertUpperBound;
    bool past = false; // finite |I|: positive almost-sure termination on g
    std::vector<std::string> diagnostics;
};

/// Applies the exact-posterior rule to an invariant that already verified as
/// Exact or Super.
inline Certificate exact_posterior(const StmtPtr& loop, const GfMeasure& g, const GfMeasure& inv,
                                   VerifyOutcome verified)
{
    if (verified != VerifyOutcome::Exact && verified != VerifyOutcome::Super)
        throw Error(ErrorKind::InvalidArgument, "exact_posterior needs a verified invariant");
    Certificate c;
    c.loop = loop;
    c.initial = g;
    c.invariant = inv;
    c.invariantKind = verified;
    c.kind = verified == VerifyOutcome::Exact ? CertificateKind::ExactInvariant : CertificateKind::Superinvariant;

    ExtendedMass mg;
    try {
        mg = mass(g);
        c.massI = mass(inv);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::UnknownSign)
            throw;
        c.diagnostics.push_back(e.message());
        return c;
    }
    if (!mg.is_finite()) {
        c.diagnostics.push_back("initial measure has infinite mass");
        return c;
    }
    c.massG = mg.value();
    c.ertUpperBound = c.massI;
    c.past = c.massI->is_finite();

    GfMeasure post = posterior_upper_bound(*loop, inv);
    try {
        c.massPosterior = mass(post);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::UnknownSign)
            throw;
        c.diagnostics.push_back("posterior mass: " + e.message());
        if (c.past)
            c.kind = CertificateKind::PastWitness;
        return c;
    }
    c.posterior = post;
    if (!c.past) {
        c.kind = CertificateKind::UpperBoundOnly;
        c.diagnostics.push_back("invariant has infinite mass; posterior is an upper bound only");
    } else if (c.massPosterior->is_finite() && c.massPosterior->value() == c.massG) {
        c.kind = CertificateKind::ExactPosterior;
    } else {
        c.kind = CertificateKind::UpperBoundOnly;
        c.diagnostics.push_back("posterior mass " + c.massPosterior->str() + " differs from initial mass "
                                + c.massG.get_str() + "; posterior is an upper bound only");
    }
    return c;
}

struct CheckResult {
    VerifyResult verification;
    std::optional<Certificate> certificate;
};

/// verify followed by exact_posterior when the invariant holds.
inline CheckResult check_invariant(const StmtPtr& loop, const GfMeasure& g, const GfMeasure& inv,
                                   const VerifyOptions& options = {})
{
    CheckResult r;
    r.verification = verify(*loop, g, inv, options);
    if (r.verification.outcome == VerifyOutcome::Exact || r.verification.outcome == VerifyOutcome::Super)
        r.certificate = exact_posterior(loop, g, inv, r.verification.outcome);
    return r;
}

} // namespace occinv
