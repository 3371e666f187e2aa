#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "occinv/invariant/invariant.hpp"
#include "occinv/oracle/chain.hpp"
#include "occinv/oracle/exec.hpp"
#include "occinv/synthesis/synthesize.hpp"

namespace occinv {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a, 64 bit.
inline std::string fnv1a64(const std::string& data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline Json to_json(const ExtendedMass& m) { return m.str(); }

inline Json to_json(const std::optional<ExtendedMass>& m) { return m ? to_json(*m) : Json(); }

inline Json to_json(const SeriesCoefficients& s)
{
    Json j = Json::object();
    for (const auto& [m, c] : s)
        j[to_string(Poly(m, Rational(1)))] = c.get_str();
    return j;
}

inline Json to_json(const SparseMeasure& m)
{
    Json j;
    j["entries"] = to_json(m.to_series());
    j["mass"] = m.mass().get_str();
    j["residual"] = m.residual.get_str();
    return j;
}

inline Json to_json(const Certificate& c)
{
    Json j;
    j["kind"] = to_string(c.kind);
    j["verification"] = to_string(c.invariantKind);
    j["initial"] = to_string(c.initial);
    j["invariant"] = to_string(c.invariant);
    j["posterior"] = c.posterior ? Json(to_string(*c.posterior)) : Json();
    j["masses"] = {{"invariant", to_json(c.massI)},
                   {"initial", c.massI ? Json(c.massG.get_str()) : Json()},
                   {"posterior", to_json(c.massPosterior)},
                   {"ert", to_json(c.ertUpperBound)}};
    j["past"] = c.past;
    j["diagnostics"] = c.diagnostics;
    return j;
}

inline Json to_json(const Valuation& tau)
{
    Json j = Json::object();
    for (const auto& [p, v] : tau)
        j[var_name(p)] = v.get_str();
    return j;
}

inline Json to_json(const LoopSynthesis& l)
{
    Json j;
    j["status"] = to_string(l.status);
    j["outcome"] = l.certificate ? std::string(to_string(l.certificate->kind)) : l.failedStage;
    j["initial"] = to_string(l.initial);
    j["certificate"] = l.certificate ? to_json(*l.certificate) : Json();
    j["candidate"] = l.candidate ? Json(to_string(*l.candidate)) : Json();
    j["candidatePositivity"] = l.candidatePositivity ? Json(to_string(*l.candidatePositivity)) : Json();
    j["valuation"] = l.valuation ? to_json(*l.valuation) : Json();
    Json defaults = Json::array();
    for (Var v : l.defaultedParameters)
        defaults.push_back(var_name(v));
    j["defaultedParameters"] = defaults;
    j["defaultRule"] = "free parameters tried as 0, then 1";
    Json attempts = Json::array();
    for (const auto& a : l.attempts)
        attempts.push_back({{"template", a.templateText},
                            {"provenance", a.provenance},
                            {"equations", a.equations},
                            {"valuations", a.valuations},
                            {"stage", a.stage},
                            {"detail", a.detail}});
    j["attempts"] = attempts;
    j["diagnostics"] = l.diagnostics;
    return j;
}

inline Json to_json(const CrosscheckReport& r)
{
    auto entries = [](const std::vector<CrosscheckEntry>& es) {
        Json a = Json::array();
        for (const auto& e : es)
            a.push_back({{"monomial", to_string(Poly(e.monomial, Rational(1)))},
                         {"symbolic", e.symbolic.get_str()},
                         {"oracle", e.oracle.get_str()}});
        return a;
    };
    Json j;
    j["compared"] = r.compared;
    j["violations"] = entries(r.violations);
    j["warnings"] = entries(r.warnings);
    j["maxGap"] = r.maxGap.get_str();
    j["massGap"] = r.massGap ? Json(r.massGap->get_str()) : Json();
    j["residual"] = r.residual.get_str();
    return j;
}

/// Skeleton shared by all subcommands; `timing` is the only non-deterministic field.
inline Json make_report(const std::string& mode, const std::string& digestInput)
{
    Json j;
    j["tool"] = "occinv";
    j["version"] = kToolVersion;
    j["mode"] = mode;
    j["digest"] = "fnv1a64:" + fnv1a64(digestInput);
    j["outcome"] = nullptr;
    j["invariant"] = nullptr;
    j["posterior"] = nullptr;
    j["masses"] = Json::object();
    j["timing"] = Json::object();
    j["diagnostics"] = Json::array();
    return j;
}

} // namespace occinv
