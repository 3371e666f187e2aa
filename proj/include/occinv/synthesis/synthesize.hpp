#pragma once

#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "occinv/invariant/invariant.hpp"
#include "occinv/oracle/exec.hpp"
#include "occinv/program/classify.hpp"
#include "occinv/synthesis/smtlib.hpp"
#include "occinv/synthesis/solver.hpp"
#include "occinv/synthesis/template.hpp"

namespace occinv {

struct SynthesisConfig {
    std::uint32_t maxDenDegree = 3;
    std::optional<Template> userTemplate;
    SolverConfig solver;
    std::uint32_t scanDegree = 15;
    VerifyOptions verify;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

enum class SynthesisStatus { Certified, Partial, Failure };

inline const char* to_string(SynthesisStatus s)
{
    switch (s) {
    case SynthesisStatus::Certified: return "Certified";
    case SynthesisStatus::Partial: return "Partial";
    case SynthesisStatus::Failure: return "Failure";
    }
    return "?";
}

/// One template's path through the pipeline.
struct TemplateAttempt {
    std::string templateText;
    std::string provenance;
    std::size_t equations = 0;
    std::size_t valuations = 0;
    std::string stage;  // last stage reached: system, solve, positivity, verify, certified
    std::string detail;
    std::vector<std::string> residualSmtlib;
};

struct LoopSynthesis {
    SynthesisStatus status = SynthesisStatus::Failure;
    GfMeasure initial;
    std::optional<Certificate> certificate;
    std::optional<GfMeasure> candidate; // best unverified candidate (partial result)
    std::optional<Positivity> candidatePositivity;
    std::string failedStage;
    std::optional<Valuation> valuation;
    std::vector<Var> defaultedParameters;
    std::vector<TemplateAttempt> attempts;
    std::vector<std::string> diagnostics;
};

namespace detail {

inline void statement_variables(const Statement& s, std::set<std::string>& out);

inline void guard_variables(const Guard& g, std::set<std::string>& out)
{
    if (!g.var.empty())
        out.insert(g.var);
    if (g.lhs)
        guard_variables(*g.lhs, out);
    if (g.rhs)
        guard_variables(*g.rhs, out);
}

inline void statement_variables(const Statement& s, std::set<std::string>& out)
{
    if (!s.var.empty())
        out.insert(s.var);
    if (!s.countVar.empty())
        out.insert(s.countVar);
    for (const auto& [k, v] : s.linear)
        out.insert(v);
    if (s.guard)
        guard_variables(*s.guard, out);
    for (const auto& c : s.children)
        statement_variables(*c, out);
}

inline bool contains_loop(const Statement& s)
{
    if (s.kind == Statement::Kind::While)
        return true;
    return std::any_of(s.children.begin(), s.children.end(), [](const StmtPtr& c) { return contains_loop(*c); });
}

inline void check_deadline(const SynthesisConfig& config)
{
    if (config.deadline && std::chrono::steady_clock::now() > *config.deadline)
        throw Error(ErrorKind::Timeout, "synthesis deadline reached");
}

} // namespace detail

/// Indeterminates a template needs: variables of the loop and of g.
inline std::vector<Var> template_variables(const Statement& loop, const GfMeasure& g)
{
    std::set<std::string> names;
    detail::statement_variables(loop, names);
    std::set<Var> vars;
    for (const auto& n : names)
        vars.insert(indeterminate_of(n));
    for (Var v : g.variables())
        if (!is_parameter(v))
            vars.insert(v);
    return {vars.begin(), vars.end()};
}

/// Single-loop search: templates in enumeration order, then solving, the
/// positivity heuristic, verification and the exact-posterior rule. Stops at
/// the first ExactPosterior; otherwise keeps the first certificate found.
inline LoopSynthesis synthesize(const StmtPtr& loop, const GfMeasure& g, const SynthesisConfig& config = {})
{
    if (loop->kind != Statement::Kind::While)
        throw Error(ErrorKind::InvalidArgument, "synthesize needs a while loop");
    if (detail::contains_loop(loop->body()))
        throw Error(ErrorKind::NestedLoop, "nested loops are not supported; analyse each loop separately");
    LoopSynthesis out;
    out.initial = g;

    std::vector<Template> templates;
    if (config.userTemplate)
        templates.push_back(*config.userTemplate);
    else
        templates = enumerate_templates(template_variables(*loop, g), config.maxDenDegree);

    auto keepCandidate = [&](const GfMeasure& f, Positivity p, const std::string& stage, const Valuation& tau,
                             const std::vector<Var>& free) {
        if (out.candidate)
            return;
        out.candidate = f;
        out.candidatePositivity = p;
        out.failedStage = stage;
        out.valuation = tau;
        out.defaultedParameters = free;
    };

    bool timedOut = false;
    try {
        for (const Template& t : templates) {
            detail::check_deadline(config);
            TemplateAttempt attempt;
            attempt.templateText = to_string(t.form);
            attempt.provenance = t.provenance();
            attempt.stage = "system";
            PolySystem sys;
            try {
                sys = build_system(t, *loop, g);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::Timeout)
                    throw;
                attempt.detail = e.what();
                out.attempts.push_back(std::move(attempt));
                continue;
            }
            attempt.equations = sys.equations.size();
            attempt.stage = "solve";
            SolveReport solved;
            try {
                SolverConfig sc = config.solver;
                sc.deadline = config.deadline;
                solved = solve_system_report(sys, sc);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::Timeout)
                    throw;
                attempt.detail = e.what();
                out.attempts.push_back(std::move(attempt));
                continue;
            }
            attempt.valuations = solved.valuations.size();
            for (const auto& r : solved.residual)
                attempt.residualSmtlib.push_back(export_smtlib(r));
            if (solved.valuations.empty()) {
                attempt.detail = solved.residual.empty() ? "no solution"
                                                         : "no solution found; residual nonlinear system exported";
                out.attempts.push_back(std::move(attempt));
                continue;
            }
            bool certifiedHere = false;
            std::string lastRejection;
            for (const auto& sv : solved.valuations) {
                GfMeasure f;
                try {
                    f = instantiate(t, sv.values);
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::InvalidDenominator)
                        throw;
                    lastRejection = "invalid denominator";
                    continue;
                }
                if (f.is_zero() && !g.is_zero()) {
                    lastRejection = "trivial solution";
                    continue;
                }
                attempt.stage = "positivity";
                PositivityReport pos = positivity_check(f, config.scanDegree);
                if (pos.verdict == Positivity::Refuted) {
                    lastRejection = "negative coefficient in " + to_string(f);
                    continue;
                }
                if (pos.verdict == Positivity::Unknown) {
                    lastRejection = "cannot determine positivity of " + to_string(f);
                    keepCandidate(f, pos.verdict, "positivity", sv.values, sv.freeParameters);
                    continue;
                }
                attempt.stage = "verify";
                CheckResult check = check_invariant(loop, g, f, config.verify);
                if (!check.certificate) {
                    lastRejection = std::string("verification ") + to_string(check.verification.outcome);
                    keepCandidate(f, pos.verdict, "verify", sv.values, sv.freeParameters);
                    continue;
                }
                attempt.stage = "certified";
                attempt.detail = to_string(check.certificate->kind);
                bool exactPost = check.certificate->kind == CertificateKind::ExactPosterior;
                if (!out.certificate || exactPost) {
                    out.certificate = std::move(check.certificate);
                    out.valuation = sv.values;
                    out.defaultedParameters = sv.freeParameters;
                }
                certifiedHere = true;
                if (exactPost)
                    break;
            }
            if (!certifiedHere)
                attempt.detail = lastRejection;
            out.attempts.push_back(std::move(attempt));
            if (out.certificate && out.certificate->kind == CertificateKind::ExactPosterior)
                break;
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Timeout)
            throw;
        timedOut = true;
        out.diagnostics.push_back(e.what());
    }

    if (out.certificate) {
        out.status = SynthesisStatus::Certified;
        out.candidate.reset();
        out.candidatePositivity.reset();
        out.failedStage.clear();
        return out;
    }
    if (out.candidate) {
        out.status = SynthesisStatus::Partial;
        out.diagnostics.push_back("candidate " + to_string(*out.candidate) + " failed at stage " + out.failedStage
                                  + (out.candidatePositivity
                                         ? std::string(" (positivity ") + to_string(*out.candidatePositivity) + ")"
                                         : std::string()));
        return out;
    }
    out.status = SynthesisStatus::Failure;
    out.failedStage = timedOut ? "timeout" : "solve";
    try {
        std::set<std::string> stmtVars;
        detail::statement_variables(*loop, stmtVars);
        std::vector<std::string> names(stmtVars.begin(), stmtVars.end());
        for (Var v : g.variables()) {
            bool covered = std::any_of(names.begin(), names.end(),
                                       [&](const std::string& n) { return indeterminate_of(n) == v; });
            if (!covered)
                names.push_back(var_name(v));
        }
        SparseMeasure start = from_closed_form(g, names, 12);
        if (auto stuck = find_stuck_state(*loop, start)) {
            out.diagnostics.push_back("no finite rational invariant exists: state "
                                      + to_string(Poly(start.monomial(*stuck), Rational(1)))
                                      + " is reached, satisfies the guard and is left unchanged by the body, so its "
                                        "occupation is infinite");
            out.failedStage = "no-finite-invariant";
        }
    } catch (const Error&) {
    }
    if (out.diagnostics.empty())
        out.diagnostics.push_back("no template up to denominator degree " + std::to_string(config.maxDenDegree)
                                  + " yields an invariant");
    return out;
}

struct ProgramSynthesis {
    SynthesisStatus status = SynthesisStatus::Failure;
    std::vector<LoopSynthesis> loops;
    /// Output distribution, present when every loop has an exact posterior.
    std::optional<GfMeasure> posterior;
    std::vector<std::string> diagnostics;
};

/// Top-level sequence of loop-free statements and loops with loop-free
/// bodies; each loop's exact posterior is the next loop's initial measure.
inline ProgramSynthesis synthesize_program(const Program& program, const GfMeasure& g,
                                           const SynthesisConfig& config = {})
{
    ProgramSynthesis out;
    std::vector<StmtPtr> items;
    if (program.body->kind == Statement::Kind::Seq)
        items = program.body->children;
    else
        items.push_back(program.body);
    GfMeasure cur = g;
    bool exact = true;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const StmtPtr& s = items[i];
        if (s->kind != Statement::Kind::While) {
            if (detail::contains_loop(*s))
                throw Error(ErrorKind::NestedLoop, "loops must appear at the top level of the program");
            cur = apply_statement(*s, cur);
            continue;
        }
        LoopSynthesis ls = synthesize(s, cur, config);
        SynthesisStatus st = ls.status;
        bool exactPost = ls.certificate && ls.certificate->kind == CertificateKind::ExactPosterior;
        std::optional<GfMeasure> post = ls.certificate ? ls.certificate->posterior : std::nullopt;
        out.loops.push_back(std::move(ls));
        if (st != SynthesisStatus::Certified) {
            out.status = st;
            out.diagnostics.push_back("loop " + std::to_string(out.loops.size()) + " was not certified");
            return out;
        }
        if (!exactPost) {
            exact = false;
            bool last = std::none_of(items.begin() + static_cast<std::ptrdiff_t>(i) + 1, items.end(),
                                     [](const StmtPtr& r) { return detail::contains_loop(*r); });
            if (!last) {
                out.status = SynthesisStatus::Partial;
                out.diagnostics.push_back("loop " + std::to_string(out.loops.size())
                                          + " has no exact posterior; later loops were not analysed");
                return out;
            }
            if (!post)
                break;
        }
        cur = *post;
    }
    out.status = SynthesisStatus::Certified;
    if (exact)
        out.posterior = cur;
    return out;
}

} // namespace occinv
