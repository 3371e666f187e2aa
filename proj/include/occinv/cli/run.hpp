#pragma once

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "occinv/program/desugar.hpp"
#include "occinv/program/parser.hpp"
#include "occinv/report/report.hpp"

namespace occinv::cli {

enum ExitCode : int { kFullCertificate = 0, kError = 1, kPartial = 2 };

inline constexpr const char* kBranchLimitEnv = "OCCINV_SOLVER_BRANCH_LIMIT";

namespace detail {

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::InvalidArgument, "cannot read file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Stopwatch {
public:
    double lap_ms()
    {
        auto now = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
        return ms;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

/// Loop-free prefix, the single top-level loop, and the loop-free suffix.
struct LoopSplit {
    std::vector<StmtPtr> prefix;
    StmtPtr loop;
    std::vector<StmtPtr> suffix;
};

inline LoopSplit split_single_loop(const Program& p)
{
    std::vector<StmtPtr> items;
    if (p.body->kind == Statement::Kind::Seq)
        items = p.body->children;
    else
        items.push_back(p.body);
    LoopSplit s;
    for (const auto& it : items) {
        if (it->kind == Statement::Kind::While) {
            if (s.loop)
                throw Error(ErrorKind::InvalidArgument, "expected exactly one top-level loop");
            if (occinv::detail::contains_loop(it->body()))
                throw Error(ErrorKind::NestedLoop, "nested loops are not supported");
            s.loop = it;
        } else {
            if (occinv::detail::contains_loop(*it))
                throw Error(ErrorKind::NestedLoop, "loops must appear at the top level of the program");
            (s.loop ? s.suffix : s.prefix).push_back(it);
        }
    }
    if (!s.loop)
        throw Error(ErrorKind::InvalidArgument, "program has no loop");
    return s;
}

inline GfMeasure apply_all(const std::vector<StmtPtr>& stmts, GfMeasure f)
{
    for (const auto& s : stmts)
        f = apply_statement(*s, f);
    return f;
}

inline std::vector<std::string> split_names(const std::string& list)
{
    std::vector<std::string> out;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) {
        auto b = item.find_first_not_of(" \t");
        auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos)
            out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

inline void put_certificate(Json& report, const Certificate& c)
{
    report["outcome"] = to_string(c.kind);
    report["invariant"] = to_string(c.invariant);
    report["posterior"] = c.posterior ? Json(to_string(*c.posterior)) : Json();
    report["masses"] = to_json(c)["masses"];
    report["certificate"] = to_json(c);
}

inline bool full_certificate(CertificateKind k)
{
    return k == CertificateKind::ExactPosterior || k == CertificateKind::UpperBoundOnly;
}

struct Loaded {
    std::string text;
    Program program;
};

inline Loaded load_program(const std::string& path)
{
    Loaded l;
    l.text = read_file(path);
    l.program = desugar(parse_program(l.text));
    return l;
}

} // namespace detail

/// Runs one subcommand; writes the JSON report to `out` and messages to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Occupation invariants for probabilistic loops", "occinv"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::string progPath, initText, invText, invFile, templatePath, modelPath, marginal, exportSmt, compareText;
    std::string gfText, chainPath, contraction;
    double timeout = 60.0;
    std::uint32_t maxDegree = 3, refuteDegree = 25, scanDegree = 15, degree = 0, initDegree = 30;
    std::size_t steps = 0;
    std::uint64_t cap = 64;
    bool iterative = false;

    auto* check = app.add_subcommand("check", "verify an invariant and apply the exact-posterior rule");
    check->add_option("program", progPath, "program file")->required();
    check->add_option("--init", initText, "initial measure as a closed form")->required();
    auto* invOpt = check->add_option("--invariant", invText, "invariant closed form");
    auto* invFileOpt = check->add_option("--invariant-file", invFile, "file holding the invariant closed form");
    auto* tplOpt = check->add_option("--template", templatePath, "template file (with --model)");
    auto* modelOpt = check->add_option("--model", modelPath, "SMT-LIB model instantiating --template");
    invOpt->excludes(invFileOpt)->excludes(tplOpt);
    invFileOpt->excludes(tplOpt);
    tplOpt->needs(modelOpt);
    modelOpt->needs(tplOpt);
    check->add_option("--marginal", marginal, "comma-separated variables to sum out of the posterior");
    check->add_option("--refute-degree", refuteDegree, "series degree for refutation")->capture_default_str();
    check->add_option("--timeout", timeout, "wall-clock budget in seconds")->capture_default_str();

    auto* synth = app.add_subcommand("synthesize", "search for an invariant by template enumeration");
    synth->add_option("program", progPath, "program file")->required();
    synth->add_option("--init", initText, "initial measure as a closed form")->required();
    synth->add_option("--template", templatePath, "user template file");
    synth->add_option("--max-degree", maxDegree, "maximal denominator degree")->capture_default_str();
    synth->add_option("--scan-degree", scanDegree, "series degree of the positivity scan")->capture_default_str();
    synth->add_option("--export-smt", exportSmt, "write residual nonlinear systems as SMT-LIB");
    synth->add_option("--timeout", timeout, "wall-clock budget in seconds")->capture_default_str();

    auto* unroll = app.add_subcommand("unroll", "Kleene iteration of the loop on a truncated initial measure");
    unroll->add_option("program", progPath, "program file")->required();
    unroll->add_option("--init", initText, "initial measure as a closed form")->required();
    unroll->add_option("--steps", steps, "number of iterations")->required();
    unroll->add_option("--cap", cap, "support points kept for unbounded distributions")->capture_default_str();
    unroll->add_option("--init-degree", initDegree, "series degree used to truncate --init")->capture_default_str();
    unroll->add_option("--compare", compareText, "closed form to crosscheck against the posterior lower bound");
    unroll->add_option("--timeout", timeout, "wall-clock budget in seconds")->capture_default_str();

    auto* expand = app.add_subcommand("expand", "series coefficients of a closed form");
    expand->add_option("gf", gfText, "closed form")->required();
    expand->add_option("--degree", degree, "maximal total degree")->required();

    auto* chainCmd = app.add_subcommand("chain", "occupation measure of a finite chain");
    chainCmd->add_option("file", chainPath, "chain file")->required();
    chainCmd->add_option("--contraction", contraction, "contraction factor c in (0,1)");
    chainCmd->add_flag("--iterative", iterative, "also report double-precision power-iteration sums");

    std::vector<std::string> argvStore{"occinv"};
    argvStore.insert(argvStore.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argvStore)
        argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : kError;
    }

    std::string mode = app.get_subcommands().front()->get_name();
    Json report;
    detail::Stopwatch clock;
    auto deadline = std::chrono::steady_clock::now()
                    + std::chrono::milliseconds(static_cast<std::int64_t>(timeout * 1000.0));
    int code = kError;
    try {
        if (mode == "check") {
            auto loaded = detail::load_program(progPath);
            std::string invariantSource = invText;
            std::string templateText;
            if (!invFile.empty())
                invariantSource = detail::read_file(invFile);
            if (!templatePath.empty())
                templateText = detail::read_file(templatePath);
            report = make_report(mode, "check\n" + loaded.text + "\n" + initText + "\n" + invariantSource + "\n"
                                           + templateText + "\n" + marginal);
            auto resolver = program_resolver(loaded.program, false);
            GfMeasure g0 = parse_closed_form(initText, resolver);
            GfMeasure inv;
            if (!templateText.empty()) {
                Template t = parse_template(templateText, program_resolver(loaded.program, true));
                Valuation tau = import_smtlib_model(detail::read_file(modelPath));
                report["valuation"] = to_json(tau);
                inv = instantiate(t, tau);
            } else if (!invariantSource.empty()) {
                inv = parse_closed_form(invariantSource, resolver);
            } else {
                throw Error(ErrorKind::InvalidArgument, "check needs --invariant, --invariant-file or --template");
            }
            report["timing"]["parse_ms"] = clock.lap_ms();
            auto split = detail::split_single_loop(loaded.program);
            GfMeasure g = detail::apply_all(split.prefix, g0);
            VerifyOptions vo;
            vo.refuteDegree = refuteDegree;
            CheckResult r = check_invariant(split.loop, g, inv, vo);
            report["timing"]["verify_ms"] = clock.lap_ms();
            report["verification"] = to_string(r.verification.outcome);
            report["invariant"] = to_string(inv);
            if (r.verification.witness)
                report["witness"] = {{"monomial", to_string(Poly(r.verification.witness->first, Rational(1)))},
                                     {"coefficient", r.verification.witness->second.get_str()}};
            if (!r.certificate) {
                report["outcome"] = to_string(r.verification.outcome);
                report["diagnostics"].push_back(r.verification.outcome == VerifyOutcome::Refuted
                                                    ? "I - Phi(I) has a negative series coefficient"
                                                    : "cannot decide whether Phi(I) <= I");
                code = kPartial;
            } else {
                const Certificate& c = *r.certificate;
                detail::put_certificate(report, c);
                for (const auto& d : c.diagnostics)
                    report["diagnostics"].push_back(d);
                if (c.posterior && !marginal.empty()) {
                    GfMeasure m = *c.posterior;
                    for (const auto& v : detail::split_names(marginal))
                        m = marginalize(m, Program::indeterminate(v));
                    report["marginal"] = {{"over", detail::split_names(marginal)}, {"form", to_string(m)}};
                }
                if (c.kind == CertificateKind::ExactPosterior && !split.suffix.empty())
                    report["programPosterior"] = to_string(detail::apply_all(split.suffix, *c.posterior));
                report["timing"]["mass_ms"] = clock.lap_ms();
                code = detail::full_certificate(c.kind) ? kFullCertificate : kPartial;
            }
        } else if (mode == "synthesize") {
            auto loaded = detail::load_program(progPath);
            std::string templateText = templatePath.empty() ? "" : detail::read_file(templatePath);
            report = make_report(mode, "synthesize\n" + loaded.text + "\n" + initText + "\n" + templateText + "\n"
                                           + std::to_string(maxDegree) + "\n" + std::to_string(scanDegree));
            SynthesisConfig cfg;
            cfg.maxDenDegree = maxDegree;
            cfg.scanDegree = scanDegree;
            cfg.deadline = deadline;
            if (const char* env = std::getenv(kBranchLimitEnv)) {
                try {
                    cfg.solver.branchLimit = std::stoul(env);
                } catch (const std::exception&) {
                    throw Error(ErrorKind::InvalidArgument, std::string(kBranchLimitEnv) + " must be a number");
                }
            }
            GfMeasure g = parse_closed_form(initText, program_resolver(loaded.program, false));
            if (!templateText.empty())
                cfg.userTemplate = parse_template(templateText, program_resolver(loaded.program, true));
            report["timing"]["parse_ms"] = clock.lap_ms();
            ProgramSynthesis r = synthesize_program(loaded.program, g, cfg);
            report["timing"]["synthesize_ms"] = clock.lap_ms();
            report["status"] = to_string(r.status);
            Json loops = Json::array();
            for (const auto& l : r.loops)
                loops.push_back(to_json(l));
            report["loops"] = loops;
            const LoopSynthesis* last = r.loops.empty() ? nullptr : &r.loops.back();
            if (last && last->certificate) {
                detail::put_certificate(report, *last->certificate);
            } else if (last) {
                report["outcome"] = last->failedStage;
                report["candidate"] = last->candidate ? Json(to_string(*last->candidate)) : Json();
            } else {
                report["outcome"] = "NoLoop";
            }
            if (r.posterior)
                report["programPosterior"] = to_string(*r.posterior);
            for (const auto& l : r.loops)
                for (const auto& d : l.diagnostics)
                    report["diagnostics"].push_back(d);
            for (const auto& d : r.diagnostics)
                report["diagnostics"].push_back(d);
            if (!exportSmt.empty()) {
                std::ofstream smt(exportSmt);
                if (!smt)
                    throw Error(ErrorKind::InvalidArgument, "cannot write '" + exportSmt + "'");
                std::size_t n = 0;
                for (const auto& l : r.loops)
                    for (const auto& a : l.attempts)
                        for (const auto& s : a.residualSmtlib) {
                            smt << "; " << a.provenance << "\n" << s << "(reset)\n";
                            ++n;
                        }
                report["smtExport"] = {{"path", exportSmt}, {"systems", n}};
            }
            bool full = r.status == SynthesisStatus::Certified && last && last->certificate
                        && detail::full_certificate(last->certificate->kind);
            code = full ? kFullCertificate : kPartial;
        } else if (mode == "unroll") {
            auto loaded = detail::load_program(progPath);
            report = make_report(mode, "unroll\n" + loaded.text + "\n" + initText + "\n" + std::to_string(steps) + "\n"
                                           + std::to_string(cap) + "\n" + std::to_string(initDegree) + "\n"
                                           + compareText);
            auto resolver = program_resolver(loaded.program, false);
            auto split = detail::split_single_loop(loaded.program);
            GfMeasure g = detail::apply_all(split.prefix, parse_closed_form(initText, resolver));
            SparseMeasure start = from_closed_form(g, loaded.program.variables, initDegree);
            report["timing"]["parse_ms"] = clock.lap_ms();
            KleeneResult k = kleene_iterate(*split.loop, start, steps, cap);
            report["timing"]["unroll_ms"] = clock.lap_ms();
            report["outcome"] = "Unrolled";
            report["occupationLower"] = to_json(k.occLower);
            report["posteriorLower"] = to_json(k.postLower);
            report["residual"] = k.residual.get_str();
            report["masses"] = {{"occupationLower", k.occLower.mass().get_str()},
                                {"posteriorLower", k.postLower.mass().get_str()},
                                {"residual", k.residual.get_str()}};
            code = kFullCertificate;
            if (!compareText.empty()) {
                GfMeasure f = parse_closed_form(compareText, resolver);
                CrosscheckReport cc = crosscheck(f, k.postLower, static_cast<std::uint32_t>(steps));
                report["crosscheck"] = to_json(cc);
                if (!cc.sound()) {
                    report["diagnostics"].push_back("closed form lies below the oracle lower bound");
                    code = kPartial;
                }
            }
        } else if (mode == "expand") {
            report = make_report(mode, "expand\n" + gfText + "\n" + std::to_string(degree));
            GfMeasure f = parse_closed_form(gfText);
            report["timing"]["parse_ms"] = clock.lap_ms();
            report["outcome"] = "Expanded";
            report["invariant"] = nullptr;
            report["form"] = to_string(f);
            report["coefficients"] = to_json(series_expand(f, degree));
            report["timing"]["expand_ms"] = clock.lap_ms();
            code = kFullCertificate;
        } else if (mode == "chain") {
            std::string text = detail::read_file(chainPath);
            report = make_report(mode, "chain\n" + text + "\n" + contraction);
            FiniteChain chain = parse_chain(text);
            ChainMeasure occ = chain_occupation(chain);
            Json occJson = Json::object();
            Json boundJson = Json::object();
            for (const auto& s : chain.states) {
                occJson[s] = occ.at(s).str();
                boundJson[s] = chain.is_guard(s) ? std::string("0") : occ.at(s).str();
            }
            report["outcome"] = "Occupation";
            report["occupation"] = occJson;
            report["posterior"] = boundJson;
            if (iterative) {
                Json it = Json::object();
                for (const auto& [s, v] : chain_occupation_iterative(chain))
                    it[s] = v;
                report["occupationIterative"] = it;
            }
            code = kFullCertificate;
            if (!contraction.empty()) {
                RationalClosedForm cf = parse_closed_form(contraction);
                if (!cf.num().is_constant() || cf.den() != Poly(1))
                    throw Error(ErrorKind::InvalidArgument, "--contraction needs a rational number");
                Rational c = cf.num().constant_term();
                try {
                    ContractionResult cr = best_contraction_bound(chain, c);
                    Json inv = Json::object();
                    Json bound = Json::object();
                    bool le = true;
                    bool strict = false;
                    for (const auto& s : chain.states) {
                        inv[s] = cr.invariant.at(s).get_str();
                        bound[s] = cr.bound.at(s).get_str();
                        if (chain.is_guard(s))
                            continue;
                        const ExtendedMass& o = occ.at(s);
                        if (!o.is_finite() || o.value() > cr.bound.at(s))
                            le = false;
                        else if (o.value() < cr.bound.at(s))
                            strict = true;
                    }
                    std::map<std::string, Rational> scaled;
                    for (const auto& [s, v] : cr.invariant)
                        scaled[s] = v / (1 - c);
                    report["contraction"] = {{"c", c.get_str()},
                                             {"invariant", inv},
                                             {"bound", bound},
                                             {"scaledIsOccupationSuperinvariant",
                                              is_occupation_superinvariant(chain, scaled)},
                                             {"occupationImproves", le && strict}};
                    if (le && strict)
                        report["diagnostics"].push_back("the occupation bound strictly improves the "
                                                        + c.get_str() + "-contraction bound");
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::Diverges)
                        throw;
                    report["contraction"] = {{"c", c.get_str()}, {"diverges", true}};
                    report["diagnostics"].push_back(e.what());
                    code = kPartial;
                }
            }
        }
    } catch (const Error& e) {
        if (report.is_null())
            report = make_report(mode, "");
        report["outcome"] = e.kind() == ErrorKind::Timeout ? "Timeout" : "Error";
        report["error"] = {{"kind", to_string(e.kind())}, {"message", e.message()}};
        report["diagnostics"].push_back(e.what());
        err << "occinv: " << e.what() << "\n";
        code = e.kind() == ErrorKind::Timeout ? kPartial : kError;
    }
    out << report.dump(2) << "\n";
    return code;
}

} // namespace occinv::cli
