#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace occinv;
using occinv::testing::benchmark;

namespace {

RationalClosedForm cf(const std::string& s) { return parse_closed_form(s); }

Var param_resolver(const std::string& name, const text::Token&) { return parameter(name); }

Poly params(const std::string& s) { return parse_polynomial(s, param_resolver); }

StmtPtr loop_of(const std::string& name)
{
    std::vector<StmtPtr> loops;
    occinv::testing::collect_loops(benchmark(name).program.body, loops);
    return loops.front();
}

Template benchmark_template(const std::string& name)
{
    const auto& b = benchmark(name);
    return parse_template(occinv::testing::read_text(b.dir / "template.tpl"), program_resolver(b.program, true));
}

Valuation named(std::initializer_list<std::pair<const char*, Rational>> values)
{
    Valuation v;
    for (const auto& [n, q] : values)
        v[parameter(n)] = q;
    return v;
}

} // namespace

TEST(Templates, EnumerationShapes)
{
    std::vector<Var> vars{indeterminate_of("x"), indeterminate_of("c")};
    auto ts = enumerate_templates(vars, 2);
    ASSERT_EQ(ts.size(), 3u);
    // numerator: all monomials of degree <= d; denominator: 1 plus degree 1..d
    const std::size_t numCount[] = {1, 3, 6};
    for (std::uint32_t d = 0; d < 3; ++d) {
        EXPECT_EQ(ts[d].denDegree, d);
        EXPECT_EQ(ts[d].provenance(), "Auto(denDegree=" + std::to_string(d) + ")");
        EXPECT_EQ(ts[d].parameters.size(), numCount[d] + numCount[d] - 1);
        EXPECT_EQ(ts[d].form.den().constant_term(), Rational(1));
        EXPECT_EQ(ts[d].form.den().total_degree(), d + (d > 0 ? 1u : 0u));
    }
    EXPECT_EQ(to_string(ts[0].form), "a0");
}

TEST(Templates, UserLinksAndPins)
{
    Template t = benchmark_template("modulo_geometric");
    EXPECT_TRUE(t.is_user());
    EXPECT_EQ(t.provenance(), "User");
    ASSERT_EQ(t.constraints.size(), 3u);
    std::set<std::string> names;
    for (Var p : t.parameters)
        names.insert(var_name(p));
    EXPECT_EQ(names, (std::set<std::string>{"d", "e", "f"}));
    auto inst = instantiate(t, named({{"d", 4}, {"e", 1}, {"f", 1}}));
    EXPECT_TRUE(equal(inst, cf("(4+2*X+X^2)/(4-X^3)")));

    const auto& p = benchmark("modulo_geometric").program;
    Template pinned = parse_template("(a + b*X)/(1 - e*X)\npin e = 1/2\n", program_resolver(p, true));
    EXPECT_EQ(pinned.parameters.size(), 2u);
    EXPECT_TRUE(equal(instantiate(pinned, named({{"a", 1}, {"b", 0}})), cf("2/(2-X)")));
}

TEST(Templates, UserTemplateErrors)
{
    const auto& p = benchmark("modulo_geometric").program;
    auto kindOf = [&](const std::string& text) -> std::optional<ErrorKind> {
        try {
            parse_template(text, program_resolver(p, true));
        } catch (const Error& e) {
            return e.kind();
        }
        return std::nullopt;
    };
    EXPECT_EQ(kindOf("# nothing\n"), ErrorKind::SyntaxError);
    EXPECT_EQ(kindOf("a*X\npin a = X\n"), ErrorKind::InvalidArgument);
    EXPECT_EQ(kindOf("a*X\nlink a X\n"), ErrorKind::SyntaxError);
}

TEST(System, GeometricContainsScaledTau)
{
    std::vector<Var> vars{indeterminate_of("c"), indeterminate_of("x")};
    Template t = make_template(vars, 1);
    auto sys = build_system(t, *loop_of("geometric"), cf("X"));
    EXPECT_FALSE(sys.equations.empty());
    for (const Poly& e : sys.equations)
        for (Var v : e.variables())
            EXPECT_TRUE(is_parameter(v));

    // a0 + a1*X + a2*C over 1 + b1*X + b2*C, in the order make_template assigns
    Valuation tau;
    for (Var p : t.parameters)
        tau[p] = 0;
    Poly numX = t.form.num().coefficient_of(indeterminate_of("x"), 1);
    Poly denC = t.form.den().coefficient_of(indeterminate_of("c"), 1);
    Poly num1 = t.form.num().substitute(indeterminate_of("x"), Rational(0)).substitute(indeterminate_of("c"),
                                                                                          Rational(0));
    tau[*num1.variables().begin()] = Rational(1, 2);
    tau[*numX.variables().begin()] = 1;
    tau[*denC.variables().begin()] = Rational(-1, 2);
    EXPECT_TRUE(satisfies(sys, tau));
    RationalClosedForm inv = instantiate(t, tau);
    EXPECT_TRUE(equal(inv, cf("(1+2*X)/(2-C)")));
    EXPECT_TRUE(equal(char_functional(*loop_of("geometric"), cf("X"), inv), inv));

    auto sols = solve_system(sys);
    bool found = false;
    for (const auto& s : sols) {
        EXPECT_TRUE(satisfies(sys, s));
        found = found || equal(instantiate(t, s), inv);
    }
    EXPECT_TRUE(found);
}

TEST(System, UnsatisfiableGuardTemplateIsG)
{
    Program p = desugar(parse_program("nat x; while (x < 0) { x := x + 1 }"));
    Template t;
    t.form = cf("1/(2-X)");
    auto sys = build_system(t, *p.body, cf("1/(2-X)"));
    EXPECT_TRUE(sys.equations.empty());
    EXPECT_TRUE(satisfies(sys, {}));
}

TEST(System, RandomWalkDegreeZeroHasNoSolution)
{
    Template t = make_template({indeterminate_of("x")}, 0);
    auto sys = build_system(t, *loop_of("random_walk"), cf("X"));
    EXPECT_TRUE(solve_system(sys).empty());
}

TEST(Solver, Examples)
{
    PolySystem lin;
    lin.equations = {params("a - 2*b"), params("b - 3")};
    lin.parameters = {parameter("a"), parameter("b")};
    auto sols = solve_system(lin);
    ASSERT_EQ(sols.size(), 1u);
    EXPECT_EQ(sols[0].at(parameter("a")), Rational(6));
    EXPECT_EQ(sols[0].at(parameter("b")), Rational(3));

    PolySystem sq;
    sq.equations = {params("a^2 + 1")};
    sq.parameters = {parameter("a")};
    EXPECT_TRUE(solve_system(sq).empty());
}

TEST(Solver, FactorBranchesAndDefaults)
{
    PolySystem sys;
    sys.equations = {params("a*b - a"), params("a^2 - 4")};
    sys.parameters = {parameter("a"), parameter("b"), parameter("c")};
    auto report = solve_system_report(sys);
    ASSERT_FALSE(report.valuations.empty());
    for (const auto& s : report.valuations) {
        EXPECT_TRUE(satisfies(sys, s.values));
        EXPECT_EQ(s.values.at(parameter("b")), Rational(1));
        EXPECT_EQ(abs(s.values.at(parameter("a"))), Rational(2));
    }
    // c is unconstrained and defaulted
    EXPECT_EQ(report.valuations.front().freeParameters, std::vector<Var>{parameter("c")});
    EXPECT_EQ(report.valuations.front().values.at(parameter("c")), Rational(0));
}

TEST(Solver, SoundOnCorpusSystems)
{
    for (const auto& b : occinv::testing::corpus()) {
        if (b.program.body->kind != Statement::Kind::While || b.name == "fast_dice_roller")
            continue;
        auto vars = template_variables(*b.program.body, b.init);
        for (const Template& t : enumerate_templates(vars, 1)) {
            auto sys = build_system(t, *b.program.body, b.init);
            for (const auto& s : solve_system(sys))
                EXPECT_TRUE(satisfies(sys, s)) << b.name << " " << to_string(t.form);
        }
    }
}

TEST(Scaling, QuotientIdentity)
{
    std::mt19937 rng(20261014);
    std::uniform_int_distribution<int> coeff(-6, 6);
    std::uniform_int_distribution<int> nonzero(1, 6);
    auto fraction = [](int p, int q) {
        Rational r(p, q);
        r.canonicalize();
        return r;
    };
    auto rational = [&] { return fraction(coeff(rng), nonzero(rng)); };

    Template mod = benchmark_template("modulo_geometric");
    std::vector<Var> vars{indeterminate_of("x"), indeterminate_of("c")};
    Template base = make_template(vars, 2);
    // unpinned variant: the constant denominator term becomes a parameter b0
    Template free = base;
    Var b0 = parameter("b0");
    free.form = RationalClosedForm::normalize(base.form.num(),
                                              base.form.den() - Poly(1) + Poly(Monomial::of(b0, 1), Rational(1)),
                                              ReductionPolicy{false, {}});
    free.parameters.push_back(b0);

    for (int i = 0; i < 100; ++i) {
        Rational k = fraction(nonzero(rng) * (i % 2 ? -1 : 1), nonzero(rng));
        const Template& t = i % 2 ? mod : free;
        Valuation tau;
        for (Var p : t.parameters)
            tau[p] = rational();
        if (i % 2)
            tau[parameter("d")] = fraction(nonzero(rng), nonzero(rng));
        else
            tau[b0] = fraction(nonzero(rng), nonzero(rng));
        RationalClosedForm a = instantiate(t, tau);
        RationalClosedForm b = instantiate(t, scale_valuation(tau, k));
        EXPECT_EQ(a, b) << to_string(a) << " vs " << to_string(b);
    }
}

TEST(Smtlib, ExportImportRoundTrip)
{
    PolySystem sys;
    sys.equations = {params("a*b - 1/2"), params("a^2 - 3*c")};
    sys.parameters = {parameter("a"), parameter("b"), parameter("c")};
    std::string script = export_smtlib(sys);
    EXPECT_NE(script.find("(set-logic QF_NRA)"), std::string::npos);
    EXPECT_NE(script.find("(declare-const a Real)"), std::string::npos);
    EXPECT_NE(script.find("(declare-const c Real)"), std::string::npos);
    EXPECT_EQ(std::count(script.begin(), script.end(), '\n'), 8);
    EXPECT_NE(script.find("(check-sat)"), std::string::npos);
    EXPECT_NE(script.find("(get-model)"), std::string::npos);

    std::string model = "sat\n(model\n  (define-fun a () Real 3.0)\n  (define-fun b () Real (/ 1.0 6.0))\n"
                        "  (define-fun c () Real (- 3))\n)\n";
    Valuation v = import_smtlib_model(model);
    EXPECT_EQ(v, named({{"a", 3}, {"b", Rational(1, 6)}, {"c", -3}}));
    EXPECT_FALSE(satisfies(sys, v));
    v[parameter("c")] = 3;
    EXPECT_TRUE(satisfies(sys, v));
}

TEST(Positivity, Examples)
{
    EXPECT_EQ(positivity_check(cf("(1+2*X)/(2-C)")).verdict, Positivity::Nonneg);
    auto unknown = positivity_check(cf("2*C/(C^2-3*C+2)+1"));
    EXPECT_EQ(unknown.verdict, Positivity::Unknown);
    EXPECT_FALSE(unknown.witness.has_value());
    RationalClosedForm neg = RationalClosedForm::normalize(params("0") - Poly(Monomial::of(indeterminate_of("x"), 1), 1),
                                                           Poly(-1) + Poly(Monomial::of(indeterminate_of("c"), 1),
                                                                           Rational(1, 2)),
                                                           ReductionPolicy{false, {}});
    EXPECT_EQ(positivity_check(neg).verdict, Positivity::Nonneg);
    auto refuted = positivity_check(cf("1/(1+X)"));
    EXPECT_EQ(refuted.verdict, Positivity::Refuted);
    ASSERT_TRUE(refuted.witness.has_value());
    EXPECT_EQ(refuted.witness->second, Rational(-1));
}

TEST(Synthesize, Geometric)
{
    SynthesisConfig config;
    config.maxDenDegree = 1;
    auto r = synthesize(loop_of("geometric"), cf("X"), config);
    EXPECT_EQ(r.status, SynthesisStatus::Certified);
    ASSERT_TRUE(r.certificate.has_value());
    EXPECT_EQ(r.certificate->kind, CertificateKind::ExactPosterior);
    EXPECT_EQ(r.certificate->invariantKind, VerifyOutcome::Exact);
    EXPECT_TRUE(equal(r.certificate->invariant, cf("(1+2*X)/(2-C)")));
    EXPECT_TRUE(equal(*r.certificate->posterior, cf("1/(2-C)")));
    ASSERT_FALSE(r.attempts.empty());
    EXPECT_EQ(r.attempts.back().stage, "certified");
}

TEST(Synthesize, NonterminationFails)
{
    auto r = synthesize(loop_of("nontermination"), benchmark("nontermination").init);
    EXPECT_EQ(r.status, SynthesisStatus::Failure);
    EXPECT_FALSE(r.certificate.has_value());
    bool noted = false;
    for (const auto& d : r.diagnostics)
        noted = noted || d.find("no finite rational invariant") != std::string::npos;
    EXPECT_TRUE(noted);
    EXPECT_EQ(r.attempts.size(), 4u);
}

TEST(Synthesize, RandomWalkUpperBoundOnly)
{
    auto r = synthesize(loop_of("random_walk"), cf("X"));
    ASSERT_TRUE(r.certificate.has_value());
    EXPECT_EQ(r.certificate->kind, CertificateKind::UpperBoundOnly);
    EXPECT_TRUE(equal(r.certificate->invariant, cf("(1+X)/(1-X)")));
}

TEST(Synthesize, UserTemplates)
{
    for (const std::string name : {"modulo_geometric", "random_walk_counter"}) {
        const auto& b = benchmark(name);
        SynthesisConfig config;
        config.userTemplate = benchmark_template(name);
        auto r = synthesize(loop_of(name), b.init, config);
        ASSERT_TRUE(r.certificate.has_value()) << name;
        EXPECT_EQ(r.certificate->kind, CertificateKind::ExactPosterior) << name;
        EXPECT_TRUE(equal(r.certificate->invariant, b.gf(b.expected["invariant"].get<std::string>()))) << name;
        ASSERT_TRUE(r.valuation.has_value());
        for (const auto& [p, v] : b.expected["valuation"].items())
            EXPECT_EQ(r.valuation->at(parameter(p)), Rational(v.get<std::string>())) << name << " " << p;
        ASSERT_EQ(r.attempts.size(), 1u);
        EXPECT_EQ(r.attempts[0].provenance, "User");
    }
}

TEST(Synthesize, SequentialLoopsPartialAtPositivity)
{
    const auto& b = benchmark("sequential_loops");
    auto r = synthesize_program(b.program, b.init);
    EXPECT_EQ(r.status, SynthesisStatus::Partial);
    EXPECT_FALSE(r.posterior.has_value());
    ASSERT_FALSE(r.loops.empty());
    const auto& last = r.loops.back();
    EXPECT_EQ(last.failedStage, "positivity");
    ASSERT_TRUE(last.candidate.has_value());
    EXPECT_TRUE(equal(*last.candidate, b.gf("2*C/(C^2-3*C+2)+1")));
    EXPECT_EQ(last.candidatePositivity, Positivity::Unknown);
}

TEST(Synthesize, CertificatesAreFixedPointsOrSuper)
{
    for (const auto& b : occinv::testing::corpus()) {
        SynthesisConfig config;
        if (std::filesystem::exists(b.dir / "template.tpl"))
            config.userTemplate = benchmark_template(b.name);
        if (b.expected.value("mode", "synthesize") != "synthesize")
            continue;
        auto r = synthesize_program(b.program, b.init, config);
        for (const auto& loop : r.loops) {
            if (!loop.certificate)
                continue;
            const Certificate& c = *loop.certificate;
            auto v = verify(*c.loop, loop.initial, c.invariant);
            EXPECT_NE(v.outcome, VerifyOutcome::Refuted) << b.name;
            if (positivity_check(c.invariant).verdict == Positivity::Nonneg) {
                for (const auto& [m, q] : series_expand(c.invariant, 15))
                    EXPECT_GE(sgn(q), 0) << b.name;
            }
        }
    }
}

TEST(Synthesize, EnumerationCompleteness)
{
    // known invariants with denominator degree <= 2 are reachable from the enumeration
    for (const auto& b : occinv::testing::corpus()) {
        const auto& e = b.expected;
        if (b.program.body->kind != Statement::Kind::While || !e.contains("invariant")
            || std::filesystem::exists(b.dir / "template.tpl") || e.value("mode", "synthesize") != "synthesize")
            continue;
        RationalClosedForm known = b.gf(e["invariant"].get<std::string>());
        if (known.den().total_degree() > 2)
            continue;
        auto vars = template_variables(*b.program.body, b.init);
        bool found = false;
        for (const Template& t : enumerate_templates(vars, 2)) {
            auto sys = build_system(t, *b.program.body, b.init);
            for (const auto& s : solve_system(sys)) {
                try {
                    found = found || equal(instantiate(t, s), known);
                } catch (const Error&) {
                }
            }
            if (found)
                break;
        }
        EXPECT_TRUE(found) << b.name;
    }
}
