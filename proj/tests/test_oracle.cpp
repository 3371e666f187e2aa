#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace occinv;
using occinv::testing::benchmark;

namespace {

RationalClosedForm cf(const std::string& s) { return parse_closed_form(s); }

Rational q(long p, long r = 1)
{
    Rational v(p, r);
    v.canonicalize();
    return v;
}

const Statement& geometric_loop() { return *benchmark("geometric").program.body; }

SparseMeasure geometric_start() { return point_mass({"x", "c"}, {1, 0}); }

FiniteChain three_state()
{
    return parse_chain(occinv::testing::read_text(std::filesystem::path(OCCINV_BENCHMARK_DIR) / "chains"
                                                  / "three_state.chain"));
}

} // namespace

TEST(ExecLoopFree, GeometricBody)
{
    auto out = exec_loopfree(geometric_loop().body(), geometric_start());
    EXPECT_EQ(out.entries.size(), 2u);
    EXPECT_EQ(out.at({1, 1}), q(1, 2));
    EXPECT_EQ(out.at({0, 0}), q(1, 2));
    EXPECT_EQ(out.residual, 0);
}

TEST(ExecLoopFree, SkipIsIdentity)
{
    SparseMeasure m({"x", "y"});
    m.add({0, 3}, q(1, 3));
    m.add({2, 1}, q(2, 3));
    auto out = exec_loopfree(*Statement::skip(), m);
    EXPECT_EQ(out.entries, m.entries);
}

TEST(ExecLoopFree, GeometricIidTruncation)
{
    Program p = desugar(parse_program("nat x, y; x += iid(geometric(1/2), y)"));
    auto out = exec_loopfree(*p.body, point_mass({"x", "y"}, {2, 1}), 3);
    EXPECT_EQ(out.entries.size(), 3u);
    EXPECT_EQ(out.at({2, 1}), q(1, 2));
    EXPECT_EQ(out.at({3, 1}), q(1, 4));
    EXPECT_EQ(out.at({4, 1}), q(1, 8));
    EXPECT_EQ(out.residual, q(1, 8));
}

TEST(ExecLoopFree, MassConservation)
{
    std::size_t checked = 0;
    for (const auto& b : occinv::testing::corpus()) {
        std::vector<StmtPtr> bodies;
        occinv::testing::collect_loop_free(b.program.body, bodies);
        const auto& vars = b.program.variables;
        SparseMeasure m(vars);
        for (std::uint64_t k = 0; k < 3; ++k)
            m.add(State(vars.size(), k), q(1, 3));
        for (const auto& body : bodies) {
            bool diverges = false;
            std::function<void(const Statement&)> scan = [&](const Statement& s) {
                diverges = diverges || s.kind == Statement::Kind::Diverge;
                for (const auto& c : s.children)
                    scan(*c);
            };
            scan(*body);
            if (diverges)
                continue;
            auto out = exec_loopfree(*body, m, 8);
            EXPECT_EQ(out.mass() + out.residual, 1) << b.name;
            ++checked;
        }
    }
    EXPECT_GE(checked, 10u);
}

TEST(Kleene, GeometricThreeSteps)
{
    auto r = kleene_iterate(geometric_loop(), geometric_start(), 3);
    EXPECT_EQ(r.postLower.entries.size(), 3u);
    EXPECT_EQ(r.postLower.at({0, 0}), q(1, 2));
    EXPECT_EQ(r.postLower.at({0, 1}), q(1, 4));
    EXPECT_EQ(r.postLower.at({0, 2}), q(1, 8));
    EXPECT_EQ(r.residual, q(1, 8));
    EXPECT_EQ(r.occLower.mass(), q(11, 4));
    // visits of the guarded states follow 2^-k
    for (std::uint64_t k = 0; k <= 3; ++k)
        EXPECT_EQ(r.occLower.at({1, k}), q(1, 1L << k));
}

TEST(Kleene, ZeroStepsAndDeadGuard)
{
    SparseMeasure g({"x", "c"});
    g.add({1, 0}, q(1, 2));
    g.add({0, 4}, q(1, 2));
    auto r0 = kleene_iterate(geometric_loop(), g, 0);
    EXPECT_EQ(r0.occLower.entries, g.entries);
    EXPECT_EQ(r0.postLower.entries, (std::map<State, Rational>{{{0, 4}, q(1, 2)}}));
    EXPECT_EQ(r0.residual, q(1, 2));

    Program p = desugar(parse_program("nat x; while (x < 0) { x := x + 1 }"));
    SparseMeasure h({"x"});
    h.add({0}, q(1, 3));
    h.add({5}, q(2, 3));
    for (std::size_t K : {1u, 4u}) {
        auto r = kleene_iterate(*p.body, h, K);
        EXPECT_EQ(r.postLower.entries, h.entries);
        EXPECT_EQ(r.residual, 0);
    }
}

TEST(Kleene, MonotoneConvergence)
{
    for (const std::string name : {"geometric", "faulty_decrement", "thirds_geometric", "fast_dice_roller"}) {
        const auto& b = benchmark(name);
        SparseMeasure g = from_closed_form(b.init, b.program.variables, 4);
        auto last = kleene_iterate(*b.program.body, g, 0);
        for (std::size_t K = 1; K <= 12; ++K) {
            auto r = kleene_iterate(*b.program.body, g, K);
            for (const auto& [s, w] : last.occLower.entries)
                EXPECT_GE(r.occLower.at(s), w) << name << " K=" << K;
            EXPECT_LE(r.residual, last.residual) << name << " K=" << K;
            last = std::move(r);
        }
        EXPECT_EQ(last.residualTrace.size(), 13u);
        EXPECT_TRUE(std::is_sorted(last.residualTrace.rbegin(), last.residualTrace.rend())) << name;
    }
}

TEST(Crosscheck, GeometricPosterior)
{
    auto r = kleene_iterate(geometric_loop(), geometric_start(), 3);
    auto report = crosscheck(cf("1/(2-C)"), r.postLower, 3);
    EXPECT_TRUE(report.sound());
    EXPECT_TRUE(report.tight());
    EXPECT_EQ(report.residual, q(1, 8));
    EXPECT_LE(report.maxGap, report.residual);
    ASSERT_TRUE(report.massGap.has_value());
    EXPECT_EQ(*report.massGap, q(1, 8));
}

TEST(Crosscheck, ZeroAgainstNonzero)
{
    auto r = kleene_iterate(geometric_loop(), geometric_start(), 3);
    auto report = crosscheck(cf("0"), r.postLower, 5);
    EXPECT_EQ(report.violations.size(), r.postLower.entries.size());
    for (const auto& v : report.violations)
        EXPECT_EQ(v.symbolic, 0);
}

TEST(Crosscheck, FastDiceRollerMarginal)
{
    const auto& b = benchmark("fast_dice_roller");
    SparseMeasure g = from_closed_form(b.init, b.program.variables, 2);
    auto r = kleene_iterate(*b.program.body, g, 30);
    auto marginal = marginalize(r.postLower, {"v", "f"});
    auto report = crosscheck(cf("1/6*(1-C^6)/(1-C)"), marginal, 6);
    EXPECT_TRUE(report.sound());
    EXPECT_EQ(report.violations.size(), 0u);
    EXPECT_LT(report.residual, q(1, 1000));
    EXPECT_LE(report.maxGap, report.residual);
}

TEST(Chain, ThreeStateOccupation)
{
    ChainMeasure occ = chain_occupation(three_state());
    EXPECT_EQ(occ.at("s1"), ExtendedMass::finite(q(3, 2)));
    EXPECT_EQ(occ.at("s2"), ExtendedMass::finite(q(1, 2)));
    EXPECT_EQ(occ.at("s3"), ExtendedMass::finite(q(1, 2)));
}

TEST(Chain, TruncatedGeometricChain)
{
    // big steps of the geometric loop for c <= 3; state "x,c"
    std::string text = "init 1,0 1\n";
    for (int k = 0; k <= 3; ++k)
        text += "1," + std::to_string(k) + " 1," + std::to_string(k + 1) + " 1/2\n1," + std::to_string(k) + " 0,"
                + std::to_string(k) + " 1/2\n";
    ChainMeasure occ = chain_occupation(parse_chain(text));
    for (long k = 0; k <= 3; ++k) {
        EXPECT_EQ(occ.at("1," + std::to_string(k)), ExtendedMass::finite(q(1, 1L << k)));
        EXPECT_EQ(occ.at("0," + std::to_string(k)), ExtendedMass::finite(q(1, 2L << k)));
    }
}

TEST(Chain, ImmediateAbsorptionAndRecurrence)
{
    ChainMeasure occ = chain_occupation(parse_chain("a b 1\ninit b 2/3\ninit c 1/3\n"));
    EXPECT_EQ(occ.at("b"), ExtendedMass::finite(q(2, 3)));
    EXPECT_EQ(occ.at("c"), ExtendedMass::finite(q(1, 3)));
    EXPECT_EQ(occ.at("a"), ExtendedMass::finite(0));

    ChainMeasure loop = chain_occupation(parse_chain("a b 1/2\na t 1/2\nb a 1\ninit a 1\n"));
    EXPECT_EQ(loop.at("a"), ExtendedMass::finite(2));
    EXPECT_EQ(loop.at("t"), ExtendedMass::finite(1));
    ChainMeasure stuck = chain_occupation(parse_chain("a b 1\nb a 1\ninit a 1\n"));
    EXPECT_TRUE(stuck.at("a").is_infinite());
    EXPECT_TRUE(stuck.at("b").is_infinite());
}

TEST(Chain, RejectsBadRows)
{
    try {
        chain_occupation(parse_chain("a b 1/2\na c 1/3\ninit a 1\n"));
        FAIL() << "expected InvalidProbability";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidProbability);
    }
}

TEST(Chain, IterativeMatchesExact)
{
    auto exact = chain_occupation(three_state());
    auto approx = chain_occupation_iterative(three_state(), 10000);
    for (const auto& [s, m] : exact)
        EXPECT_NEAR(approx.at(s), m.value().get_d(), 1e-9) << s;
}

TEST(Contraction, ThreeStateBounds)
{
    auto half = best_contraction_bound(three_state(), q(1, 2));
    EXPECT_EQ(half.bound.at("s1"), 0);
    EXPECT_EQ(half.bound.at("s2"), q(4, 3));
    EXPECT_EQ(half.bound.at("s3"), q(4, 3));

    auto third = best_contraction_bound(three_state(), q(1, 3));
    EXPECT_EQ(third.invariant.at("s1"), 1);
    EXPECT_EQ(third.invariant.at("s2"), 1);
    EXPECT_EQ(third.invariant.at("s3"), 1);
    EXPECT_EQ(third.bound.at("s2"), q(3, 2));
    EXPECT_EQ(third.bound.at("s3"), q(3, 2));

    try {
        best_contraction_bound(three_state(), q(1, 4));
        FAIL() << "expected Diverges";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Diverges);
    }
}

TEST(Contraction, DeadGuardKeepsInitial)
{
    FiniteChain chain = parse_chain("init a 1/2\ninit b 1/2\n");
    auto r = best_contraction_bound(chain, q(1, 2));
    EXPECT_EQ(r.invariant.at("a"), q(1, 2));
    EXPECT_EQ(r.invariant.at("b"), q(1, 2));
}

TEST(Contraction, ContractionInvariantsAreOccupationInvariants)
{
    for (const Rational& c : {q(1, 3), q(1, 2)}) {
        FiniteChain chain = three_state();
        auto r = best_contraction_bound(chain, c);
        std::map<std::string, Rational> lifted;
        for (const auto& [s, v] : r.invariant)
            lifted[s] = v / (1 - c);
        EXPECT_TRUE(is_occupation_superinvariant(chain, lifted)) << c.get_str();
        // the exact occupation measure is the least one
        for (const auto& [s, m] : chain_occupation(chain))
            EXPECT_LE(m.value(), lifted.at(s)) << s;
    }
}

TEST(StuckState, NonterminationHasOne)
{
    const auto& b = benchmark("nontermination");
    SparseMeasure g = from_closed_form(b.init, b.program.variables, 2);
    auto s = find_stuck_state(*b.program.body, g);
    ASSERT_TRUE(s.has_value());
    SparseMeasure img = exec_loopfree(b.program.body->body(), point_mass(b.program.variables, *s));
    EXPECT_EQ(img.at(*s), 1);
    EXPECT_FALSE(find_stuck_state(geometric_loop(), geometric_start()).has_value());
}
