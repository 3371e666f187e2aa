#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace occinv;
using occinv::testing::corpus;

namespace {

using K = Statement::Kind;

const Statement& body_of(const Program& p) { return *p.body; }

} // namespace

TEST(Parser, GeometricLoopShape)
{
    Program p = parse_program("nat x, c; while (x = 1) { {c := c + 1} [1/2] {x := 0} }");
    ASSERT_EQ(body_of(p).kind, K::While);
    EXPECT_EQ(body_of(p).guard->kind, Guard::Kind::Eq);
    const Statement& body = body_of(p).body();
    ASSERT_EQ(body.kind, K::Choice);
    EXPECT_EQ(body.prob, Rational(1, 2));
    EXPECT_EQ(body.right().kind, K::AssignConst);
    EXPECT_EQ(body.right().n, 0u);
    EXPECT_EQ(p.variables, (std::vector<std::string>{"x", "c"}));
    EXPECT_TRUE(p.explicitDeclarations);

    Program d = desugar(p);
    const Statement& inc = d.body->body().left();
    ASSERT_EQ(inc.kind, K::IidIncrement);
    EXPECT_EQ(inc.var, "c");
    EXPECT_EQ(inc.dist.kind, Dist::Kind::Dirac);
    EXPECT_TRUE(inc.countVar.empty());
    EXPECT_EQ(d.body->guard->kind, Guard::Kind::And);
}

TEST(Parser, Skip)
{
    Program p = parse_program("skip");
    EXPECT_EQ(body_of(p).kind, K::Skip);
    EXPECT_TRUE(p.flags.isLoopFree);
}

TEST(Parser, DoublingDesugarsToSelfIid)
{
    Program p = desugar(parse_program("nat v; v := 2*v"));
    const Statement& s = body_of(p);
    ASSERT_EQ(s.kind, K::IidIncrement);
    EXPECT_EQ(s.var, "v");
    EXPECT_EQ(s.countVar, "v");
    EXPECT_EQ(s.dist.kind, Dist::Kind::Dirac);
    EXPECT_EQ(s.dist.a, 1u);
}

TEST(Parser, LinearAssignmentDesugars)
{
    Program p = desugar(parse_program("nat x, y; x := x + 2*y + 1"));
    const Statement& s = body_of(p);
    ASSERT_EQ(s.kind, K::Seq);
    ASSERT_EQ(s.children.size(), 2u);
    EXPECT_EQ(s.children[0]->countVar, "y");
    EXPECT_EQ(s.children[0]->dist.a, 2u);
    EXPECT_TRUE(s.children[1]->countVar.empty());
    EXPECT_EQ(s.children[1]->dist.a, 1u);

    EXPECT_EQ(body_of(desugar(parse_program("nat x; x := x"))).kind, K::Skip);
}

TEST(Parser, SyntaxErrorHasPosition)
{
    try {
        parse_program("nat x;\nwhile (x < 1) { x := }");
        FAIL() << "expected SyntaxError";
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_GT(e.column(), 1u);
    }
}

TEST(Parser, UndeclaredVariableRejected)
{
    try {
        parse_program("nat x; y := 1");
        FAIL() << "expected UndeclaredVariable";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UndeclaredVariable);
    }
}

TEST(Parser, InvalidProbabilityRejected)
{
    try {
        parse_program("nat x; {x := 1} [3/2] {skip}");
        FAIL() << "expected InvalidProbability";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidProbability);
    }
}

TEST(Classify, Examples)
{
    Program geo = parse_program("nat x, c; while (x = 1) { {c := c + 1} [1/2] {x := 0} }");
    EXPECT_TRUE(geo.flags.isSingleLoop);
    EXPECT_TRUE(geo.flags.isRedip);
    EXPECT_TRUE(geo.flags.bodyHasAssignments);
    EXPECT_FALSE(geo.flags.isClRedip);

    EXPECT_FALSE(parse_program("diverge").flags.isRedip);

    Program nested = parse_program("nat x, y; while (x < 3) { while (y < 2) { y := y + 1 }; x := x + 1 }");
    EXPECT_FALSE(nested.flags.isSingleLoop);
    EXPECT_TRUE(nested.flags.hasNestedLoops);

    Program walk = parse_program("nat x; while (x > 0) { {x := x - 1} [1/2] {x := x + 1} }");
    EXPECT_TRUE(walk.flags.isSingleLoop);
    EXPECT_FALSE(walk.flags.bodyHasAssignments);
}

TEST(Printer, CorpusRoundTrip)
{
    for (const auto& b : corpus()) {
        Program raw = parse_program(b.source);
        std::string printed = to_string(raw);
        Program again = parse_program(printed);
        EXPECT_TRUE(*raw.body == *again.body) << b.name << "\n" << printed;
        EXPECT_EQ(raw.variables, again.variables) << b.name;
        EXPECT_EQ(to_string(again), printed) << b.name;
    }
}

TEST(Desugar, AgreesWithOracleOnLinearAssignments)
{
    const std::vector<std::string> vars{"x", "y", "z"};
    const std::vector<std::string> sources{
        "nat x, y, z; x := x + 2*y + 1",
        "nat x, y, z; x := 3*x",
        "nat x, y, z; y := x + z",
        "nat x, y, z; z := 4",
        "nat x, y, z; x := x - 2",
        "nat x, y, z; x := 2*y + 3*z",
    };
    std::mt19937 rng(5);
    std::uniform_int_distribution<std::uint64_t> val(0, 6);
    for (const auto& src : sources) {
        Program raw = parse_program(src);
        Program sugarFree = desugar(raw);
        for (int i = 0; i < 25; ++i) {
            State s{val(rng), val(rng), val(rng)};
            SparseMeasure m = point_mass(vars, s);
            SparseMeasure a = exec_loopfree(*raw.body, m);
            SparseMeasure b = exec_loopfree(*sugarFree.body, m);
            ASSERT_EQ(a.entries, b.entries) << src;
        }
    }
}

TEST(Desugar, GuardsDesugarToRectangularForm)
{
    auto g = parse_guard("x != 2", {"x"});
    auto d = desugar_guard(g);
    EXPECT_EQ(d->kind, Guard::Kind::Or);
    for (std::uint64_t v = 0; v < 6; ++v) {
        auto value = [&](const std::string&) { return v; };
        EXPECT_EQ(holds(*g, value), holds(*d, value)) << v;
    }
}
