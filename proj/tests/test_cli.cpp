#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>

#include "support.hpp"

using namespace occinv;
using occinv::testing::benchmark;
using occinv::testing::run_cli;

namespace {

nlohmann::json without_timing(nlohmann::json j)
{
    j.erase("timing");
    if (j.contains("loops"))
        for (auto& l : j["loops"])
            l.erase("timing");
    return j;
}

std::string chain_file()
{
    return (std::filesystem::path(OCCINV_BENCHMARK_DIR) / "chains" / "three_state.chain").string();
}

/// Runs the installed binary; returns the exit status and captured stdout.
std::pair<int, std::string> run_binary(const std::string& argsAndRedirects, const std::string& env = "")
{
    std::string cmd = (env.empty() ? "" : env + " ") + "\"" + OCCINV_CLI_PATH + "\" " + argsAndRedirects;
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe))
        out.append(buf, n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

} // namespace

TEST(Cli, CorpusMatchesExpectations)
{
    for (const auto& b : occinv::testing::corpus()) {
        auto run = run_cli(occinv::testing::cli_args(b));
        for (const auto& m : occinv::testing::report_mismatches(b, run))
            ADD_FAILURE() << m << "\n" << run.out << run.err;
    }
}

TEST(Cli, MismatchesAreDetected)
{
    occinv::testing::Benchmark b = benchmark("geometric");
    auto run = run_cli(occinv::testing::cli_args(b));
    ASSERT_TRUE(occinv::testing::report_mismatches(b, run).empty());
    b.expected["posterior"] = "1/(3-C)";
    b.expected["masses"]["ert"] = "4";
    b.expected["exitCode"] = 2;
    EXPECT_EQ(occinv::testing::report_mismatches(b, run).size(), 3u);
}

TEST(Cli, ReportsAreDeterministic)
{
    for (const std::string name : {"geometric", "sequential_loops", "fast_dice_roller", "modulo_geometric"}) {
        auto args = occinv::testing::cli_args(benchmark(name));
        auto a = run_cli(args);
        auto b = run_cli(args);
        EXPECT_EQ(without_timing(a.report).dump(), without_timing(b.report).dump()) << name;
        EXPECT_EQ(a.report["digest"], b.report["digest"]);
    }
}

TEST(Cli, ReportFields)
{
    auto run = run_cli(occinv::testing::cli_args(benchmark("geometric")));
    for (const char* key : {"tool", "version", "mode", "digest", "outcome", "invariant", "posterior", "masses",
                            "timing", "diagnostics", "status", "loops"})
        EXPECT_TRUE(run.report.contains(key)) << key;
    const auto& loop = run.report["loops"][0];
    EXPECT_EQ(loop["status"], "Certified");
    EXPECT_EQ(loop["certificate"]["kind"], "ExactPosterior");
    EXPECT_EQ(loop["certificate"]["past"], true);
    EXPECT_FALSE(loop["attempts"].empty());
    EXPECT_EQ(loop["attempts"].back()["stage"], "certified");
    EXPECT_EQ(loop["attempts"].back()["provenance"], "Auto(denDegree=1)");
}

TEST(Cli, CheckWithInvariantFileAndRefutation)
{
    const auto& b = benchmark("fast_dice_roller");
    auto ok = run_cli({"check", (b.dir / "program.pgcl").string(), "--init", "V", "--invariant-file",
                       (b.dir / "invariant.gf").string()});
    EXPECT_EQ(ok.code, 0) << ok.err;
    EXPECT_EQ(ok.report["outcome"], "ExactPosterior");

    const auto& g = benchmark("geometric");
    auto bad = run_cli({"check", (g.dir / "program.pgcl").string(), "--init", "X", "--invariant", "X"});
    EXPECT_EQ(bad.code, 2);
    EXPECT_EQ(bad.report["verification"], "Refuted");
    EXPECT_TRUE(bad.report.contains("witness"));
}

TEST(Cli, Unroll)
{
    const auto& g = benchmark("geometric");
    auto run = run_cli({"unroll", (g.dir / "program.pgcl").string(), "--init", "X", "--steps", "3", "--compare",
                        "1/(2-C)"});
    EXPECT_EQ(run.code, 0) << run.err;
    EXPECT_EQ(run.report["residual"], "1/8");
    EXPECT_EQ(run.report["masses"]["occupationLower"], "11/4");
    EXPECT_EQ(run.report["masses"]["posteriorLower"], "7/8");
    EXPECT_EQ(run.report["posteriorLower"]["entries"]["C"], "1/4");
    EXPECT_TRUE(run.report["crosscheck"]["violations"].empty());
    EXPECT_EQ(run.report["crosscheck"]["massGap"], "1/8");
}

TEST(Cli, Expand)
{
    auto run = run_cli({"expand", "1/(2-C)", "--degree", "3"});
    EXPECT_EQ(run.code, 0) << run.err;
    EXPECT_EQ(run.report["coefficients"]["1"], "1/2");
    EXPECT_EQ(run.report["coefficients"]["C^3"], "1/16");
    EXPECT_EQ(run.report["coefficients"].size(), 4u);
}

TEST(Cli, ChainAndContraction)
{
    auto plain = run_cli({"chain", chain_file()});
    EXPECT_EQ(plain.code, 0) << plain.err;
    EXPECT_EQ(plain.report["occupation"]["s1"], "3/2");
    EXPECT_EQ(plain.report["occupation"]["s2"], "1/2");
    EXPECT_EQ(plain.report["occupation"]["s3"], "1/2");

    auto c = run_cli({"chain", chain_file(), "--contraction", "1/2"});
    EXPECT_EQ(c.code, 0) << c.err;
    EXPECT_EQ(c.report["contraction"]["bound"]["s1"], "0");
    EXPECT_EQ(c.report["contraction"]["bound"]["s2"], "4/3");
    EXPECT_EQ(c.report["contraction"]["bound"]["s3"], "4/3");
    EXPECT_EQ(c.report["contraction"]["occupationImproves"], true);
    EXPECT_EQ(c.report["contraction"]["scaledIsOccupationSuperinvariant"], true);
}

TEST(Cli, UsageErrors)
{
    std::ostringstream out, err;
    EXPECT_EQ(occinv::cli::run({}, out, err), 1);
    EXPECT_EQ(occinv::cli::run({"synthesize"}, out, err), 1);
    EXPECT_EQ(occinv::cli::run({"frobnicate"}, out, err), 1);
    EXPECT_FALSE(err.str().empty());
    auto missing = run_cli({"synthesize", "/nonexistent/program.pgcl", "--init", "X"});
    EXPECT_EQ(missing.code, 1);
    auto syntax = run_cli({"expand", "1/(2-", "--degree", "2"});
    EXPECT_EQ(syntax.code, 1);
    EXPECT_EQ(syntax.report["error"]["kind"], "SyntaxError");
}

TEST(Cli, ExportSmtAndModelRoundTrip)
{
    const auto& b = benchmark("modulo_geometric");
    auto dir = std::filesystem::temp_directory_path() / "occinv_cli_test";
    std::filesystem::create_directories(dir);
    auto model = dir / "model.smt2";
    {
        std::ofstream m(model);
        m << "sat\n(model (define-fun d () Real 4.0) (define-fun e () Real 1.0) (define-fun f () Real 1.0))\n";
    }
    auto run = run_cli({"check", (b.dir / "program.pgcl").string(), "--init", b.initText, "--template",
                        (b.dir / "template.tpl").string(), "--model", model.string()});
    EXPECT_EQ(run.code, 0) << run.err;
    EXPECT_EQ(run.report["outcome"], "ExactPosterior");
    EXPECT_EQ(run.report["valuation"]["d"], "4");

    auto smt = dir / "residual.smt2";
    auto exported = run_cli({"synthesize", (b.dir / "program.pgcl").string(), "--init", b.initText, "--export-smt",
                             smt.string()});
    EXPECT_EQ(exported.report["smtExport"]["path"], smt.string());
    EXPECT_TRUE(std::filesystem::exists(smt));
    std::filesystem::remove_all(dir);
}

TEST(Cli, BinaryExitCodes)
{
    const auto& g = benchmark("geometric");
    auto [ok, out] = run_binary("synthesize \"" + (g.dir / "program.pgcl").string() + "\" --init X --max-degree 1");
    EXPECT_EQ(ok, 0);
    auto report = nlohmann::json::parse(out, nullptr, false);
    ASSERT_FALSE(report.is_discarded());
    EXPECT_EQ(report["outcome"], "ExactPosterior");

    const auto& n = benchmark("nontermination");
    EXPECT_EQ(run_binary("synthesize \"" + (n.dir / "program.pgcl").string() + "\" --init X 2>/dev/null").first, 2);
    EXPECT_EQ(run_binary("--bogus 2>/dev/null").first, 1);
    EXPECT_EQ(run_binary("--version").first, 0);
}

TEST(Cli, BranchLimitEnvironment)
{
    const auto& g = benchmark("geometric");
    std::string args = "synthesize \"" + (g.dir / "program.pgcl").string() + "\" --init X 2>/dev/null";
    std::string var = occinv::cli::kBranchLimitEnv;
    EXPECT_EQ(run_binary(args).first, 0);

    auto [code, out] = run_binary(args, var + "=0");
    EXPECT_EQ(code, 2);
    auto report = nlohmann::json::parse(out, nullptr, false);
    ASSERT_FALSE(report.is_discarded());
    EXPECT_EQ(report["outcome"], "solve");
    EXPECT_NE(report["loops"][0]["attempts"][1]["detail"].get<std::string>().find("SolverBudgetExceeded"),
              std::string::npos);

    EXPECT_EQ(run_binary(args, var + "=notanumber").first, 1);
}
