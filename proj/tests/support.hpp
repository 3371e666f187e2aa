#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "occinv/cli/run.hpp"
#include "occinv/occinv.hpp"

namespace occinv::testing {

namespace fs = std::filesystem;

inline std::string read_text(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string trim(std::string s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

/// Closed-form file contents without comment lines.
inline std::string read_gf(const fs::path& p)
{
    std::stringstream in(read_text(p));
    std::string out;
    for (std::string line; std::getline(in, line);) {
        line = trim(line);
        if (!line.empty() && line[0] != '#')
            out += line + " ";
    }
    return trim(out);
}

struct Benchmark {
    std::string name;
    fs::path dir;
    std::string source;
    Program program; // desugared
    std::string initText;
    GfMeasure init;
    nlohmann::json expected;

    RationalClosedForm gf(const std::string& text) const
    {
        return parse_closed_form(text, program_resolver(program, false));
    }
};

inline std::vector<Benchmark> load_corpus()
{
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(OCCINV_BENCHMARK_DIR))
        if (e.is_directory() && fs::exists(e.path() / "program.pgcl"))
            dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    std::vector<Benchmark> out;
    for (const auto& d : dirs) {
        Benchmark b;
        b.name = d.filename().string();
        b.dir = d;
        b.source = read_text(d / "program.pgcl");
        b.program = desugar(parse_program(b.source));
        b.initText = read_gf(d / "init.gf");
        b.init = b.gf(b.initText);
        b.expected = nlohmann::json::parse(read_text(d / "expected.json"));
        out.push_back(std::move(b));
    }
    return out;
}

inline const std::vector<Benchmark>& corpus()
{
    static const std::vector<Benchmark> c = load_corpus();
    return c;
}

inline const Benchmark& benchmark(const std::string& name)
{
    for (const auto& b : corpus())
        if (b.name == name)
            return b;
    throw Error(ErrorKind::InvalidArgument, "no benchmark " + name);
}

inline void collect_guards(const Statement& s, std::vector<GuardPtr>& out)
{
    if (s.guard)
        out.push_back(s.guard);
    for (const auto& c : s.children)
        collect_guards(*c, out);
}

inline void collect_loops(const StmtPtr& s, std::vector<StmtPtr>& out)
{
    if (s->kind == Statement::Kind::While)
        out.push_back(s);
    for (const auto& c : s->children)
        collect_loops(c, out);
}

/// Maximal loop-free statements: loop bodies and loop-free top-level items.
inline void collect_loop_free(const StmtPtr& s, std::vector<StmtPtr>& out)
{
    if (!occinv::detail::contains_loop(*s)) {
        out.push_back(s);
        return;
    }
    for (const auto& c : s->children)
        collect_loop_free(c, out);
}

inline std::vector<std::string> state_variables(const Benchmark& b) { return b.program.variables; }

/// Command line reproducing the benchmark's expected run.
inline std::vector<std::string> cli_args(const Benchmark& b)
{
    const auto& e = b.expected;
    std::string mode = e.value("mode", "synthesize");
    std::vector<std::string> args{mode, (b.dir / "program.pgcl").string(), "--init", b.initText};
    auto file = [&](const char* key) { return (b.dir / e[key].get<std::string>()).string(); };
    if (mode == "check") {
        if (e.contains("model")) {
            args.insert(args.end(), {"--template", file("template"), "--model", file("model")});
        } else {
            args.insert(args.end(), {"--invariant-file", file("invariant")});
        }
        if (e.contains("marginal"))
            args.insert(args.end(), {"--marginal", e["marginal"].get<std::string>()});
    } else {
        if (e.contains("template"))
            args.insert(args.end(), {"--template", file("template")});
        if (e.contains("maxDegree"))
            args.insert(args.end(), {"--max-degree", std::to_string(e["maxDegree"].get<int>())});
    }
    return args;
}

struct CliRun {
    int code = -1;
    nlohmann::json report;
    std::string out;
    std::string err;
};

inline CliRun run_cli(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    CliRun r;
    r.code = occinv::cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    r.report = nlohmann::json::parse(r.out, nullptr, false);
    return r;
}

/// Differences between a CLI report and the benchmark's expected.json; empty
/// when everything matches.
inline std::vector<std::string> report_mismatches(const Benchmark& b, const CliRun& run)
{
    std::vector<std::string> bad;
    const auto& e = b.expected;
    const auto& r = run.report;
    auto note = [&](const std::string& what) { bad.push_back(b.name + ": " + what); };
    if (run.code != e["exitCode"].get<int>())
        note("exit code " + std::to_string(run.code));
    if (r.is_discarded()) {
        note("report is not JSON");
        return bad;
    }
    if (r.value("outcome", "") != e["outcome"].get<std::string>())
        note("outcome " + r.value("outcome", "?"));
    auto sameForm = [&](const nlohmann::json& got, const std::string& want) {
        return got.is_string() && equal(b.gf(got.get<std::string>()), b.gf(want));
    };
    if (e.contains("invariant")) {
        std::string want = e["invariant"].get<std::string>();
        if (want.size() > 3 && want.substr(want.size() - 3) == ".gf")
            want = read_gf(b.dir / want);
        if (!sameForm(r["invariant"], want))
            note("invariant " + r["invariant"].dump());
    }
    if (e.contains("posterior") && !sameForm(r["posterior"], e["posterior"].get<std::string>()))
        note("posterior " + r["posterior"].dump());
    if (e.contains("masses"))
        for (const auto& [k, v] : e["masses"].items())
            if (!r["masses"].contains(k) || r["masses"][k] != v)
                note("mass " + k + " " + r["masses"].value(k, "?"));
    if (e.contains("verification") && r.value("verification", "") != e["verification"].get<std::string>())
        note("verification " + r.value("verification", "?"));
    if (e.contains("marginalForm")
        && !(r.contains("marginal") && sameForm(r["marginal"]["form"], e["marginalForm"].get<std::string>())))
        note("marginal");
    if (e.contains("valuation")) {
        const nlohmann::json& got = r.contains("valuation") ? r["valuation"] : r["loops"].back()["valuation"];
        for (const auto& [k, v] : e["valuation"].items())
            if (!got.contains(k) || Rational(got[k].get<std::string>()) != Rational(v.get<std::string>()))
                note("valuation " + k);
    }
    if (e.contains("candidate") && !sameForm(r["candidate"], e["candidate"].get<std::string>()))
        note("candidate " + r["candidate"].dump());
    if (e.contains("candidatePositivity")
        && r["loops"].back().value("candidatePositivity", "") != e["candidatePositivity"].get<std::string>())
        note("candidate positivity");
    if (e.contains("diagnosticContains")) {
        bool found = false;
        for (const auto& d : r["diagnostics"])
            found = found || d.get<std::string>().find(e["diagnosticContains"].get<std::string>()) != std::string::npos;
        if (!found)
            note("missing diagnostic");
    }
    return bad;
}

} // namespace occinv::testing
