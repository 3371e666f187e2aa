#pragma once

#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "occinv/synthesis/system.hpp"

namespace occinv {

struct SolverConfig {
    std::size_t branchLimit = 256;       // budget = equation count * branchLimit
    std::size_t maxValuations = 16;
    std::size_t maxFreeCombinations = 64; // default assignments tried per solution family
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

/// A solution together with the parameters that were left free and defaulted.
struct SolvedValuation {
    Valuation values;
    std::vector<Var> freeParameters;
};

struct SolveReport {
    std::vector<SolvedValuation> valuations;
    std::vector<PolySystem> residual; // branches abandoned as too nonlinear
    std::size_t branches = 0;
};

namespace detail {

struct Elimination {
    Var var;
    Poly num;
    Poly den;
};

struct SolverState {
    std::vector<Poly> equations;
    std::vector<Elimination> eliminated; // in elimination order
    std::vector<Poly> nonzero;           // must not vanish at the solution
};

inline std::vector<Integer> small_divisors(Integer n)
{
    std::vector<Integer> out;
    n = abs(n);
    if (n == 0 || n > Integer("1000000000000"))
        return out;
    for (Integer d = 1; d * d <= n; ++d)
        if (n % d == 0) {
            out.push_back(d);
            if (d * d != n)
                out.push_back(n / d);
        }
    return out;
}

/// Rational roots of a univariate polynomial; nullopt if the coefficients are too large.
inline std::optional<std::vector<Rational>> rational_roots(const Poly& p, Var v)
{
    Poly q = primitive_equation(p);
    Integer lead(q.coefficient_of(v, q.degree(v)).constant_term());
    Integer last;
    std::uint32_t low = q.min_degree(v);
    last = Integer(q.coefficient_of(v, low).constant_term());
    auto ps = small_divisors(last);
    auto qs = small_divisors(lead);
    if (ps.empty() || qs.empty())
        return std::nullopt;
    std::set<Rational> roots;
    if (low > 0)
        roots.insert(Rational(0));
    for (const Integer& a : ps)
        for (const Integer& b : qs)
            for (int s : {1, -1}) {
                Rational r(a * s, b);
                r.canonicalize();
                if (sgn(evaluate(q, [&](Var) { return r; })) == 0)
                    roots.insert(r);
            }
    return std::vector<Rational>(roots.begin(), roots.end());
}

class Solver {
public:
    Solver(const PolySystem& sys, const SolverConfig& config) : sys_(sys), config_(config)
    {
        budget_ = std::max<std::size_t>(1, sys.equations.size()) * config.branchLimit;
    }

    SolveReport run()
    {
        SolverState s;
        s.equations = sys_.equations;
        explore(std::move(s));
        return std::move(report_);
    }

private:
    const PolySystem& sys_;
    SolverConfig config_;
    std::size_t budget_;
    SolveReport report_;
    std::set<Valuation> seen_;

    bool full() const { return report_.valuations.size() >= config_.maxValuations; }

    void tick()
    {
        if (++report_.branches > budget_)
            throw Error(ErrorKind::SolverBudgetExceeded,
                        "solver exceeded " + std::to_string(budget_) + " branches");
        if (config_.deadline && std::chrono::steady_clock::now() > *config_.deadline)
            throw Error(ErrorKind::Timeout, "solver deadline reached");
    }

    /// Applies var := num/den to the state; false if the branch is inconsistent.
    static bool apply(SolverState& s, Var v, const Poly& num, const Poly& den)
    {
        auto sub = [&](const Poly& p) {
            if (!p.contains(v))
                return p;
            return substitute_cleared(p, v, num, den).first;
        };
        std::vector<Poly> eqs;
        for (const Poly& e : s.equations) {
            Poly q = primitive_equation(sub(e));
            if (q.is_zero_poly())
                continue;
            if (q.is_constant())
                return false;
            if (std::find(eqs.begin(), eqs.end(), q) == eqs.end())
                eqs.push_back(std::move(q));
        }
        std::vector<Poly> nz;
        for (const Poly& c : s.nonzero) {
            Poly q = sub(c);
            if (q.is_zero_poly())
                return false;
            if (!q.is_constant())
                nz.push_back(primitive_equation(q));
        }
        s.equations = std::move(eqs);
        s.nonzero = std::move(nz);
        s.eliminated.push_back({v, num, den});
        return true;
    }

    static bool add_equations(SolverState& s, std::initializer_list<Poly> extra)
    {
        for (const Poly& e : extra) {
            Poly q = primitive_equation(e);
            if (q.is_zero_poly())
                continue;
            if (q.is_constant())
                return false;
            if (std::find(s.equations.begin(), s.equations.end(), q) == s.equations.end())
                s.equations.push_back(std::move(q));
        }
        return true;
    }

    /// Linear elimination to a fixpoint: pick a parameter of degree 1 with a
    /// constant coefficient in the shortest such equation.
    static bool eliminate_linear(SolverState& s)
    {
        for (;;) {
            const Poly* best = nullptr;
            Var bestVar{};
            for (const Poly& e : s.equations)
                for (Var v : e.variables())
                    if (e.degree(v) == 1) {
                        Poly c = e.coefficient_of(v, 1);
                        if (c.is_constant() && (!best || e.size() < best->size())) {
                            best = &e;
                            bestVar = v;
                        }
                    }
            if (!best)
                return true;
            Poly c = best->coefficient_of(bestVar, 1);
            Poly rest = *best - c * Poly::variable(bestVar);
            Poly num = rest * (Rational(-1) / c.constant_term());
            if (!apply(s, bestVar, num, Poly(1)))
                return false;
        }
    }

    void explore(SolverState s)
    {
        if (full())
            return;
        tick();
        if (!eliminate_linear(s))
            return;
        if (s.equations.empty()) {
            finish(s);
            return;
        }
        auto order = s.equations;
        std::sort(order.begin(), order.end(), [](const Poly& a, const Poly& b) {
            if (a.total_degree() != b.total_degree())
                return a.total_degree() < b.total_degree();
            return a.size() < b.size();
        });
        // Monomial factor: some parameter divides the whole equation.
        for (const Poly& e : order) {
            Monomial m = e.monomial_content();
            if (m.is_one())
                continue;
            for (const auto& [v, k] : m.powers()) {
                SolverState z = s;
                if (apply(z, v, Poly(), Poly(1)))
                    explore(std::move(z));
            }
            SolverState r = s;
            std::replace(r.equations.begin(), r.equations.end(), e, primitive_equation(e.divide_monomial(m)));
            for (const auto& [v, k] : m.powers())
                r.nonzero.push_back(Poly::variable(v));
            explore(std::move(r));
            return;
        }
        // Univariate equation: branch over its rational roots.
        for (const Poly& e : order) {
            auto vars = e.variables();
            if (vars.size() != 1)
                continue;
            Var v = *vars.begin();
            auto roots = rational_roots(e, v);
            if (!roots)
                continue;
            for (const Rational& r : *roots) {
                SolverState b = s;
                if (apply(b, v, Poly(r), Poly(1)))
                    explore(std::move(b));
            }
            return;
        }
        // Degree-1 parameter with a parametric coefficient: c*v + r = 0.
        for (const Poly& e : order)
            for (Var v : e.variables()) {
                if (e.degree(v) != 1)
                    continue;
                Poly c = e.coefficient_of(v, 1);
                Poly rest = e - c * Poly::variable(v);
                SolverState zero = s;
                if (add_equations(zero, {c, rest}))
                    explore(std::move(zero));
                SolverState solved = s;
                solved.nonzero.push_back(c);
                if (apply(solved, v, -rest, c))
                    explore(std::move(solved));
                return;
            }
        PolySystem residual;
        residual.equations = s.equations;
        std::set<Var> ps;
        for (const Poly& e : s.equations)
            for (Var v : e.variables())
                ps.insert(v);
        residual.parameters.assign(ps.begin(), ps.end());
        report_.residual.push_back(std::move(residual));
    }

    void finish(const SolverState& s)
    {
        std::vector<Var> freeParams;
        for (Var p : sys_.parameters) {
            bool done = std::any_of(s.eliminated.begin(), s.eliminated.end(),
                                    [&](const Elimination& el) { return el.var == p; });
            if (!done)
                freeParams.push_back(p);
        }
        std::size_t combos = freeParams.size() >= 20 ? config_.maxFreeCombinations
                                                     : std::min<std::size_t>(std::size_t{1} << freeParams.size(),
                                                                             config_.maxFreeCombinations);
        for (std::size_t mask = 0; mask < combos && !full(); ++mask) {
            Valuation tau;
            for (std::size_t i = 0; i < freeParams.size(); ++i)
                tau[freeParams[i]] = (i < 64 && ((mask >> i) & 1)) ? 1 : 0;
            auto value = [&](Var p) {
                auto it = tau.find(p);
                return it == tau.end() ? Rational(0) : it->second;
            };
            bool ok = true;
            for (auto it = s.eliminated.rbegin(); it != s.eliminated.rend() && ok; ++it) {
                Rational d = evaluate(it->den, value);
                if (sgn(d) == 0)
                    ok = false;
                else
                    tau[it->var] = evaluate(it->num, value) / d;
            }
            for (const Poly& c : s.nonzero)
                if (ok && sgn(evaluate(c, value)) == 0)
                    ok = false;
            if (!ok || !satisfies(sys_, tau))
                continue;
            for (Var p : sys_.parameters)
                tau.emplace(p, Rational(0));
            if (seen_.insert(tau).second)
                report_.valuations.push_back({tau, freeParams});
        }
    }
};

} // namespace detail

/// Staged solving: linear elimination, then monomial-factor, rational-root and
/// coefficient-case branching. Every returned valuation satisfies `sys` exactly.
inline SolveReport solve_system_report(const PolySystem& sys, const SolverConfig& config = {})
{
    return detail::Solver(sys, config).run();
}

inline std::vector<Valuation> solve_system(const PolySystem& sys, const SolverConfig& config = {})
{
    std::vector<Valuation> out;
    for (auto& v : solve_system_report(sys, config).valuations)
        out.push_back(std::move(v.values));
    return out;
}

} // namespace occinv
