#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "occinv/algebra/closed_form.hpp"
#include "occinv/algebra/expr_parser.hpp"

namespace occinv {

/// Finite big-step chain. States with outgoing transitions are guard states
/// (one more loop iteration); states without transitions are terminal.
struct FiniteChain {
    std::vector<std::string> states;
    std::map<std::string, std::map<std::string, Rational>> transitions;
    std::map<std::string, Rational> initial;

    bool is_guard(const std::string& s) const { return transitions.count(s) > 0; }

    void add_state(const std::string& s)
    {
        if (std::find(states.begin(), states.end(), s) == states.end())
            states.push_back(s);
    }

    void validate() const
    {
        for (const auto& [s, row] : transitions) {
            Rational sum = 0;
            for (const auto& [t, p] : row) {
                if (sgn(p) <= 0 || p > 1)
                    throw Error(ErrorKind::InvalidProbability, "transition " + s + " -> " + t + " has probability "
                                                                   + p.get_str());
                sum += p;
            }
            if (sum != 1)
                throw Error(ErrorKind::InvalidProbability, "row of state " + s + " sums to " + sum.get_str());
        }
        for (const auto& [s, w] : initial)
            if (sgn(w) < 0)
                throw Error(ErrorKind::InvalidProbability, "negative initial mass at " + s);
    }
};

namespace detail {

inline Rational parse_chain_rational(const std::string& text, std::size_t line)
{
    try {
        RationalClosedForm f = parse_closed_form(text);
        if (!f.num().is_constant() || f.den() != Poly(1))
            throw Error(ErrorKind::SyntaxError, "");
        return f.num().constant_term();
    } catch (const Error&) {
        throw SyntaxError(line, 1, "a rational number, found '" + text + "'");
    }
}

} // namespace detail

/// Text format: `src dst prob` per transition, `init state mass` per initial
/// entry, `state name` to declare an isolated state, `#` comments.
inline FiniteChain parse_chain(const std::string& text)
{
    FiniteChain c;
    std::istringstream in(text);
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.resize(hash);
        std::istringstream ls(line);
        std::vector<std::string> words;
        for (std::string w; ls >> w;)
            words.push_back(w);
        if (words.empty())
            continue;
        if (words[0] == "init" && words.size() == 3) {
            c.add_state(words[1]);
            c.initial[words[1]] += detail::parse_chain_rational(words[2], lineNo);
        } else if (words[0] == "state" && words.size() == 2) {
            c.add_state(words[1]);
        } else if (words.size() == 3) {
            c.add_state(words[0]);
            c.add_state(words[1]);
            c.transitions[words[0]][words[1]] += detail::parse_chain_rational(words[2], lineNo);
        } else {
            throw SyntaxError(lineNo, 1, "'src dst prob' or 'init state mass'");
        }
    }
    c.validate();
    return c;
}

inline std::string to_text(const FiniteChain& c)
{
    std::ostringstream out;
    for (const auto& s : c.states)
        if (auto it = c.transitions.find(s); it != c.transitions.end())
            for (const auto& t : c.states)
                if (auto p = it->second.find(t); p != it->second.end())
                    out << s << " " << t << " " << p->second.get_str() << "\n";
    for (const auto& s : c.states)
        if (auto it = c.initial.find(s); it != c.initial.end())
            out << "init " << s << " " << it->second.get_str() << "\n";
    return out.str();
}

using ChainMeasure = std::map<std::string, ExtendedMass>;

namespace detail {

/// Reachable guard states in a closed communicating class: visited infinitely often.
inline std::set<std::string> recurrent_guard_states(const FiniteChain& c)
{
    auto reach = [&](const std::string& from) {
        std::set<std::string> seen{from};
        std::vector<std::string> stack{from};
        while (!stack.empty()) {
            std::string s = stack.back();
            stack.pop_back();
            auto it = c.transitions.find(s);
            if (it == c.transitions.end())
                continue;
            for (const auto& [t, p] : it->second)
                if (seen.insert(t).second)
                    stack.push_back(t);
        }
        return seen;
    };
    std::set<std::string> reachable;
    for (const auto& [s, w] : c.initial)
        if (sgn(w) > 0)
            for (const auto& t : reach(s))
                reachable.insert(t);
    std::set<std::string> out;
    for (const auto& s : reachable) {
        if (!c.is_guard(s))
            continue;
        auto fromS = reach(s);
        // s lies in a closed class iff every state it reaches can reach it back
        bool closed = std::all_of(fromS.begin(), fromS.end(), [&](const std::string& t) { return reach(t).count(s) > 0; });
        if (closed)
            out.insert(s);
    }
    return out;
}

/// Solves (I - A) x = b exactly; throws SingularSystem.
inline std::vector<Rational> solve_linear(std::vector<std::vector<Rational>> a, std::vector<Rational> b)
{
    std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && sgn(a[piv][col]) == 0)
            ++piv;
        if (piv == n)
            throw Error(ErrorKind::SingularSystem, "occupation system is singular");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || sgn(a[r][col]) == 0)
                continue;
            Rational f = a[r][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k)
                a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    std::vector<Rational> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = b[i] / a[i][i];
    return x;
}

} // namespace detail

/// Expected visits o = iota + P^T o on guard states, solved exactly; terminal
/// states receive their hitting mass. Reachable states of closed guard classes
/// get Infinite.
inline ChainMeasure chain_occupation(const FiniteChain& c)
{
    c.validate();
    auto infinite = detail::recurrent_guard_states(c);
    std::vector<std::string> finite;
    for (const auto& s : c.states)
        if (c.is_guard(s) && !infinite.count(s))
            finite.push_back(s);
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < finite.size(); ++i)
        idx[finite[i]] = i;
    std::size_t n = finite.size();
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n, Rational(0)));
    std::vector<Rational> b(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
        a[i][i] = 1;
        auto it = c.initial.find(finite[i]);
        if (it != c.initial.end())
            b[i] = it->second;
    }
    for (const auto& s : finite)
        for (const auto& [t, p] : c.transitions.at(s))
            if (auto j = idx.find(t); j != idx.end())
                a[j->second][idx[s]] -= p;
    std::vector<Rational> x = detail::solve_linear(std::move(a), std::move(b));

    ChainMeasure out;
    for (const auto& s : c.states) {
        if (infinite.count(s)) {
            out[s] = ExtendedMass::infinite();
        } else if (c.is_guard(s)) {
            out[s] = ExtendedMass::finite(x[idx[s]]);
        } else {
            Rational hit = 0;
            if (auto it = c.initial.find(s); it != c.initial.end())
                hit = it->second;
            for (const auto& src : finite)
                if (auto p = c.transitions.at(src).find(s); p != c.transitions.at(src).end())
                    hit += x[idx[src]] * p->second;
            out[s] = ExtendedMass::finite(hit);
        }
    }
    return out;
}

/// Power-iteration partial sums in double precision.
inline std::map<std::string, double> chain_occupation_iterative(const FiniteChain& c, std::size_t steps = 10000)
{
    std::map<std::string, double> cur;
    std::map<std::string, double> total;
    for (const auto& s : c.states)
        total[s] = 0.0;
    for (const auto& [s, w] : c.initial)
        cur[s] = w.get_d();
    for (std::size_t k = 0; k < steps && !cur.empty(); ++k) {
        std::map<std::string, double> next;
        for (const auto& [s, w] : cur) {
            total[s] += w;
            auto it = c.transitions.find(s);
            if (it == c.transitions.end())
                continue;
            for (const auto& [t, p] : it->second)
                next[t] += w * p.get_d();
        }
        cur = std::move(next);
    }
    return total;
}

struct ContractionResult {
    Rational c;
    std::map<std::string, Rational> invariant; // least c-contraction invariant nu
    std::map<std::string, Rational> bound;     // [not guard] nu / (1 - c)
    std::size_t iterations = 0;
};

/// Least nu >= mu with P_guard^T nu <= c nu, by the monotone iteration
/// nu <- max(mu, P_guard^T nu / c). Every few rounds the current max-policy is
/// solved exactly to jump to the fixpoint. Throws Diverges when nu grows past
/// any plausible bound.
inline ContractionResult best_contraction_bound(const FiniteChain& chain, const Rational& c,
                                                std::size_t maxIterations = 2000)
{
    if (sgn(c) <= 0 || c >= 1)
        throw Error(ErrorKind::InvalidArgument, "contraction factor must lie in (0,1)");
    chain.validate();
    const auto& st = chain.states;
    std::size_t n = st.size();
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
        idx[st[i]] = i;
    std::vector<Rational> mu(n, Rational(0));
    for (const auto& [s, w] : chain.initial)
        mu[idx[s]] = w;
    // a[t][s] = P(s,t)/c for guard states s
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n, Rational(0)));
    for (const auto& [s, row] : chain.transitions)
        for (const auto& [t, p] : row)
            a[idx[t]][idx[s]] += p / c;
    auto apply = [&](const std::vector<Rational>& nu) {
        std::vector<Rational> out(n, Rational(0));
        for (std::size_t t = 0; t < n; ++t)
            for (std::size_t s = 0; s < n; ++s)
                if (sgn(a[t][s]) != 0)
                    out[t] += a[t][s] * nu[s];
        return out;
    };
    auto step = [&](const std::vector<Rational>& nu) {
        auto pushed = apply(nu);
        for (std::size_t t = 0; t < n; ++t)
            pushed[t] = std::max(pushed[t], mu[t]);
        return pushed;
    };
    Rational total = 1;
    for (const Rational& m : mu)
        total += m;
    Rational limit = total * 1000000;

    ContractionResult r;
    r.c = c;
    std::vector<Rational> nu = mu;
    std::optional<std::vector<Rational>> fix;
    for (r.iterations = 1; r.iterations <= maxIterations && !fix; ++r.iterations) {
        auto next = step(nu);
        if (next == nu) {
            fix = nu;
            break;
        }
        nu = std::move(next);
        for (const Rational& v : nu)
            if (v > limit)
                throw Error(ErrorKind::Diverges, "no finite " + c.get_str() + "-contraction invariant exists");
        if (r.iterations % 16 != 0)
            continue;
        // policy: states whose value comes from the pushed mass
        auto pushed = apply(nu);
        std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n, Rational(0)));
        std::vector<Rational> rhs(n, Rational(0));
        for (std::size_t t = 0; t < n; ++t) {
            if (pushed[t] > mu[t]) {
                for (std::size_t s = 0; s < n; ++s)
                    m[t][s] = -a[t][s];
                m[t][t] += 1;
            } else {
                m[t][t] = 1;
                rhs[t] = mu[t];
            }
        }
        try {
            auto cand = detail::solve_linear(m, rhs);
            bool above = true;
            for (std::size_t i = 0; i < n; ++i)
                above = above && cand[i] >= nu[i];
            if (above && step(cand) == cand)
                fix = cand;
        } catch (const Error&) {
        }
    }
    if (!fix)
        throw Error(ErrorKind::Diverges, "contraction iteration did not stabilise for c = " + c.get_str());
    for (std::size_t i = 0; i < n; ++i) {
        r.invariant[st[i]] = (*fix)[i];
        r.bound[st[i]] = chain.is_guard(st[i]) ? Rational(0) : (*fix)[i] / (1 - c);
    }
    return r;
}

/// mu + P_guard^T nu <= nu: nu is an occupation superinvariant of the chain.
inline bool is_occupation_superinvariant(const FiniteChain& chain, const std::map<std::string, Rational>& nu)
{
    std::map<std::string, Rational> rhs;
    for (const auto& [s, w] : chain.initial)
        rhs[s] += w;
    for (const auto& [s, row] : chain.transitions)
        for (const auto& [t, p] : row)
            rhs[t] += (nu.count(s) ? nu.at(s) : Rational(0)) * p;
    for (const auto& s : chain.states)
        if (rhs[s] > (nu.count(s) ? nu.at(s) : Rational(0)))
            return false;
    return true;
}

} // namespace occinv
