#pragma once

#include <cctype>
#include <compare>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "occinv/error.hpp"

namespace occinv {

enum class VarKind { Program, Parameter };

/// Interned indeterminate. Ids follow registration order, which fixes the
/// global monomial order: program variables are registered in declaration
/// order before any template parameter is created.
struct Var {
    std::uint32_t id = 0;
    auto operator<=>(const Var&) const = default;
};

class Symbols {
public:
    static Symbols& instance()
    {
        static Symbols symbols;
        return symbols;
    }

    Var intern(const std::string& name, VarKind kind)
    {
        std::scoped_lock lock(mutex_);
        if (auto it = byName_.find(name); it != byName_.end()) {
            if (entries_[it->second].kind != kind)
                throw Error(ErrorKind::InvalidArgument,
                            "indeterminate '" + name + "' used both as program variable and parameter");
            return Var{it->second};
        }
        auto id = static_cast<std::uint32_t>(entries_.size());
        entries_.push_back({name, kind});
        byName_.emplace(name, id);
        return Var{id};
    }

    std::optional<Var> lookup(const std::string& name) const
    {
        std::scoped_lock lock(mutex_);
        if (auto it = byName_.find(name); it != byName_.end())
            return Var{it->second};
        return std::nullopt;
    }

    const std::string& name(Var v) const
    {
        std::scoped_lock lock(mutex_);
        return entries_.at(v.id).name;
    }

    VarKind kind(Var v) const
    {
        std::scoped_lock lock(mutex_);
        return entries_.at(v.id).kind;
    }

private:
    struct Entry {
        std::string name;
        VarKind kind;
    };

    Symbols() = default;

    mutable std::mutex mutex_;
    std::deque<Entry> entries_; // deque: references returned by name() stay valid
    std::unordered_map<std::string, std::uint32_t> byName_;
};

inline Var program_var(const std::string& name) { return Symbols::instance().intern(name, VarKind::Program); }
inline Var parameter(const std::string& name) { return Symbols::instance().intern(name, VarKind::Parameter); }
inline const std::string& var_name(Var v) { return Symbols::instance().name(v); }
inline bool is_parameter(Var v) { return Symbols::instance().kind(v) == VarKind::Parameter; }

/// Indeterminate of a program variable: `x` is encoded by `X`.
inline std::string indeterminate_name(const std::string& programVariable)
{
    std::string out = programVariable;
    for (auto& ch : out)
        ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return out;
}

inline Var indeterminate_of(const std::string& programVariable)
{
    return program_var(indeterminate_name(programVariable));
}

} // namespace occinv
