#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace occinv {

enum class ErrorKind {
    InvalidDenominator,
    UnknownSign,
    SyntaxError,
    UndeclaredVariable,
    InvalidProbability,
    UnsupportedExpression,
    UnsupportedModFilter,
    DivergentMarginalization,
    NestedLoop,
    ConstantTermNonzero,
    SolverBudgetExceeded,
    Timeout,
    SingularSystem,
    Diverges,
    InvalidArgument,
};

inline const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidDenominator: return "InvalidDenominator";
    case ErrorKind::UnknownSign: return "UnknownSign";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UndeclaredVariable: return "UndeclaredVariable";
    case ErrorKind::InvalidProbability: return "InvalidProbability";
    case ErrorKind::UnsupportedExpression: return "UnsupportedExpression";
    case ErrorKind::UnsupportedModFilter: return "UnsupportedModFilter";
    case ErrorKind::DivergentMarginalization: return "DivergentMarginalization";
    case ErrorKind::NestedLoop: return "NestedLoop";
    case ErrorKind::ConstantTermNonzero: return "ConstantTermNonzero";
    case ErrorKind::SolverBudgetExceeded: return "SolverBudgetExceeded";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::Diverges: return "Diverges";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    /// Message without the kind prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

/// Positioned parse failure; line and column are 1-based.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t line, std::size_t col, const std::string& expected)
        : Error(ErrorKind::SyntaxError,
                std::to_string(line) + ":" + std::to_string(col) + ": expected " + expected),
          line_(line), col_(col), expected_(expected)
    {
    }

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return col_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t line_;
    std::size_t col_;
    std::string expected_;
};

} // namespace occinv
