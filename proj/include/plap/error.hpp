#pragma once

#include <stdexcept>
#include <string>

namespace plap {

enum class ErrorKind {
    InvalidDomain,
    InvalidArgument,
    GridMismatch,
    BudgetExceeded,
    Divergence,
    HypothesisViolation,
    IterateEscape,
    ParseError,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidDomain: return "invalid-domain";
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::GridMismatch: return "grid-mismatch";
        case ErrorKind::BudgetExceeded: return "budget-exceeded";
        case ErrorKind::Divergence: return "divergence";
        case ErrorKind::HypothesisViolation: return "hypothesis-violation";
        case ErrorKind::IterateEscape: return "iterate-escape";
        case ErrorKind::ParseError: return "parse-error";
    }
    return "unknown";
}

/// Single exception type for the library; `kind()` lets callers map failures
/// to exit codes without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace plap
