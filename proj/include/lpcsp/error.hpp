#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lpcsp {

enum class ErrorCode {
    Usage,
    DegreeExceeded,
    WeightOutOfRange,
    ArityExceeded,
    BadTruthTableLength,
    BadInstance,
    BudgetExceeded,
    Unbounded,
    Infeasible,
    SizeLimit,
    NegativeEntry,
    NotFeasibleForLp3,
    FoldTooLarge,
    ZeroRow,
    NotADistribution,
    InfeasibleSeedSolution,
    ArityMismatch,
    UnseenVariableQuery,
};

std::string_view to_string(ErrorCode code);

/// Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// Budget-style failures (the computation is well-posed but too large).
    bool is_budget() const noexcept {
        return code_ == ErrorCode::BudgetExceeded || code_ == ErrorCode::FoldTooLarge ||
               code_ == ErrorCode::SizeLimit;
    }

private:
    ErrorCode code_;
};

}  // namespace lpcsp
