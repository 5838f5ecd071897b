#pragma once

#include <stdexcept>
#include <string>

namespace latnaf {

enum class ErrorKind {
    DegreeUnsupported,
    RootsNotEquimodular,
    NormNotInteger,
    InvalidBase,
    DegenerateLattice,
    ExistenceConditionViolated,
    CardinalityMismatch,
    DivisibleByTau,
    NonTermination,
    BudgetExceeded,
    RegionUnbounded,
    IoFailure,
    UsageError,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// CLI exit-code convention: 1 usage, 2 budget, 3 violated invariant.
inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::UsageError: return 1;
        case ErrorKind::BudgetExceeded: return 2;
        default: return 3;
    }
}

inline const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DegreeUnsupported: return "DegreeUnsupported";
        case ErrorKind::RootsNotEquimodular: return "RootsNotEquimodular";
        case ErrorKind::NormNotInteger: return "NormNotInteger";
        case ErrorKind::InvalidBase: return "InvalidBase";
        case ErrorKind::DegenerateLattice: return "DegenerateLattice";
        case ErrorKind::ExistenceConditionViolated: return "ExistenceConditionViolated";
        case ErrorKind::CardinalityMismatch: return "CardinalityMismatch";
        case ErrorKind::DivisibleByTau: return "DivisibleByTau";
        case ErrorKind::NonTermination: return "NonTermination";
        case ErrorKind::BudgetExceeded: return "BudgetExceeded";
        case ErrorKind::RegionUnbounded: return "RegionUnbounded";
        case ErrorKind::IoFailure: return "IoFailure";
        case ErrorKind::UsageError: return "UsageError";
    }
    return "Unknown";
}

}  // namespace latnaf
