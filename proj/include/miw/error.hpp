#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace miw {

enum class ErrorKind {
    DuplicatePoints,
    OutOfRegion,
    EmptyEnsemble,
    NonpositiveDensity,
    ZeroDenominator,
    NonpositiveDenominator,
    SingularEvaluation,
    NondifferentiablePoint,
    DensityUnderflow,
    KernelNotSmooth,
    CollisionDetected,
    InvalidLayout,
    SymmetryViolation,
    EigenFailure,
    IndexOutOfRange,
    ConfigError,
    MismatchedProblem,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (the
/// relaxation loop, the CLI) can map it to a termination status or exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace miw
