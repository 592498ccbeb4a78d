#include "miw/error.hpp"

namespace miw {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::DuplicatePoints: return "DuplicatePoints";
    case ErrorKind::OutOfRegion: return "OutOfRegion";
    case ErrorKind::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorKind::NonpositiveDensity: return "NonpositiveDensity";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::NonpositiveDenominator: return "NonpositiveDenominator";
    case ErrorKind::SingularEvaluation: return "SingularEvaluation";
    case ErrorKind::NondifferentiablePoint: return "NondifferentiablePoint";
    case ErrorKind::DensityUnderflow: return "DensityUnderflow";
    case ErrorKind::KernelNotSmooth: return "KernelNotSmooth";
    case ErrorKind::CollisionDetected: return "CollisionDetected";
    case ErrorKind::InvalidLayout: return "InvalidLayout";
    case ErrorKind::SymmetryViolation: return "SymmetryViolation";
    case ErrorKind::EigenFailure: return "EigenFailure";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::MismatchedProblem: return "MismatchedProblem";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
{
}

void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

}  // namespace miw
