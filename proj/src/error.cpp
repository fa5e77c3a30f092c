#include "reci/error.hpp"

namespace reci {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::Io: return "Io";
        case ErrorKind::MalformedLine: return "MalformedLine";
        case ErrorKind::NonFiniteValue: return "NonFiniteValue";
        case ErrorKind::EmptyFile: return "EmptyFile";
        case ErrorKind::MetaMismatch: return "MetaMismatch";
        case ErrorKind::EmptyCorpus: return "EmptyCorpus";
        case ErrorKind::DegenerateRange: return "DegenerateRange";
        case ErrorKind::TooFewPointsRemain: return "TooFewPointsRemain";
        case ErrorKind::DegenerateSpacing: return "DegenerateSpacing";
        case ErrorKind::ZeroWeight: return "ZeroWeight";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::BothZero: return "BothZero";
        case ErrorKind::NonIntegrable: return "NonIntegrable";
        case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    }
    return "Unknown";
}

ErrorCategory category_of(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument:
            return ErrorCategory::Usage;
        case ErrorKind::SingularSystem:
        case ErrorKind::BothZero:
        case ErrorKind::NonIntegrable:
        case ErrorKind::InsufficientSamples:
            return ErrorCategory::Numerical;
        default:
            return ErrorCategory::Data;
    }
}

Error::Error(ErrorKind kind, const std::string& message, long line)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), line_(line) {}

}  // namespace reci
