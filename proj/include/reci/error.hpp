#pragma once

#include <stdexcept>
#include <string>

namespace reci {

enum class ErrorKind {
    InvalidArgument,
    Io,
    MalformedLine,
    NonFiniteValue,
    EmptyFile,
    MetaMismatch,
    EmptyCorpus,
    DegenerateRange,
    TooFewPointsRemain,
    DegenerateSpacing,
    ZeroWeight,
    SingularSystem,
    BothZero,
    NonIntegrable,
    InsufficientSamples,
};

/// Coarse grouping used by the CLI to pick an exit code.
enum class ErrorCategory { Usage, Data, Numerical };

const char* to_string(ErrorKind kind) noexcept;
ErrorCategory category_of(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, long line = 0);

    ErrorKind kind() const noexcept { return kind_; }
    ErrorCategory category() const noexcept { return category_of(kind_); }
    /// 1-based line number for parse errors, 0 otherwise.
    long line() const noexcept { return line_; }

private:
    ErrorKind kind_;
    long line_;
};

}  // namespace reci
