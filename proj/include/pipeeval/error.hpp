#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pipeeval {

enum class ErrorCode {
    EmptyInput,
    TooFewPoints,
    DegenerateSection,
    NotAnEllipse,
    DegenerateConfiguration,
    CollapsedAxis,
    IsotropicScatter,
    InterceptNotZero,
    LengthMismatch,
    EmptyCloud,
    UnderfilledSection,
    TooFewSections,
    NonMonotoneAzimuth,
    InvalidSpec,
    InvalidSweep,
    ParseError,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Base error for every failure raised by the library. The code is the
/// machine-readable part; what() carries the human diagnostic.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

    ErrorCode code() const noexcept { return code_; }
    /// The message without the code prefix.
    const std::string& detail() const noexcept { return detail_; }

    /// True for malformed or unusable input (files, specs, flags) as opposed
    /// to a failure inside the numerical analysis.
    bool is_input_error() const noexcept;

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace pipeeval
