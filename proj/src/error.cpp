#include <pipeeval/error.hpp>

namespace pipeeval {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::DegenerateSection: return "DegenerateSection";
        case ErrorCode::NotAnEllipse: return "NotAnEllipse";
        case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
        case ErrorCode::CollapsedAxis: return "CollapsedAxis";
        case ErrorCode::IsotropicScatter: return "IsotropicScatter";
        case ErrorCode::InterceptNotZero: return "InterceptNotZero";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::EmptyCloud: return "EmptyCloud";
        case ErrorCode::UnderfilledSection: return "UnderfilledSection";
        case ErrorCode::TooFewSections: return "TooFewSections";
        case ErrorCode::NonMonotoneAzimuth: return "NonMonotoneAzimuth";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::InvalidSweep: return "InvalidSweep";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

bool Error::is_input_error() const noexcept {
    switch (code_) {
        case ErrorCode::EmptyCloud:
        case ErrorCode::UnderfilledSection:
        case ErrorCode::InvalidSpec:
        case ErrorCode::InvalidSweep:
        case ErrorCode::ParseError:
        case ErrorCode::IoError:
        case ErrorCode::EmptyInput:
            return true;
        default:
            return false;
    }
}

}  // namespace pipeeval
