#pragma once

#include <pipeeval/pipeline.hpp>

#include <string>
#include <string_view>

namespace pipeeval {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// JSON document, two-space indent, keys in fixed order. Angles appear in
/// radians and again in degrees; the degree fields are derived and ignored
/// on parse.
std::string serialize_report(const EvaluationReport& report);
EvaluationReport parse_report(std::string_view text);

/// Per-section table with unit-suffixed headers.
std::string sections_csv(const EvaluationReport& report);
std::string arcs_csv(const EvaluationReport& report);

}  // namespace pipeeval
