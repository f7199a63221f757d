#pragma once

#include <pipeeval/conic_fit.hpp>
#include <pipeeval/helix.hpp>
#include <pipeeval/line_fit.hpp>
#include <pipeeval/torsion.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pipeeval {

struct EvaluateOptions {
    Fitter fitter = Fitter::Trace;
    /// Number of adjacent sections pooled for each surface-direction line fit.
    std::size_t window = 5;
    /// Required for unlabeled clouds.
    std::size_t expected_sections = 0;
    std::size_t workers = 1;
    /// Interior section indices where one arc ends and the next begins.
    std::vector<std::size_t> arc_breaks;
    GnSettings gauss_newton;
};

struct SectionRecord {
    std::size_t index = 0;
    std::size_t label = 0;
    std::size_t point_count = 0;
    double azimuth_phi = 0.0;
    double centroid_radius = 0.0;
    Point3 centroid;
    Line2D line;
    double theta_x = 0.0;
    double line_rms = 0.0;
    double theta_y_raw = 0.0;
    double theta_y = 0.0;
    bool circle_degenerate = false;
    double rms_algebraic = 0.0;
    double rms_geometric = 0.0;
    int iterations = 0;
    bool converged = true;
    std::optional<double> theta_x_error;
    std::optional<double> theta_y_deviation;
};

struct EvaluationReport {
    std::string schema = "pipeeval.report/1";
    std::string tool_version;
    std::string input_digest;
    Fitter fitter = Fitter::Trace;
    std::size_t window = 5;
    std::vector<SectionRecord> sections;
    std::vector<ArcReport> arcs;
    std::vector<std::string> warnings;

    bool all_converged() const;
};

/// Analysis errors are rethrown with the failing section's label prefixed.
/// When truth is given (matched by section label) the report carries the
/// per-section theta_x error and theta_y deviation.
EvaluationReport evaluate(std::span<const Point3> cloud, std::span<const std::size_t> labels,
                          const EvaluateOptions& options, std::span<const SectionTruth> truth = {});

}  // namespace pipeeval
