#pragma once

#include <pipeeval/geometry.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace pipeeval {

/// Injected surface twist per section: constant + rate * i, plus an extra
/// amount over an inclusive window of sections. A custom function, when
/// set, replaces all of it.
struct TwistProfile {
    double constant = 0.0;
    double rate_per_section = 0.0;
    double defect_amount = 0.0;
    std::size_t defect_first = 0;
    std::size_t defect_last = 0;
    std::function<double(std::size_t)> custom;

    bool has_defect() const { return defect_amount != 0.0; }
    double operator()(std::size_t section) const;
};

/// Elliptical pipe bent into a helix about Z_w, sampled as cross-sections.
struct HelixSpec {
    double radius = 120.0;
    double pitch_per_turn = 60.0;
    double semi_major = 12.0;
    double semi_minor = 8.0;
    /// Design surface direction theta_x of every section.
    double helix_angle = 0.0;
    TwistProfile twist_profile;
    /// Total central angle from the first to the last section.
    double extent = kHalfPi;
    double start_azimuth = 0.0;
    double start_height = 0.0;
    std::size_t sections = 40;
    std::size_t points_per_section = 64;
    double noise_sigma = 0.0;
    std::uint64_t rng_seed = 42;

    /// Throws InvalidSpec naming the first offending field.
    void validate() const;
};

struct SectionTruth {
    std::size_t section = 0;
    double phi = 0.0;
    double theta_x = 0.0;
    double theta_y = 0.0;
    Point3 center;
};

struct GeneratedCloud {
    std::vector<Point3> points;
    std::vector<std::size_t> labels;
    std::vector<SectionTruth> truth;
};

/// Deterministic for a given spec (including rng_seed).
GeneratedCloud generate(const HelixSpec& spec);

/// Boundary samples of one section ellipse in the evaluation pose (minor
/// axis along X, major along Z before twist and tilt), before noise.
std::vector<Point3> section_ellipse_canonical(double semi_major, double semi_minor, double theta_x, double theta_y,
                                              std::size_t count, double phase);

struct Segmentation {
    std::vector<std::vector<Point3>> sections;
    /// Input label of each section, or its ordinal for unlabeled input.
    std::vector<std::size_t> labels;
};

/// Groups by label when labels are given (ascending label order); otherwise
/// splits the cloud into expected_sections contiguous azimuth bins at the
/// widest azimuth gaps.
Segmentation segment_sections(std::span<const Point3> cloud, std::span<const std::size_t> labels,
                              std::size_t expected_sections);

struct ArcGeometry {
    double radius = 0.0;
    double central_angle = 0.0;
    /// radius * central_angle: the arc about Z_w.
    double arc_length = 0.0;
    /// sqrt(radius^2 + p^2) * central_angle, p the rise per radian.
    double helical_arc_length = 0.0;
    double pitch_per_turn = 0.0;
};

/// Arc radius, central angle and lengths from per-section centroids.
/// Azimuth must progress monotonically (no back-bending).
ArcGeometry arc_parameters(std::span<const CanonicalSection> sections);

struct SectionResiduals {
    double line_rms = 0.0;
    double ellipse_rms_algebraic = 0.0;
    double ellipse_rms_geometric = 0.0;
};

struct ArcReport {
    std::size_t first_section = 0;
    std::size_t last_section = 0;
    ArcGeometry geometry;
    std::vector<double> theta_x;
    std::vector<double> theta_y;
    std::vector<SectionResiduals> residuals;
};

}  // namespace pipeeval
