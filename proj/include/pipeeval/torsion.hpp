#pragma once

#include <pipeeval/conic_fit.hpp>
#include <pipeeval/geometry.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace pipeeval {

struct TorsionResult {
    /// Major-axis angle from +Z in the ZX plane, (-pi/2, pi/2]. Equal to
    /// fit.params.orientation.
    double theta_y = 0.0;
    Fitter fitter = Fitter::Trace;
    bool circle_degenerate = false;
    std::size_t section_index = 0;
    FitResult fit;
};

/// Un-tilts the canonical section by theta_x about X, projects onto ZX and
/// fits an ellipse there.
TorsionResult observe_torsion(const CanonicalSection& section, double theta_x, Fitter fitter = Fitter::Trace,
                              std::size_t section_index = 0, const GnSettings& settings = {});

/// Points of the canonical section with the surface direction removed,
/// projected as (z, x).
std::vector<Point2> untilted_zx_points(const CanonicalSection& section, double theta_x);

struct TorsionRectification {
    std::vector<double> values;
    /// Indices where two branches were equally close; resolved toward 0.
    std::vector<std::size_t> ambiguous;
};

/// Quarter-turn branch correction: every value is moved by a multiple of
/// pi/2 to the branch nearest its already-rectified neighbour. The anchor
/// element is put on the branch nearest 0 and the series is walked outward
/// from it in both directions.
TorsionRectification rectify_torsion_detailed(std::span<const double> raw, std::size_t anchor = 0);

std::vector<double> rectify_torsion(std::span<const double> raw);

struct TorsionSeries {
    std::vector<TorsionResult> results;
    std::vector<double> rectified;
    double unwrap_jump_threshold = kPi / 4.0;
    std::vector<std::size_t> ambiguous;
};

/// Orders results by section index and rectifies their theta_y values.
TorsionSeries make_torsion_series(std::vector<TorsionResult> results);

/// Rectified observation minus expected, folded into (-pi/2, pi/2].
std::vector<double> torsion_deviation(const TorsionSeries& series, std::span<const double> expected);

}  // namespace pipeeval
