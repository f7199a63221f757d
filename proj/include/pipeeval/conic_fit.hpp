#pragma once

#include <pipeeval/geometry.hpp>

#include <span>
#include <string_view>
#include <vector>

namespace pipeeval {

enum class Fitter { Trace, Bookstein, GaussNewton };

std::string_view to_string(Fitter fitter);
/// Accepts "trace", "bookstein", "gauss-newton".
Fitter parse_fitter(std::string_view name);

struct FitResult {
    Conic2D conic;
    EllipseParams params;
    double rms_algebraic_residual = 0.0;
    double rms_geometric_residual = 0.0;
    int iterations = 0;
    bool converged = true;
    /// Geometric RMS after each accepted iteration, starting with the initial
    /// guess. Empty for the linear fitters.
    std::vector<double> rms_history;
};

struct GnSettings {
    int max_iterations = 100;
    double step_tolerance = 1e-12;
    double residual_tolerance = 1e-12;
    double damping_floor = 1e-12;
    /// fit_ellipse starts Gauss-Newton from the Trace fit when set, from
    /// moment_initial_guess otherwise.
    bool warm_start = true;
};

/// Algebraic least squares with lambda1^2 + lambda2^2 = 1 on A's eigenvalues.
FitResult fit_bookstein(std::span<const Point2> points);

/// Algebraic least squares with Trace(A) = 1.
FitResult fit_trace(std::span<const Point2> points);

/// Geometric (orthogonal-distance) fit over center, semi-axes and orientation
/// by Levenberg-damped Gauss-Newton. A run that hits max_iterations is
/// returned with converged = false; a collapsing semi-axis throws.
FitResult fit_gauss_newton(std::span<const Point2> points, const EllipseParams& init,
                           const GnSettings& settings = {});

/// Ellipse with the points' centroid and principal second moments; the
/// starting point for Gauss-Newton when no algebraic warm start is wanted.
EllipseParams moment_initial_guess(std::span<const Point2> points);

FitResult fit_ellipse(std::span<const Point2> points, Fitter fitter, const GnSettings& settings = {});

/// Signed orthogonal distance to the ellipse boundary, negative inside.
double point_to_ellipse_distance(const Point2& p, const EllipseParams& params);

/// Closest boundary point to p, and its parametric angle t in the ellipse's
/// own frame, where the boundary is (a cos t, b sin t).
struct FootPoint {
    Point2 point;
    double parameter = 0.0;
    double signed_distance = 0.0;
};
FootPoint ellipse_foot_point(const Point2& p, const EllipseParams& params);

std::vector<double> algebraic_residuals(std::span<const Point2> points, const Conic2D& conic);

double rms(std::span<const double> values);

}  // namespace pipeeval
