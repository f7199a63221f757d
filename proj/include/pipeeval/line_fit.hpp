#pragma once

#include <pipeeval/geometry.hpp>

#include <span>
#include <vector>

namespace pipeeval {

/// a*u + b*v + c = 0 with a^2 + b^2 = 1. In the ZY plane of the evaluation
/// pose u is y and v is z, so the Z axis itself is the line u = 0.
struct Line2D {
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;

    double signed_distance(const Point2& p) const { return a * p.u + b * p.v + c; }
    Line2D flipped() const { return {-a, -b, -c}; }
    /// Unit length normal with a >= 0 (b >= 0 when a == 0).
    Line2D canonical() const;
};

struct DirectionResult {
    Line2D line;
    double theta_x = 0.0;
    double rms_orthogonal_residual = 0.0;
};

/// Orthogonal-distance (total least squares) line: normal is the scatter
/// matrix eigenvector of the smallest eigenvalue, line through the centroid.
Line2D fit_tls_line(std::span<const Point2> points);

/// pi/2 - atan2(-a, b), folded into (-pi/2, pi/2]. Zero for the line u = 0.
double surface_direction_angle(const Line2D& line);

/// The literal pi/2 - atan(-a/b) form, valued in [0, pi]. It lands on the
/// wrong mod-pi branch for half of all directions; rectify_direction repairs it.
double surface_direction_angle_unrectified(const Line2D& line);

/// Picks the branch of raw (mod pi) selected by the sign of a under the
/// canonical normalization; result in (-pi/2, pi/2]. Idempotent and
/// invariant to flipping the line's sign.
double rectify_direction(double raw, const Line2D& line);

/// Fits the line, computes and rectifies theta_x. Throws InterceptNotZero if
/// the line misses the origin by more than 1e-6 of the data scale, which
/// means the section was not canonicalized.
DirectionResult detect_direction(std::span<const Point2> zy_points);

/// ZY-plane projection (u, v) = (y, z) of canonical section points.
std::vector<Point2> project_zy(std::span<const Point3> points);

/// ZX-plane projection (u, v) = (z, x).
std::vector<Point2> project_zx(std::span<const Point3> points);

}  // namespace pipeeval
