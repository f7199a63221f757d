#pragma once

#include <pipeeval/error.hpp>

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace pipeeval {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Folds an angle into (-pi/2, pi/2], the range of a line or ellipse
/// orientation (which is only defined modulo pi).
double fold_half_turn(double angle);

/// Wraps an angle into (-pi, pi].
double wrap_full_turn(double angle);

/// Point in the product frame (X_w, Y_w, Z_w), millimetres.
struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Eigen::Vector3d vec() const { return {x, y, z}; }
    static Point3 from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

    friend bool operator==(const Point3&, const Point3&) = default;
};

/// Point in a 2D coordinate plane. Which plane (ZX, ZY) is carried by context.
struct Point2 {
    double u = 0.0;
    double v = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

/// Proper rigid motion p -> R p + t.
class RigidTransform {
public:
    RigidTransform() = default;
    RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

    static RigidTransform identity() { return {}; }
    static RigidTransform rotation_z(double angle);
    static RigidTransform rotation_x(double angle);
    static RigidTransform rotation_y(double angle);
    static RigidTransform translation(const Eigen::Vector3d& t);

    const Eigen::Matrix3d& rotation() const { return rotation_; }
    const Eigen::Vector3d& translation() const { return translation_; }

    Point3 apply(const Point3& p) const;
    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation_ * p + translation_; }
    std::vector<Point3> apply(std::span<const Point3> points) const;

    RigidTransform inverse() const;

    /// (*this * other)(p) == this->apply(other.apply(p)).
    RigidTransform operator*(const RigidTransform& other) const;

private:
    Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
};

enum class ConicConstraint { Bookstein, Trace, None };

/// Implicit conic F(x) = x^T A x + b^T x + c with symmetric A stored as
/// (a11, a12, a22).
struct Conic2D {
    double a11 = 0.0;
    double a12 = 0.0;
    double a22 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double c = 0.0;
    ConicConstraint constraint = ConicConstraint::None;

    double evaluate(const Point2& p) const {
        return a11 * p.u * p.u + 2.0 * a12 * p.u * p.v + a22 * p.v * p.v + b1 * p.u + b2 * p.v + c;
    }
    double trace() const { return a11 + a22; }
    double determinant() const { return a11 * a22 - a12 * a12; }
    /// lambda1^2 + lambda2^2 == ||A||_F^2.
    double eigen_square_sum() const { return a11 * a11 + 2.0 * a12 * a12 + a22 * a22; }

    /// Rescales all coefficients by a common factor so the given constraint holds.
    Conic2D normalized(ConicConstraint to) const;

    Eigen::Matrix<double, 6, 1> coefficients() const { return {a11, a12, a22, b1, b2, c}; }
    static Conic2D from_coefficients(const Eigen::Matrix<double, 6, 1>& k, ConicConstraint tag);
};

/// Axis ratio tolerance under which an ellipse is treated as a circle.
inline constexpr double kCircleAxisRatioTolerance = 1e-6;

struct EllipseParams {
    Point2 center;
    double semi_major = 1.0;
    double semi_minor = 1.0;
    /// Angle from the plane's first axis to the major axis, in (-pi/2, pi/2].
    double orientation = 0.0;

    bool is_circle() const { return semi_minor >= semi_major * (1.0 - kCircleAxisRatioTolerance); }
    bool orientation_defined() const { return !is_circle(); }
    bool valid() const;
};

/// Raised when a conic is not a real ellipse; keeps the offending conic.
class NotAnEllipseError : public Error {
public:
    NotAnEllipseError(const Conic2D& conic, const std::string& message)
        : Error(ErrorCode::NotAnEllipse, message), conic_(conic) {}
    const Conic2D& conic() const noexcept { return conic_; }

private:
    Conic2D conic_;
};

/// Throws NotAnEllipseError for det(A) <= 0 or an imaginary ellipse. Circles get
/// orientation 0.
EllipseParams conic_to_params(const Conic2D& conic);

Conic2D params_to_conic(const EllipseParams& params, ConicConstraint constraint);

/// A cross-section moved to the evaluation pose: rotated about Z_w by
/// -azimuth_phi so its centroid sits on +X_w, then translated so the centroid
/// is the origin.
struct CanonicalSection {
    std::vector<Point3> points_canonical;
    RigidTransform to_canonical;
    double azimuth_phi = 0.0;
    double centroid_radius = 0.0;
    Point3 centroid_world;
};

Point3 centroid(std::span<const Point3> points);

/// Needs at least kMinSectionPoints points, not all collinear.
CanonicalSection canonicalize_section(std::span<const Point3> points);

inline constexpr std::size_t kMinSectionPoints = 6;

/// Largest pairwise distance (O(n^2)); used for scale-relative tolerances.
double diameter(std::span<const Point3> points);

}  // namespace pipeeval
