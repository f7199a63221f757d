#include <pipeeval/geometry.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace pipeeval {

double fold_half_turn(double angle) {
    double folded = angle - kPi * std::ceil((angle - kHalfPi) / kPi);
    if (folded <= -kHalfPi) folded += kPi;
    if (folded > kHalfPi) folded -= kPi;
    return folded;
}

double wrap_full_turn(double angle) {
    double wrapped = angle - 2.0 * kPi * std::ceil((angle - kPi) / (2.0 * kPi));
    if (wrapped <= -kPi) wrapped += 2.0 * kPi;
    if (wrapped > kPi) wrapped -= 2.0 * kPi;
    return wrapped;
}

// --- RigidTransform ---------------------------------------------------------

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
    const double orthogonality = (rotation_ * rotation_.transpose() - Eigen::Matrix3d::Identity()).norm();
    if (orthogonality > 1e-10 || std::abs(rotation_.determinant() - 1.0) > 1e-10) {
        throw Error(ErrorCode::InvalidSpec, "rotation matrix is not a proper rotation");
    }
}

RigidTransform RigidTransform::rotation_z(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Eigen::Matrix3d r;
    r << c, -s, 0, s, c, 0, 0, 0, 1;
    return {r, Eigen::Vector3d::Zero()};
}

RigidTransform RigidTransform::rotation_x(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Eigen::Matrix3d r;
    r << 1, 0, 0, 0, c, -s, 0, s, c;
    return {r, Eigen::Vector3d::Zero()};
}

RigidTransform RigidTransform::rotation_y(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Eigen::Matrix3d r;
    r << c, 0, s, 0, 1, 0, -s, 0, c;
    return {r, Eigen::Vector3d::Zero()};
}

RigidTransform RigidTransform::translation(const Eigen::Vector3d& t) {
    return {Eigen::Matrix3d::Identity(), t};
}

Point3 RigidTransform::apply(const Point3& p) const { return Point3::from(apply(p.vec())); }

std::vector<Point3> RigidTransform::apply(std::span<const Point3> points) const {
    std::vector<Point3> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(apply(p));
    return out;
}

RigidTransform RigidTransform::inverse() const {
    RigidTransform inv;
    inv.rotation_ = rotation_.transpose();
    inv.translation_ = -(inv.rotation_ * translation_);
    return inv;
}

RigidTransform RigidTransform::operator*(const RigidTransform& other) const {
    RigidTransform out;
    out.rotation_ = rotation_ * other.rotation_;
    out.translation_ = rotation_ * other.translation_ + translation_;
    return out;
}

// --- Conics -----------------------------------------------------------------

Conic2D Conic2D::normalized(ConicConstraint to) const {
    double scale = 1.0;
    switch (to) {
        case ConicConstraint::Trace: {
            const double t = trace();
            if (t == 0.0 || !std::isfinite(t)) {
                throw Error(ErrorCode::DegenerateConfiguration, "conic has zero trace; cannot normalize to Trace(A)=1");
            }
            scale = 1.0 / t;
            break;
        }
        case ConicConstraint::Bookstein: {
            const double n = std::sqrt(eigen_square_sum());
            if (n == 0.0 || !std::isfinite(n)) {
                throw Error(ErrorCode::DegenerateConfiguration, "conic has zero quadratic part");
            }
            // Sign chosen so that an ellipse comes out positive definite.
            scale = (trace() < 0.0 ? -1.0 : 1.0) / n;
            break;
        }
        case ConicConstraint::None:
            break;
    }
    Conic2D out = from_coefficients(coefficients() * scale, to);
    return out;
}

Conic2D Conic2D::from_coefficients(const Eigen::Matrix<double, 6, 1>& k, ConicConstraint tag) {
    return Conic2D{k[0], k[1], k[2], k[3], k[4], k[5], tag};
}

bool EllipseParams::valid() const {
    return std::isfinite(center.u) && std::isfinite(center.v) && std::isfinite(orientation) &&
           semi_minor > 0.0 && semi_major >= semi_minor && orientation > -kHalfPi && orientation <= kHalfPi;
}

EllipseParams conic_to_params(const Conic2D& input) {
    Conic2D conic = input;
    if (conic.trace() < 0.0) {
        conic = Conic2D::from_coefficients(-conic.coefficients(), conic.constraint);
    }
    const double det = conic.determinant();
    if (!(det > 0.0)) {
        throw NotAnEllipseError(input, "det(A) <= 0 (hyperbola or parabola)");
    }

    EllipseParams params;
    params.center.u = -(conic.a22 * conic.b1 - conic.a12 * conic.b2) / (2.0 * det);
    params.center.v = -(conic.a11 * conic.b2 - conic.a12 * conic.b1) / (2.0 * det);
    const double at_center = conic.c + 0.5 * (conic.b1 * params.center.u + conic.b2 * params.center.v);
    if (!(at_center < 0.0)) {
        throw NotAnEllipseError(input, "imaginary ellipse (conic does not change sign)");
    }

    const double mean = 0.5 * (conic.a11 + conic.a22);
    const double radius = std::hypot(0.5 * (conic.a11 - conic.a22), conic.a12);
    const double lambda_max = mean + radius;
    const double lambda_min = det / lambda_max;
    params.semi_major = std::sqrt(-at_center / lambda_min);
    params.semi_minor = std::sqrt(-at_center / lambda_max);
    // Major axis follows the eigenvector of the smaller eigenvalue.
    params.orientation = fold_half_turn(0.5 * std::atan2(-2.0 * conic.a12, conic.a22 - conic.a11));
    if (params.is_circle()) params.orientation = 0.0;
    return params;
}

Conic2D params_to_conic(const EllipseParams& params, ConicConstraint constraint) {
    const double c = std::cos(params.orientation), s = std::sin(params.orientation);
    const double p = 1.0 / (params.semi_major * params.semi_major);
    const double q = 1.0 / (params.semi_minor * params.semi_minor);
    Conic2D conic;
    conic.a11 = p * c * c + q * s * s;
    conic.a22 = p * s * s + q * c * c;
    conic.a12 = (p - q) * c * s;
    const double u0 = params.center.u, v0 = params.center.v;
    conic.b1 = -2.0 * (conic.a11 * u0 + conic.a12 * v0);
    conic.b2 = -2.0 * (conic.a12 * u0 + conic.a22 * v0);
    conic.c = conic.a11 * u0 * u0 + 2.0 * conic.a12 * u0 * v0 + conic.a22 * v0 * v0 - 1.0;
    return conic.normalized(constraint);
}

// --- Sections ---------------------------------------------------------------

Point3 centroid(std::span<const Point3> points) {
    if (points.empty()) throw Error(ErrorCode::EmptyInput, "centroid of an empty point set");
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (const auto& p : points) sum += p.vec();
    return Point3::from(sum / static_cast<double>(points.size()));
}

double diameter(std::span<const Point3> points) {
    double best = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            best = std::max(best, (points[i].vec() - points[j].vec()).squaredNorm());
        }
    }
    return std::sqrt(best);
}

CanonicalSection canonicalize_section(std::span<const Point3> points) {
    if (points.size() < kMinSectionPoints) {
        throw Error(ErrorCode::TooFewPoints, "a section needs at least 6 points, got " + std::to_string(points.size()));
    }
    const Point3 c = centroid(points);
    const Eigen::Vector3d cv = c.vec();

    Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
    for (const auto& p : points) {
        const Eigen::Vector3d d = p.vec() - cv;
        scatter += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(scatter, Eigen::EigenvaluesOnly);
    const Eigen::Vector3d ev = eig.eigenvalues();
    if (!(ev[1] > 1e-14 * ev[2])) {
        throw Error(ErrorCode::DegenerateSection, "section points are collinear");
    }

    const double radius = std::hypot(c.x, c.y);
    const double scale = std::sqrt(ev[2] / static_cast<double>(points.size()));
    if (!(radius > 1e-12 * std::max(1.0, scale))) {
        throw Error(ErrorCode::DegenerateSection, "section centroid lies on the Z_w axis; azimuth undefined");
    }

    CanonicalSection out;
    out.azimuth_phi = std::atan2(c.y, c.x);
    out.centroid_radius = radius;
    out.centroid_world = c;
    const RigidTransform rot = RigidTransform::rotation_z(-out.azimuth_phi);
    out.to_canonical = RigidTransform(rot.rotation(), -(rot.rotation() * cv));
    out.points_canonical.reserve(points.size());
    // Subtract first, then rotate: keeps the canonical centroid at rounding level.
    for (const auto& p : points) {
        out.points_canonical.push_back(Point3::from(rot.rotation() * (p.vec() - cv)));
    }
    return out;
}

}  // namespace pipeeval
