#include <pipeeval/line_fit.hpp>

#include <cmath>

namespace pipeeval {

Line2D Line2D::canonical() const {
    const double norm = std::hypot(a, b);
    Line2D out{a / norm, b / norm, c / norm};
    if (out.a < 0.0 || (out.a == 0.0 && out.b < 0.0)) out = out.flipped();
    return out;
}

Line2D fit_tls_line(std::span<const Point2> points) {
    if (points.size() < 2) {
        throw Error(ErrorCode::TooFewPoints, "line fit needs at least 2 points");
    }
    double mu = 0.0, mv = 0.0;
    for (const auto& p : points) {
        mu += p.u;
        mv += p.v;
    }
    const double n = static_cast<double>(points.size());
    mu /= n;
    mv /= n;
    double suu = 0.0, suv = 0.0, svv = 0.0;
    for (const auto& p : points) {
        const double du = p.u - mu, dv = p.v - mv;
        suu += du * du;
        suv += du * dv;
        svv += dv * dv;
    }
    const double half_gap = std::hypot(0.5 * (suu - svv), suv);
    const double mean = 0.5 * (suu + svv);
    if (!(mean > 0.0)) {
        throw Error(ErrorCode::TooFewPoints, "line fit needs at least 2 distinct points");
    }
    if (half_gap <= 1e-12 * mean) {
        throw Error(ErrorCode::IsotropicScatter, "scatter is isotropic; line direction undefined");
    }
    // Principal axis of the scatter is the line direction; the normal is
    // perpendicular to it.
    const double phi = 0.5 * std::atan2(2.0 * suv, suu - svv);
    Line2D line{-std::sin(phi), std::cos(phi), 0.0};
    line.c = -(line.a * mu + line.b * mv);
    return line.canonical();
}

double surface_direction_angle(const Line2D& line) {
    return fold_half_turn(kHalfPi - std::atan2(-line.a, line.b));
}

double surface_direction_angle_unrectified(const Line2D& line) {
    return kHalfPi - std::atan(-line.a / line.b);
}

double rectify_direction(double raw, const Line2D& line) {
    const Line2D k = line.canonical();
    // With a >= 0 the direction (-b, a) points up +Z; its angle from +Z is
    // the principal branch.
    const double reference = std::atan2(-k.b, k.a);
    const double shifted = raw - kPi * std::round((raw - reference) / kPi);
    return fold_half_turn(shifted);
}

DirectionResult detect_direction(std::span<const Point2> zy_points) {
    DirectionResult out;
    out.line = fit_tls_line(zy_points);
    out.theta_x = rectify_direction(surface_direction_angle(out.line), out.line);

    double scale = 0.0;
    double sum = 0.0;
    for (const auto& p : zy_points) {
        scale = std::max(scale, std::hypot(p.u, p.v));
        const double d = out.line.signed_distance(p);
        sum += d * d;
    }
    out.rms_orthogonal_residual = std::sqrt(sum / static_cast<double>(zy_points.size()));
    if (std::abs(out.line.c) > 1e-6 * scale) {
        throw Error(ErrorCode::InterceptNotZero, "fitted ZY line misses the origin (|c| = " +
                                                     std::to_string(std::abs(out.line.c)) +
                                                     "); section is not at the evaluation pose");
    }
    return out;
}

std::vector<Point2> project_zy(std::span<const Point3> points) {
    std::vector<Point2> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back({p.y, p.z});
    return out;
}

std::vector<Point2> project_zx(std::span<const Point3> points) {
    std::vector<Point2> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back({p.z, p.x});
    return out;
}

}  // namespace pipeeval
