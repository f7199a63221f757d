#include <pipeeval/conic_fit.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace pipeeval {

std::string_view to_string(Fitter fitter) {
    switch (fitter) {
        case Fitter::Trace: return "trace";
        case Fitter::Bookstein: return "bookstein";
        case Fitter::GaussNewton: return "gauss-newton";
    }
    return "trace";
}

Fitter parse_fitter(std::string_view name) {
    if (name == "trace") return Fitter::Trace;
    if (name == "bookstein") return Fitter::Bookstein;
    if (name == "gauss-newton") return Fitter::GaussNewton;
    throw Error(ErrorCode::InvalidSpec, "unknown fitter '" + std::string(name) + "'");
}

double rms(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return std::sqrt(sum / static_cast<double>(values.size()));
}

std::vector<double> algebraic_residuals(std::span<const Point2> points, const Conic2D& conic) {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(conic.evaluate(p));
    return out;
}

namespace {

/// Similarity taking the data to zero mean and unit RMS radius.
struct Normalization {
    double mean_u = 0.0;
    double mean_v = 0.0;
    double scale = 1.0;

    Point2 operator()(const Point2& p) const { return {(p.u - mean_u) / scale, (p.v - mean_v) / scale}; }

    /// Maps a conic fitted in normalized coordinates back to data coordinates.
    /// F(x) = F'((x - m) / s) exactly, so the residuals are unchanged.
    Conic2D denormalize(const Conic2D& k) const {
        const double s2 = scale * scale;
        Conic2D out;
        out.a11 = k.a11 / s2;
        out.a12 = k.a12 / s2;
        out.a22 = k.a22 / s2;
        const double bu = k.b1 / scale, bv = k.b2 / scale;
        out.b1 = bu - 2.0 * (out.a11 * mean_u + out.a12 * mean_v);
        out.b2 = bv - 2.0 * (out.a12 * mean_u + out.a22 * mean_v);
        out.c = out.a11 * mean_u * mean_u + 2.0 * out.a12 * mean_u * mean_v + out.a22 * mean_v * mean_v -
                bu * mean_u - bv * mean_v + k.c;
        return out;
    }
};

Normalization make_normalization(std::span<const Point2> points) {
    Normalization n;
    for (const auto& p : points) {
        n.mean_u += p.u;
        n.mean_v += p.v;
    }
    n.mean_u /= static_cast<double>(points.size());
    n.mean_v /= static_cast<double>(points.size());
    double sum = 0.0;
    for (const auto& p : points) sum += (p.u - n.mean_u) * (p.u - n.mean_u) + (p.v - n.mean_v) * (p.v - n.mean_v);
    n.scale = std::sqrt(sum / static_cast<double>(points.size()));
    if (!(n.scale > 0.0)) throw Error(ErrorCode::DegenerateConfiguration, "all points coincide");
    return n;
}

void require_points(std::span<const Point2> points, std::size_t minimum) {
    if (points.size() < minimum) {
        throw Error(ErrorCode::TooFewPoints, "ellipse fit needs at least " + std::to_string(minimum) +
                                                 " points, got " + std::to_string(points.size()));
    }
}

void fill_residuals(FitResult& result, std::span<const Point2> points) {
    const auto algebraic = algebraic_residuals(points, result.conic);
    result.rms_algebraic_residual = rms(algebraic);
    std::vector<double> geometric;
    geometric.reserve(points.size());
    for (const auto& p : points) geometric.push_back(point_to_ellipse_distance(p, result.params));
    result.rms_geometric_residual = rms(geometric);
}

FitResult finish_linear_fit(const Conic2D& normalized_space, const Normalization& norm, ConicConstraint constraint,
                            std::span<const Point2> points) {
    FitResult result;
    result.conic = norm.denormalize(normalized_space).normalized(constraint);
    result.params = conic_to_params(result.conic);
    result.iterations = 0;
    result.converged = true;
    fill_residuals(result, points);
    return result;
}

}  // namespace

FitResult fit_bookstein(std::span<const Point2> points) {
    require_points(points, 6);
    const Normalization norm = make_normalization(points);

    // Linear-part columns first so the QR factor separates them from the
    // quadratic block: ||D k||^2 = ||R_ll k_l + R_lq k_q||^2 + ||R_qq k_q||^2.
    Eigen::MatrixXd design(points.size(), 6);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Point2 q = norm(points[i]);
        design.row(static_cast<Eigen::Index>(i)) << q.u, q.v, 1.0, q.u * q.u, 2.0 * q.u * q.v, q.v * q.v;
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
    const Eigen::Matrix<double, 6, 6> r = qr.matrixQR().topRows<6>().triangularView<Eigen::Upper>();
    const Eigen::Matrix3d r_ll = r.topLeftCorner<3, 3>();
    const Eigen::Matrix3d r_lq = r.topRightCorner<3, 3>();
    const Eigen::Matrix3d r_qq = r.bottomRightCorner<3, 3>();

    const double max_diag = r.diagonal().cwiseAbs().maxCoeff();
    if (r_ll.diagonal().cwiseAbs().minCoeff() <= 1e-12 * max_diag) {
        throw Error(ErrorCode::DegenerateConfiguration, "points are collinear");
    }

    // lambda1^2 + lambda2^2 = k_q^T W^2 k_q with W = diag(1, sqrt2, 1).
    const Eigen::Vector3d w(1.0, std::sqrt(2.0), 1.0);
    const Eigen::Matrix3d m = r_qq * w.cwiseInverse().asDiagonal();
    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullV);
    const Eigen::Vector3d sv = svd.singularValues();
    if (sv[1] <= 1e-12 * std::max(sv[0], max_diag)) {
        throw Error(ErrorCode::DegenerateConfiguration, "conic through the points is not unique");
    }
    const Eigen::Vector3d k_q = svd.matrixV().col(2).cwiseQuotient(w);
    const Eigen::Vector3d k_l = -(r_ll.triangularView<Eigen::Upper>().solve(r_lq * k_q));

    const Conic2D local{k_q[0], k_q[1], k_q[2], k_l[0], k_l[1], k_l[2], ConicConstraint::None};
    return finish_linear_fit(local, norm, ConicConstraint::Bookstein, points);
}

FitResult fit_trace(std::span<const Point2> points) {
    require_points(points, 6);
    const Normalization norm = make_normalization(points);

    // a11 = 1 - a22 turns the constrained problem into ordinary least squares
    // in (a12, a22, b1, b2, c).
    Eigen::MatrixXd design(points.size(), 5);
    Eigen::VectorXd rhs(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Point2 q = norm(points[i]);
        const auto row = static_cast<Eigen::Index>(i);
        design.row(row) << 2.0 * q.u * q.v, q.v * q.v - q.u * q.u, q.u, q.v, 1.0;
        rhs[row] = -q.u * q.u;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-12);
    if (qr.rank() < 5) {
        throw Error(ErrorCode::DegenerateConfiguration, "rank-deficient design matrix");
    }
    const Eigen::VectorXd z = qr.solve(rhs);

    const Conic2D local{1.0 - z[1], z[0], z[1], z[2], z[3], z[4], ConicConstraint::None};
    return finish_linear_fit(local, norm, ConicConstraint::Trace, points);
}

// --- Foot point -----------------------------------------------------------

namespace {

/// Root of G(s) = (n0 / (s + r0))^2 + (z1 / (s + 1))^2 - 1 on the bracket
/// where G changes sign. G is convex and decreasing there, so Newton from
/// the left end never overshoots; bisection takes over if it stalls.
double foot_point_root(double r0, double z0, double z1, double g) {
    const double n0 = r0 * z0;
    double lo = z1 - 1.0;
    double hi = g < 0.0 ? 0.0 : std::hypot(n0, z1) - 1.0;
    double s = lo;
    for (int i = 0; i < 200; ++i) {
        const double d0 = s + r0, d1 = s + 1.0;
        const double ratio0 = n0 / d0, ratio1 = z1 / d1;
        const double value = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if (value == 0.0) return s;
        if (value > 0.0) lo = s; else hi = s;
        const double slope = -2.0 * (ratio0 * ratio0 / d0 + ratio1 * ratio1 / d1);
        double next = s - value / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == s || next == lo || next == hi) {
            if (hi - lo <= std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s))) return next;
            next = 0.5 * (lo + hi);
            if (next == lo || next == hi) return next;
        }
        s = next;
    }
    return s;
}

/// First-quadrant foot point for an axis-aligned ellipse with e0 >= e1 and
/// y0, y1 >= 0.
Point2 quadrant_foot_point(double e0, double e1, double y0, double y1) {
    if (y1 > 0.0) {
        if (y0 > 0.0) {
            const double z0 = y0 / e0, z1 = y1 / e1;
            const double g = z0 * z0 + z1 * z1 - 1.0;
            if (g == 0.0) return {y0, y1};
            const double r0 = (e0 / e1) * (e0 / e1);
            const double s = foot_point_root(r0, z0, z1, g);
            return {r0 * y0 / (s + r0), y1 / (s + 1.0)};
        }
        return {0.0, e1};
    }
    const double numer = e0 * y0;
    const double denom = e0 * e0 - e1 * e1;
    if (numer < denom) {
        const double ratio = numer / denom;
        return {e0 * ratio, e1 * std::sqrt(std::max(0.0, 1.0 - ratio * ratio))};
    }
    return {e0, 0.0};
}

}  // namespace

FootPoint ellipse_foot_point(const Point2& p, const EllipseParams& params) {
    const double c = std::cos(params.orientation), s = std::sin(params.orientation);
    const double du = p.u - params.center.u, dv = p.v - params.center.v;
    const double l0 = c * du + s * dv;
    const double l1 = -s * du + c * dv;
    const double e0 = params.semi_major, e1 = params.semi_minor;

    const Point2 q = quadrant_foot_point(e0, e1, std::abs(l0), std::abs(l1));
    const double f0 = std::copysign(q.u, l0);
    const double f1 = std::copysign(q.v, l1);
    const double distance = std::hypot(l0 - f0, l1 - f1);
    const double level = (l0 / e0) * (l0 / e0) + (l1 / e1) * (l1 / e1);

    FootPoint out;
    out.parameter = std::atan2(f1 / e1, f0 / e0);
    out.point = {params.center.u + c * f0 - s * f1, params.center.v + s * f0 + c * f1};
    out.signed_distance = level < 1.0 ? -distance : distance;
    return out;
}

double point_to_ellipse_distance(const Point2& p, const EllipseParams& params) {
    return ellipse_foot_point(p, params).signed_distance;
}

// --- Geometric fit ----------------------------------------------------------

EllipseParams moment_initial_guess(std::span<const Point2> points) {
    require_points(points, 3);
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
        suu += (p.u - mu) * (p.u - mu);
        suv += (p.u - mu) * (p.v - mv);
        svv += (p.v - mv) * (p.v - mv);
    }
    suu /= n;
    suv /= n;
    svv /= n;
    const double mean = 0.5 * (suu + svv);
    const double radius = std::hypot(0.5 * (suu - svv), suv);
    // Boundary samples uniform in the parameter have second moments a^2/2, b^2/2.
    EllipseParams init;
    init.center = {mu, mv};
    init.semi_major = std::sqrt(2.0 * (mean + radius));
    init.semi_minor = std::sqrt(2.0 * std::max(mean - radius, 0.0));
    init.semi_minor = std::max(init.semi_minor, 1e-3 * init.semi_major);
    init.orientation = fold_half_turn(0.5 * std::atan2(2.0 * suv, suu - svv));
    if (!(init.semi_major > 0.0)) throw Error(ErrorCode::DegenerateConfiguration, "all points coincide");
    return init;
}

namespace {

using Vector5 = Eigen::Matrix<double, 5, 1>;
using Matrix5 = Eigen::Matrix<double, 5, 5>;

constexpr double kCollapsedAxis = 1e-9;

EllipseParams from_vector(const Vector5& x) {
    EllipseParams e;
    e.center = {x[0], x[1]};
    e.semi_major = std::abs(x[2]);
    e.semi_minor = std::abs(x[3]);
    e.orientation = x[4];
    return e;
}

/// Residuals (signed distances) and their Jacobian. Each foot point is held
/// fixed while differentiating, which is exact because the distance is
/// stationary in the foot-point parameter.
double evaluate_geometric(std::span<const Point2> points, const EllipseParams& e, Eigen::VectorXd* residual,
                          Eigen::Matrix<double, Eigen::Dynamic, 5>* jacobian) {
    const double c = std::cos(e.orientation), s = std::sin(e.orientation);
    const double a = e.semi_major, b = e.semi_minor;
    double cost = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const FootPoint foot = ellipse_foot_point(points[i], e);
        const auto row = static_cast<Eigen::Index>(i);
        cost += foot.signed_distance * foot.signed_distance;
        if (residual) (*residual)[row] = foot.signed_distance;
        if (jacobian) {
            const double ct = std::cos(foot.parameter), st = std::sin(foot.parameter);
            double n0 = b * ct, n1 = a * st;
            const double len = std::hypot(n0, n1);
            n0 /= len;
            n1 /= len;
            const double nu = c * n0 - s * n1;
            const double nv = s * n0 + c * n1;
            jacobian->row(row) << -nu, -nv, -n0 * ct, -n1 * st, -(-n0 * b * st + n1 * a * ct);
        }
    }
    return cost;
}

}  // namespace

FitResult fit_gauss_newton(std::span<const Point2> points, const EllipseParams& init, const GnSettings& settings) {
    require_points(points, 5);
    if (!(settings.max_iterations >= 1) || !(settings.step_tolerance > 0.0) || !(settings.residual_tolerance > 0.0) ||
        !(settings.damping_floor > 0.0)) {
        throw Error(ErrorCode::InvalidSpec, "invalid Gauss-Newton settings");
    }
    if (!(init.semi_minor > 0.0) || !(init.semi_major > 0.0)) {
        throw Error(ErrorCode::InvalidSpec, "Gauss-Newton initial ellipse must have positive semi-axes");
    }

    const auto n = static_cast<Eigen::Index>(points.size());
    Vector5 x(init.center.u, init.center.v, init.semi_major, init.semi_minor, init.orientation);
    Eigen::VectorXd residual(n);
    Eigen::Matrix<double, Eigen::Dynamic, 5> jacobian(n, 5);

    FitResult result;
    double cost = evaluate_geometric(points, from_vector(x), &residual, &jacobian);
    result.rms_history.push_back(std::sqrt(cost / static_cast<double>(n)));

    double damping = 1e-3;
    bool converged = false;
    int iteration = 0;
    while (iteration < settings.max_iterations) {
        if (std::sqrt(cost / static_cast<double>(n)) <= settings.residual_tolerance) {
            converged = true;
            break;
        }
        ++iteration;
        const Matrix5 normal = jacobian.transpose() * jacobian;
        const Vector5 gradient = jacobian.transpose() * residual;
        const double diag_floor = settings.damping_floor * std::max(normal.diagonal().maxCoeff(), 1.0);

        bool accepted = false;
        while (!accepted) {
            Matrix5 damped = normal;
            for (int k = 0; k < 5; ++k) damped(k, k) += damping * std::max(normal(k, k), diag_floor);
            const Vector5 step = -damped.ldlt().solve(gradient);
            const Vector5 candidate = x + step;
            if (step.allFinite()) {
                Eigen::VectorXd cand_residual(n);
                Eigen::Matrix<double, Eigen::Dynamic, 5> cand_jacobian(n, 5);
                const double cand_cost =
                    evaluate_geometric(points, from_vector(candidate), &cand_residual, &cand_jacobian);
                if (cand_cost < cost) {
                    accepted = true;
                    x = candidate;
                    x[2] = std::abs(x[2]);
                    x[3] = std::abs(x[3]);
                    cost = cand_cost;
                    residual.swap(cand_residual);
                    jacobian.swap(cand_jacobian);
                    damping = std::max(damping * 0.1, settings.damping_floor);
                    result.rms_history.push_back(std::sqrt(cost / static_cast<double>(n)));
                    if (std::min(x[2], x[3]) < kCollapsedAxis) {
                        throw Error(ErrorCode::CollapsedAxis, "a semi-axis collapsed below 1e-9 mm");
                    }
                    if (step.norm() <= settings.step_tolerance * (x.norm() + settings.step_tolerance)) {
                        converged = true;
                    }
                    continue;
                }
            }
            damping *= 10.0;
            // No decrease even along a vanishing gradient step: the iterate is
            // stationary to working precision.
            if (damping > 1e16) {
                converged = true;
                break;
            }
        }
        if (converged) break;
    }

    EllipseParams params = from_vector(x);
    if (params.semi_minor > params.semi_major) {
        std::swap(params.semi_major, params.semi_minor);
        params.orientation += kHalfPi;
    }
    params.orientation = fold_half_turn(params.orientation);
    if (params.is_circle()) params.orientation = 0.0;

    result.params = params;
    result.conic = params_to_conic(params, ConicConstraint::Trace);
    result.iterations = iteration;
    result.converged = converged;
    fill_residuals(result, points);
    return result;
}

FitResult fit_ellipse(std::span<const Point2> points, Fitter fitter, const GnSettings& settings) {
    switch (fitter) {
        case Fitter::Trace: return fit_trace(points);
        case Fitter::Bookstein: return fit_bookstein(points);
        case Fitter::GaussNewton: {
            EllipseParams init = moment_initial_guess(points);
            if (settings.warm_start) {
                try {
                    init = fit_trace(points).params;
                } catch (const NotAnEllipseError&) {
                }
            }
            return fit_gauss_newton(points, init, settings);
        }
    }
    return fit_trace(points);
}

}  // namespace pipeeval
