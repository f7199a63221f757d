#include <pipeeval/helix.hpp>
#include <pipeeval/line_fit.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace pipeeval;

namespace {

double orthogonal_sse(std::span<const Point2> pts, double normal_angle, double cu, double cv) {
    const double a = std::cos(normal_angle), b = std::sin(normal_angle);
    double s = 0.0;
    for (const auto& p : pts) {
        const double d = a * (p.u - cu) + b * (p.v - cv);
        s += d * d;
    }
    return s;
}

std::vector<Point2> noisy_line(double angle, double cu, double cv, std::size_t n, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> t(-10, 10);
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<Point2> out;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = t(rng);
        out.push_back({cu + s * std::cos(angle) + noise(rng), cv + s * std::sin(angle) + noise(rng)});
    }
    return out;
}

}  // namespace

TEST(TlsLine, VerticalLine) {
    const std::vector<Point2> pts{{0, 0}, {0, 1}, {0, 2}};
    const Line2D l = fit_tls_line(pts);
    EXPECT_NEAR(l.a, 1.0, 1e-15);
    EXPECT_NEAR(l.b, 0.0, 1e-15);
    EXPECT_NEAR(l.c, 0.0, 1e-15);
}

TEST(TlsLine, Diagonal) {
    const std::vector<Point2> pts{{0, 0}, {1, 1}, {2, 2}};
    const Line2D l = fit_tls_line(pts);
    EXPECT_NEAR(l.a, std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(l.b, -std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(l.c, 0.0, 1e-15);
}

TEST(TlsLine, HorizontalLineSignConvention) {
    const std::vector<Point2> pts{{-1, 3}, {0, 3}, {1, 3}};
    const Line2D l = fit_tls_line(pts);
    EXPECT_NEAR(l.a, 0.0, 1e-15);
    EXPECT_NEAR(l.b, 1.0, 1e-15);
    EXPECT_NEAR(l.c, -3.0, 1e-14);
}

TEST(TlsLine, NoisySlopeMatchesDenseAngleScan) {
    const auto pts = noisy_line(std::atan(3.0), 0.0, 1.0, 500, 0.01, 7);
    const Line2D l = fit_tls_line(pts);
    const double slope = -l.a / l.b;
    EXPECT_NEAR(slope, 3.0, 0.015);

    double cu = 0, cv = 0;
    for (const auto& p : pts) {
        cu += p.u;
        cv += p.v;
    }
    cu /= pts.size();
    cv /= pts.size();
    double best_angle = 0.0, best = 1e300;
    constexpr int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double ang = kPi * i / n;
        const double s = orthogonal_sse(pts, ang, cu, cv);
        if (s < best) {
            best = s;
            best_angle = ang;
        }
    }
    const double fitted = std::atan2(l.b, l.a);
    EXPECT_NEAR(fold_half_turn(fitted - best_angle), 0.0, 2.0 * kPi / n);
    EXPECT_LE(orthogonal_sse(pts, fitted, cu, cv), best * (1 + 1e-12));
}

TEST(TlsLine, RotationAboutCentroidIncreasesCost) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ang(-kPi, kPi), off(-50, 50);
    for (int k = 0; k < 100; ++k) {
        const auto pts = noisy_line(ang(rng), off(rng), off(rng), 50, 0.2, 1000 + k);
        const Line2D l = fit_tls_line(pts);
        double cu = 0, cv = 0;
        for (const auto& p : pts) {
            cu += p.u;
            cv += p.v;
        }
        cu /= pts.size();
        cv /= pts.size();
        EXPECT_NEAR(l.a * cu + l.b * cv + l.c, 0.0, 1e-9);
        const double normal = std::atan2(l.b, l.a);
        const double base = orthogonal_sse(pts, normal, cu, cv);
        EXPECT_GT(orthogonal_sse(pts, normal + 1e-4, cu, cv), base);
        EXPECT_GT(orthogonal_sse(pts, normal - 1e-4, cu, cv), base);
    }
}

TEST(TlsLine, AxisExchangeAndRotationEquivariance) {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> ang(-1.4, 1.4), rot(-kPi, kPi);
    for (int k = 0; k < 100; ++k) {
        const auto pts = noisy_line(ang(rng), 1.0, -2.0, 40, 0.1, 2000 + k);
        const double theta = surface_direction_angle(fit_tls_line(pts));

        std::vector<Point2> swapped;
        for (const auto& p : pts) swapped.push_back({p.v, p.u});
        const double theta_swapped = surface_direction_angle(fit_tls_line(swapped));
        EXPECT_NEAR(fold_half_turn(theta_swapped - (kHalfPi - theta)), 0.0, 1e-10);

        const double r = rot(rng);
        std::vector<Point2> rotated;
        for (const auto& p : pts) {
            rotated.push_back({std::cos(r) * p.u - std::sin(r) * p.v, std::sin(r) * p.u + std::cos(r) * p.v});
        }
        const Line2D a = fit_tls_line(pts), b = fit_tls_line(rotated);
        // Rotating the data turns the normal by the same angle.
        EXPECT_NEAR(fold_half_turn(std::atan2(b.b, b.a) - std::atan2(a.b, a.a) - r), 0.0, 1e-10);
    }
}

TEST(TlsLine, IsotropicNoiseAngleIsUnbiased) {
    const double truth = 0.35;
    std::vector<double> errors;
    for (int k = 0; k < 400; ++k) {
        const Line2D l = fit_tls_line(noisy_line(truth, 0.0, 0.0, 30, 0.5, 5000 + k));
        errors.push_back(fold_half_turn(std::atan2(-l.a, l.b) - truth));
    }
    double mean = 0.0;
    for (double e : errors) mean += e;
    mean /= errors.size();
    double var = 0.0;
    for (double e : errors) var += (e - mean) * (e - mean);
    const double se = std::sqrt(var / (errors.size() - 1) / errors.size());
    EXPECT_LT(std::abs(mean), 3.0 * se);
}

TEST(TlsLine, Errors) {
    const std::vector<Point2> one{{1, 1}};
    const std::vector<Point2> same{{1, 1}, {1, 1}, {1, 1}};
    for (const auto* pts : {&one, &same}) {
        try {
            fit_tls_line(*pts);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::TooFewPoints);
        }
    }
    const std::vector<Point2> square{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
    try {
        fit_tls_line(square);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IsotropicScatter);
    }
}

TEST(DirectionAngle, Limits) {
    EXPECT_EQ(surface_direction_angle({1.0, 0.0, 0.0}), 0.0);
    EXPECT_EQ(surface_direction_angle({0.0, 1.0, 0.0}), kHalfPi);
    EXPECT_NEAR(surface_direction_angle({std::sqrt(0.5), -std::sqrt(0.5), 0.0}), kPi / 4, 1e-15);
    EXPECT_NEAR(surface_direction_angle({std::sqrt(0.5), std::sqrt(0.5), 0.0}), -kPi / 4, 1e-15);
}

TEST(DirectionAngle, AgreesWithLiteralFormModuloPi) {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    for (int k = 0; k < 1000; ++k) {
        const double n = ang(rng);
        const Line2D l{std::cos(n), std::sin(n), 0.0};
        if (std::abs(l.b) < 1e-9) continue;
        const double literal = kHalfPi - std::atan(-l.a / l.b);
        EXPECT_NEAR(fold_half_turn(surface_direction_angle(l) - literal), 0.0, 1e-12);
        EXPECT_NEAR(surface_direction_angle_unrectified(l), literal, 1e-15);
    }
}

TEST(RectifyDirection, Examples) {
    const Line2D z_axis{1.0, 0.0, 0.0};
    EXPECT_EQ(rectify_direction(0.0, z_axis), 0.0);
    const Line2D l{std::cos(2.0), std::sin(2.0), 0.3};
    const double raw = surface_direction_angle(l);
    EXPECT_DOUBLE_EQ(rectify_direction(raw, l), rectify_direction(raw, l.flipped()));
}

TEST(RectifyDirection, IdempotentAndSignFlipInvariant) {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> ang(-kPi, kPi), c(-5, 5);
    for (int k = 0; k < 10000; ++k) {
        const double n = ang(rng);
        const Line2D l{std::cos(n), std::sin(n), c(rng)};
        const double raw = surface_direction_angle_unrectified(l);
        const double once = rectify_direction(raw, l);
        EXPECT_GT(once, -kHalfPi);
        EXPECT_LE(once, kHalfPi);
        EXPECT_EQ(rectify_direction(once, l), once);
        EXPECT_EQ(rectify_direction(raw, l.flipped()), once);
        EXPECT_NEAR(fold_half_turn(once - surface_direction_angle(l)), 0.0, 1e-12);
    }
}

TEST(RectifyDirection, SyntheticSweepIsMonotoneAndExact) {
    double previous = -kPi;
    for (int deg = -80; deg <= 80; ++deg) {
        const double truth = deg_to_rad(deg);
        const auto pts = section_ellipse_canonical(10.0, 6.0, truth, 0.0, 48, 0.2);
        const DirectionResult d = detect_direction(project_zy(pts));
        EXPECT_NEAR(d.theta_x, truth, 1e-9) << deg;
        EXPECT_GT(d.theta_x, previous);
        previous = d.theta_x;
    }
}

TEST(DetectDirection, InterceptMustBeZero) {
    std::vector<Point2> off;
    for (int i = 0; i < 10; ++i) off.push_back({0.5, -5.0 + i});
    try {
        detect_direction(off);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InterceptNotZero);
    }
}

TEST(Projections, Axes) {
    const std::vector<Point3> p{{1, 2, 3}};
    EXPECT_EQ(project_zy(p)[0], (Point2{2, 3}));
    EXPECT_EQ(project_zx(p)[0], (Point2{3, 1}));
}

TEST(Line2D, CanonicalForm) {
    const Line2D l = Line2D{-3.0, 4.0, 10.0}.canonical();
    EXPECT_NEAR(l.a, 0.6, 1e-15);
    EXPECT_NEAR(l.b, -0.8, 1e-15);
    EXPECT_NEAR(l.c, -2.0, 1e-15);
    const Line2D h = Line2D{0.0, -2.0, 1.0}.canonical();
    EXPECT_EQ(h.a, 0.0);
    EXPECT_EQ(h.b, 1.0);
    EXPECT_EQ(h.c, -0.5);
}
