#include <pipeeval/pipeline.hpp>
#include <pipeeval/report.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace pipeeval;

namespace {

HelixSpec random_spec(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    HelixSpec s;
    s.radius = 60.0 + 200.0 * u(rng);
    s.semi_major = 5.0 + 15.0 * u(rng);
    s.semi_minor = s.semi_major * (0.3 + 0.6 * u(rng));
    s.pitch_per_turn = -80.0 + 160.0 * u(rng);
    s.helix_angle = -1.2 + 2.4 * u(rng);
    s.twist_profile.constant = -0.6 + 1.2 * u(rng);
    s.twist_profile.rate_per_section = -0.03 + 0.06 * u(rng);
    s.extent = 0.3 + 2.5 * u(rng);
    s.start_azimuth = -kPi + 2.0 * kPi * u(rng);
    s.start_height = -20.0 + 40.0 * u(rng);
    s.sections = 8 + static_cast<std::size_t>(30 * u(rng));
    s.points_per_section = 12 + static_cast<std::size_t>(50 * u(rng));
    s.rng_seed = static_cast<std::uint64_t>(1e9 * u(rng));
    return s;
}

}  // namespace

TEST(Evaluate, NoiseFreeRandomSpecsMatchTruth) {
    std::mt19937_64 rng(2024);
    for (int k = 0; k < 10; ++k) {
        const HelixSpec spec = random_spec(rng);
        const GeneratedCloud cloud = generate(spec);
        for (Fitter f : {Fitter::Trace, Fitter::Bookstein, Fitter::GaussNewton}) {
            EvaluateOptions o;
            o.fitter = f;
            const EvaluationReport r = evaluate(cloud.points, cloud.labels, o, cloud.truth);
            ASSERT_EQ(r.sections.size(), spec.sections);
            for (const auto& s : r.sections) {
                ASSERT_TRUE(s.theta_x_error && s.theta_y_deviation);
                EXPECT_LT(std::abs(*s.theta_x_error), 1e-7);
                EXPECT_LT(std::abs(*s.theta_y_deviation), 1e-7);
                EXPECT_NEAR(s.theta_y, cloud.truth[s.index].theta_y, 1e-7);
            }
            ASSERT_EQ(r.arcs.size(), 1u);
            const double p = spec.pitch_per_turn / (2 * kPi);
            EXPECT_NEAR(r.arcs[0].geometry.arc_length, spec.radius * spec.extent, 1e-6 * spec.radius * spec.extent);
            EXPECT_NEAR(r.arcs[0].geometry.helical_arc_length, std::hypot(spec.radius, p) * spec.extent,
                        1e-6 * spec.radius * spec.extent);
        }
    }
}

TEST(Evaluate, UnlabeledMatchesLabeled) {
    HelixSpec spec;
    spec.helix_angle = 0.3;
    spec.sections = 8;  // spacing more than three section widths
    spec.twist_profile.rate_per_section = 0.01;
    const GeneratedCloud cloud = generate(spec);
    const EvaluationReport labeled = evaluate(cloud.points, cloud.labels, {});
    EvaluateOptions o;
    o.expected_sections = spec.sections;
    const EvaluationReport unlabeled = evaluate(cloud.points, {}, o);
    ASSERT_EQ(labeled.sections.size(), unlabeled.sections.size());
    for (std::size_t i = 0; i < labeled.sections.size(); ++i) {
        EXPECT_NEAR(labeled.sections[i].theta_x, unlabeled.sections[i].theta_x, 1e-12);
        EXPECT_NEAR(labeled.sections[i].theta_y, unlabeled.sections[i].theta_y, 1e-12);
    }
}

TEST(Evaluate, WorkerCountDoesNotChangeReport) {
    HelixSpec spec;
    spec.noise_sigma = 0.05;
    spec.twist_profile.rate_per_section = 0.004;
    const GeneratedCloud cloud = generate(spec);
    EvaluateOptions one, four;
    four.workers = 4;
    for (Fitter f : {Fitter::Trace, Fitter::GaussNewton}) {
        one.fitter = four.fitter = f;
        EXPECT_EQ(serialize_report(evaluate(cloud.points, cloud.labels, one)),
                  serialize_report(evaluate(cloud.points, cloud.labels, four)));
    }
}

TEST(Evaluate, WindowSizesAllExactOnCleanData) {
    HelixSpec spec;
    spec.helix_angle = -0.5;
    const GeneratedCloud cloud = generate(spec);
    for (std::size_t w : {1u, 2u, 5u, 9u}) {
        EvaluateOptions o;
        o.window = w;
        const EvaluationReport r = evaluate(cloud.points, cloud.labels, o);
        EXPECT_EQ(r.window, w);
        for (const auto& s : r.sections) EXPECT_NEAR(s.theta_x, -0.5, 1e-9);
    }
    EvaluateOptions bad;
    bad.window = 0;
    EXPECT_THROW(evaluate(cloud.points, cloud.labels, bad), Error);
}

TEST(Evaluate, PooledWindowReducesDirectionScatter) {
    HelixSpec spec;
    spec.helix_angle = 0.2;
    spec.noise_sigma = 0.1;
    const GeneratedCloud cloud = generate(spec);
    auto scatter = [&](std::size_t w) {
        EvaluateOptions o;
        o.window = w;
        double s = 0.0;
        for (const auto& r : evaluate(cloud.points, cloud.labels, o).sections) s += std::pow(r.theta_x - 0.2, 2);
        return s;
    };
    EXPECT_LT(scatter(5), scatter(1));
}

TEST(Evaluate, ArcBreaksShareBoundarySections) {
    HelixSpec spec;
    spec.sections = 20;
    const GeneratedCloud cloud = generate(spec);
    EvaluateOptions o;
    o.arc_breaks = {12, 5};
    const EvaluationReport r = evaluate(cloud.points, cloud.labels, o);
    ASSERT_EQ(r.arcs.size(), 3u);
    EXPECT_EQ(r.arcs[0].first_section, 0u);
    EXPECT_EQ(r.arcs[0].last_section, 5u);
    EXPECT_EQ(r.arcs[1].first_section, 5u);
    EXPECT_EQ(r.arcs[1].last_section, 12u);
    EXPECT_EQ(r.arcs[2].last_section, 19u);
    EXPECT_EQ(r.arcs[1].theta_y.size(), 8u);
    EXPECT_EQ(r.arcs[1].residuals.size(), 8u);
    double total = 0.0;
    for (const auto& a : r.arcs) total += a.geometry.central_angle;
    EXPECT_NEAR(total, spec.extent, 1e-12);

    for (std::vector<std::size_t> bad : {std::vector<std::size_t>{0}, std::vector<std::size_t>{19}}) {
        o.arc_breaks = bad;
        try {
            evaluate(cloud.points, cloud.labels, o);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::InvalidSpec);
        }
    }
}

TEST(Evaluate, AnalysisErrorsNameTheSection) {
    HelixSpec spec;
    spec.sections = 6;
    spec.points_per_section = 10;
    GeneratedCloud cloud = generate(spec);
    // Flatten section 4 onto a line.
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        if (cloud.labels[i] == 4) {
            const double t = static_cast<double>(i % 10);
            cloud.points[i] = {cloud.truth[4].center.x, cloud.truth[4].center.y, cloud.truth[4].center.z + t};
        }
    }
    try {
        evaluate(cloud.points, cloud.labels, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateSection);
        EXPECT_NE(std::string(e.what()).find("section 4"), std::string::npos) << e.what();
        EXPECT_FALSE(e.is_input_error());
    }
}

TEST(Evaluate, NonConvergenceIsReported) {
    HelixSpec spec;
    spec.sections = 5;
    spec.noise_sigma = 0.2;
    const GeneratedCloud cloud = generate(spec);
    EvaluateOptions o;
    o.fitter = Fitter::GaussNewton;
    o.gauss_newton.max_iterations = 1;
    o.gauss_newton.warm_start = false;
    const EvaluationReport r = evaluate(cloud.points, cloud.labels, o);
    EXPECT_FALSE(r.all_converged());
    bool warned = false;
    for (const auto& w : r.warnings) warned |= w.find("did not converge") != std::string::npos;
    EXPECT_TRUE(warned);
}

TEST(Evaluate, CircularSectionsAndSingleSectionWarn) {
    HelixSpec spec;
    spec.semi_major = spec.semi_minor = 8.0;
    spec.sections = 3;
    const GeneratedCloud cloud = generate(spec);
    const EvaluationReport r = evaluate(cloud.points, cloud.labels, {});
    for (const auto& s : r.sections) {
        EXPECT_TRUE(s.circle_degenerate);
        EXPECT_EQ(s.theta_y, 0.0);
    }
    EXPECT_EQ(r.warnings.size(), 3u);

    std::vector<Point3> one;
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        if (cloud.labels[i] == 0) one.push_back(cloud.points[i]);
    }
    const EvaluationReport single = evaluate(one, std::vector<std::size_t>(one.size(), 0), {});
    EXPECT_TRUE(single.arcs.empty());
    EXPECT_FALSE(single.warnings.empty());
}

TEST(Evaluate, TruthMissingForSection) {
    HelixSpec spec;
    spec.sections = 4;
    const GeneratedCloud cloud = generate(spec);
    const std::vector<SectionTruth> partial(cloud.truth.begin(), cloud.truth.begin() + 2);
    try {
        evaluate(cloud.points, cloud.labels, {}, partial);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
    }
}
