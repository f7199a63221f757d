#include <pipeeval/helix.hpp>
#include <pipeeval/pipeline.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

using namespace pipeeval;

namespace {

CanonicalSection section_at(double radius, double phi, double z = 0.0) {
    auto pts = section_ellipse_canonical(5.0, 3.0, 0.0, 0.0, 16, 0.0);
    const RigidTransform place(RigidTransform::rotation_z(phi).rotation(),
                               Eigen::Vector3d(radius * std::cos(phi), radius * std::sin(phi), z));
    return canonicalize_section(place.apply(std::span<const Point3>(pts)));
}

ErrorCode code_of(const HelixSpec& spec) {
    try {
        spec.validate();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::EmptyInput;
}

std::string message_of(const HelixSpec& spec) {
    try {
        spec.validate();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(HelixSpec, DefaultsAreValid) { EXPECT_NO_THROW(HelixSpec{}.validate()); }

TEST(HelixSpec, InvalidFieldsAreNamed) {
    struct Case {
        const char* field;
        std::function<void(HelixSpec&)> edit;
    };
    const std::vector<Case> cases{
        {"sections", [](HelixSpec& s) { s.sections = 1; }},
        {"points_per_section", [](HelixSpec& s) { s.points_per_section = 5; }},
        {"radius", [](HelixSpec& s) { s.radius = 10.0; }},
        {"semi_minor", [](HelixSpec& s) { s.semi_minor = 0.0; }},
        {"semi_minor", [](HelixSpec& s) { s.semi_minor = 20.0; }},
        {"noise_sigma", [](HelixSpec& s) { s.noise_sigma = -1.0; }},
        {"extent", [](HelixSpec& s) { s.extent = 0.0; }},
        {"helix_angle", [](HelixSpec& s) { s.helix_angle = 2.0; }},
    };
    for (const auto& c : cases) {
        HelixSpec spec;
        c.edit(spec);
        EXPECT_EQ(code_of(spec), ErrorCode::InvalidSpec) << c.field;
        EXPECT_NE(message_of(spec).find(c.field), std::string::npos) << message_of(spec);
    }
}

TEST(HelixSpec, TwoSectionsIsMinimum) {
    HelixSpec spec;
    spec.sections = 2;
    const GeneratedCloud cloud = generate(spec);
    EXPECT_EQ(cloud.truth.size(), 2u);
    EXPECT_EQ(cloud.points.size(), 2 * spec.points_per_section);
}

TEST(TwistProfile, ConstantRateDefectAndCustom) {
    TwistProfile p;
    p.constant = 0.1;
    p.rate_per_section = 0.01;
    p.defect_amount = 0.05;
    p.defect_first = 3;
    p.defect_last = 4;
    EXPECT_DOUBLE_EQ(p(0), 0.1);
    EXPECT_DOUBLE_EQ(p(2), 0.12);
    EXPECT_DOUBLE_EQ(p(3), 0.1 + 0.03 + 0.05);
    EXPECT_DOUBLE_EQ(p(4), 0.1 + 0.04 + 0.05);
    EXPECT_DOUBLE_EQ(p(5), 0.15);
    p.custom = [](std::size_t i) { return -0.2 * static_cast<double>(i); };
    EXPECT_DOUBLE_EQ(p(2), -0.4);
}

TEST(Generate, DeterministicPerSeed) {
    HelixSpec spec;
    spec.noise_sigma = 0.05;
    const GeneratedCloud a = generate(spec), b = generate(spec);
    EXPECT_EQ(a.points, b.points);
    EXPECT_EQ(a.labels, b.labels);
    spec.rng_seed = 43;
    EXPECT_NE(generate(spec).points, a.points);
}

TEST(Generate, TruthRecordMatchesSpec) {
    HelixSpec spec;
    spec.radius = 90.0;
    spec.pitch_per_turn = 30.0;
    spec.start_azimuth = 0.3;
    spec.start_height = 5.0;
    spec.extent = 1.2;
    spec.sections = 7;
    spec.helix_angle = 0.25;
    spec.twist_profile.rate_per_section = 0.02;
    const GeneratedCloud cloud = generate(spec);
    for (std::size_t i = 0; i < spec.sections; ++i) {
        const auto& t = cloud.truth[i];
        const double swept = 1.2 * i / 6.0;
        EXPECT_EQ(t.section, i);
        EXPECT_NEAR(t.phi, 0.3 + swept, 1e-15);
        EXPECT_DOUBLE_EQ(t.theta_x, 0.25);
        EXPECT_DOUBLE_EQ(t.theta_y, 0.02 * i);
        EXPECT_NEAR(t.center.x, 90.0 * std::cos(t.phi), 1e-12);
        EXPECT_NEAR(t.center.y, 90.0 * std::sin(t.phi), 1e-12);
        EXPECT_NEAR(t.center.z, 5.0 + 30.0 / (2 * kPi) * swept, 1e-12);
        // Noise-free samples are centered on the truth center.
        std::vector<Point3> pts;
        for (std::size_t k = 0; k < cloud.points.size(); ++k) {
            if (cloud.labels[k] == i) pts.push_back(cloud.points[k]);
        }
        const Point3 c = centroid(pts);
        EXPECT_NEAR(c.x, t.center.x, 1e-9);
        EXPECT_NEAR(c.y, t.center.y, 1e-9);
        EXPECT_NEAR(c.z, t.center.z, 1e-9);
    }
}

TEST(Generate, SectionEllipseShape) {
    const double a = 12, b = 8, tx = 0.3, ty = -0.2;
    for (const auto& p : section_ellipse_canonical(a, b, tx, ty, 32, 0.5)) {
        // Undo the tilt about X, then the twist about Y: back to (b cos t, 0, a sin t).
        const Eigen::Vector3d q = RigidTransform::rotation_y(-ty).apply(RigidTransform::rotation_x(tx).apply(p.vec()));
        EXPECT_NEAR(q.y(), 0.0, 1e-12);
        EXPECT_NEAR(q.x() * q.x() / (b * b) + q.z() * q.z() / (a * a), 1.0, 1e-12);
    }
}

TEST(Generate, NoiseIsIsotropicWithRequestedVariance) {
    HelixSpec spec;
    spec.sections = 400;
    spec.points_per_section = 300;
    spec.extent = 3.0;
    const GeneratedCloud clean = generate(spec);
    spec.noise_sigma = 0.2;
    const GeneratedCloud noisy = generate(spec);
    ASSERT_EQ(clean.points.size(), noisy.points.size());
    ASSERT_GE(clean.points.size(), 100000u);
    double sx = 0, sy = 0, sz = 0;
    for (std::size_t i = 0; i < clean.points.size(); ++i) {
        sx += std::pow(noisy.points[i].x - clean.points[i].x, 2);
        sy += std::pow(noisy.points[i].y - clean.points[i].y, 2);
        sz += std::pow(noisy.points[i].z - clean.points[i].z, 2);
    }
    const double n = static_cast<double>(clean.points.size());
    for (double v : {sx / n, sy / n, sz / n}) EXPECT_NEAR(v, 0.04, 0.05 * 0.04);
}

TEST(GenerateEvaluate, PlanarUntwistedRecoversZero) {
    HelixSpec spec;
    spec.pitch_per_turn = 0.0;
    const GeneratedCloud cloud = generate(spec);
    const EvaluationReport r = evaluate(cloud.points, cloud.labels, {});
    for (const auto& s : r.sections) {
        EXPECT_NEAR(s.theta_x, 0.0, 1e-9);
        EXPECT_NEAR(s.theta_y, 0.0, 1e-9);
    }
}

TEST(GenerateEvaluate, ConstantTwistFiveDegrees) {
    HelixSpec spec;
    spec.twist_profile.constant = deg_to_rad(5.0);
    const GeneratedCloud cloud = generate(spec);
    const EvaluationReport r = evaluate(cloud.points, cloud.labels, {});
    for (const auto& s : r.sections) EXPECT_NEAR(s.theta_y, deg_to_rad(5.0), 1e-8);
}

TEST(Segment, LabeledGroupingFollowsLabels) {
    HelixSpec spec;
    spec.sections = 5;
    spec.points_per_section = 10;
    GeneratedCloud cloud = generate(spec);
    // Relabel out of order; sections come back in ascending label order.
    std::vector<std::size_t> labels;
    for (auto l : cloud.labels) labels.push_back(100 - 10 * l);
    const Segmentation seg = segment_sections(cloud.points, labels, 0);
    ASSERT_EQ(seg.sections.size(), 5u);
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_EQ(seg.labels[k], 60 + 10 * k);
        std::vector<Point3> expected;
        for (std::size_t i = 0; i < cloud.points.size(); ++i) {
            if (labels[i] == seg.labels[k]) expected.push_back(cloud.points[i]);
        }
        EXPECT_EQ(seg.sections[k], expected);
    }
}

TEST(Segment, UnlabeledRecoversGeneratorSections) {
    HelixSpec spec;
    spec.sections = 40;
    spec.extent = deg_to_rad(270.0);
    spec.start_azimuth = deg_to_rad(150.0);  // crosses the +-pi seam
    spec.noise_sigma = 0.02;
    const GeneratedCloud cloud = generate(spec);
    const Segmentation seg = segment_sections(cloud.points, {}, 40);
    ASSERT_EQ(seg.sections.size(), 40u);
    std::map<std::tuple<double, double, double>, std::size_t> truth;
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        truth[{cloud.points[i].x, cloud.points[i].y, cloud.points[i].z}] = cloud.labels[i];
    }
    std::size_t misassigned = 0;
    for (std::size_t k = 0; k < seg.sections.size(); ++k) {
        EXPECT_EQ(seg.labels[k], k);
        for (const auto& p : seg.sections[k]) misassigned += truth.at({p.x, p.y, p.z}) != k;
    }
    EXPECT_EQ(misassigned, 0u);
}

TEST(Segment, SingleSectionReturnsWholeCloud) {
    HelixSpec spec;
    spec.sections = 3;
    const GeneratedCloud cloud = generate(spec);
    const Segmentation seg = segment_sections(cloud.points, {}, 1);
    ASSERT_EQ(seg.sections.size(), 1u);
    EXPECT_EQ(seg.sections[0].size(), cloud.points.size());
}

TEST(Segment, Errors) {
    try {
        segment_sections({}, {}, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyCloud);
    }
    HelixSpec spec;
    spec.sections = 4;
    spec.points_per_section = 8;
    const GeneratedCloud cloud = generate(spec);
    std::vector<std::size_t> labels = cloud.labels;
    labels[0] = 99;
    labels[1] = 99;
    try {
        segment_sections(cloud.points, labels, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnderfilledSection);
    }
    EXPECT_THROW(segment_sections(cloud.points, {}, 0), Error);
    try {
        segment_sections(cloud.points, {}, 8);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnderfilledSection);
    }
}

TEST(ArcParameters, TwoSections) {
    const std::vector<CanonicalSection> s{section_at(100, 0.0), section_at(100, kPi / 6)};
    const ArcGeometry g = arc_parameters(s);
    EXPECT_NEAR(g.radius, 100.0, 1e-12);
    EXPECT_NEAR(g.central_angle, kPi / 6, 1e-12);
    EXPECT_NEAR(g.arc_length, 52.3599, 1e-4);
    EXPECT_NEAR(g.pitch_per_turn, 0.0, 1e-9);
    EXPECT_NEAR(g.helical_arc_length, g.arc_length, 1e-9);
}

TEST(ArcParameters, Semicircle) {
    const std::vector<CanonicalSection> s{section_at(50, 0.0), section_at(50, kHalfPi), section_at(50, kPi)};
    const ArcGeometry g = arc_parameters(s);
    EXPECT_NEAR(g.central_angle, kPi, 1e-12);
    EXPECT_NEAR(g.arc_length, 157.0796, 1e-4);
}

TEST(ArcParameters, ClockwiseSweepIsPositive) {
    const std::vector<CanonicalSection> s{section_at(80, 0.4, 10.0), section_at(80, 0.2, 5.0), section_at(80, 0.0)};
    const ArcGeometry g = arc_parameters(s);
    EXPECT_NEAR(g.central_angle, 0.4, 1e-12);
    EXPECT_NEAR(g.pitch_per_turn, 2 * kPi * 25.0, 1e-9);
}

TEST(ArcParameters, HelicalLengthMatchesClosedFormAndPolyline) {
    HelixSpec spec;
    spec.radius = 120.0;
    spec.pitch_per_turn = 60.0;
    spec.extent = kHalfPi;
    const GeneratedCloud cloud = generate(spec);
    const EvaluationReport r = evaluate(cloud.points, cloud.labels, {});
    ASSERT_EQ(r.arcs.size(), 1u);
    const ArcGeometry& g = r.arcs[0].geometry;
    const double p = 60.0 / (2 * kPi);
    const double closed = std::sqrt(120.0 * 120.0 + p * p) * kHalfPi;
    EXPECT_NEAR(g.helical_arc_length, closed, 1e-6 * closed);
    EXPECT_NEAR(g.arc_length, 120.0 * kHalfPi, 1e-6 * g.arc_length);
    EXPECT_NEAR(g.pitch_per_turn, 60.0, 1e-9);

    // Independent oracle: length of a fine polyline along the centre curve.
    double polyline = 0.0;
    constexpr int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double t0 = kHalfPi * i / n, t1 = kHalfPi * (i + 1) / n;
        polyline += std::hypot(120.0 * (std::cos(t1) - std::cos(t0)), 120.0 * (std::sin(t1) - std::sin(t0)),
                               p * (t1 - t0));
    }
    EXPECT_NEAR(g.helical_arc_length, polyline, 1e-6 * closed);
}

TEST(ArcParameters, SubArcAnglesAreAdditive) {
    std::vector<CanonicalSection> s;
    for (int i = 0; i < 12; ++i) s.push_back(section_at(70, -2.5 + 0.37 * i));
    const double total = arc_parameters(s).central_angle;
    for (std::size_t cut = 1; cut + 1 < s.size(); ++cut) {
        const std::span<const CanonicalSection> all(s);
        const double left = arc_parameters(all.subspan(0, cut + 1)).central_angle;
        const double right = arc_parameters(all.subspan(cut)).central_angle;
        EXPECT_NEAR(left + right, total, 1e-12);
    }
}

TEST(ArcParameters, Errors) {
    const std::vector<CanonicalSection> one{section_at(50, 0.0)};
    try {
        arc_parameters(one);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TooFewSections);
    }
    const std::vector<CanonicalSection> back{section_at(50, 0.0), section_at(50, 0.3), section_at(50, 0.1)};
    try {
        arc_parameters(back);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonMonotoneAzimuth);
    }
}
