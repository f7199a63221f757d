#include <pipeeval/helix.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

namespace pipeeval {

double TwistProfile::operator()(std::size_t section) const {
    if (custom) return custom(section);
    double value = constant + rate_per_section * static_cast<double>(section);
    if (has_defect() && section >= defect_first && section <= defect_last) value += defect_amount;
    return value;
}

namespace {

void require(bool ok, const char* field, const std::string& why) {
    if (!ok) throw Error(ErrorCode::InvalidSpec, std::string(field) + ": " + why);
}

}  // namespace

void HelixSpec::validate() const {
    require(std::isfinite(radius) && radius > 0.0, "radius", "must be positive");
    require(std::isfinite(semi_minor) && semi_minor > 0.0, "semi_minor", "must be positive");
    require(std::isfinite(semi_major) && semi_major >= semi_minor, "semi_major", "must be >= semi_minor");
    require(radius > semi_major, "radius", "must exceed semi_major (self-intersection)");
    require(std::isfinite(pitch_per_turn), "pitch_per_turn", "must be finite");
    require(std::isfinite(helix_angle) && std::abs(helix_angle) < kHalfPi, "helix_angle", "must be in (-pi/2, pi/2)");
    require(sections >= 2, "sections", "must be >= 2");
    require(points_per_section >= kMinSectionPoints, "points_per_section", "must be >= 6");
    require(std::isfinite(extent) && extent > 0.0, "extent", "must be positive");
    require(extent / static_cast<double>(sections - 1) < kPi, "extent",
            "spacing between sections must be below pi");
    require(std::isfinite(noise_sigma) && noise_sigma >= 0.0, "noise_sigma", "must be >= 0");
    require(std::isfinite(start_azimuth) && std::isfinite(start_height), "start_azimuth",
            "start pose must be finite");
    require(!twist_profile.has_defect() || twist_profile.defect_first <= twist_profile.defect_last,
            "twist_profile", "defect window first > last");
}

std::vector<Point3> section_ellipse_canonical(double semi_major, double semi_minor, double theta_x, double theta_y,
                                              std::size_t count, double phase) {
    // Twist about Y, then tilt so the major axis moves from +Z toward +Y.
    const RigidTransform pose = RigidTransform::rotation_x(-theta_x) * RigidTransform::rotation_y(theta_y);
    std::vector<Point3> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double t = phase + 2.0 * kPi * static_cast<double>(k) / static_cast<double>(count);
        out.push_back(pose.apply(Point3{semi_minor * std::cos(t), 0.0, semi_major * std::sin(t)}));
    }
    return out;
}

GeneratedCloud generate(const HelixSpec& spec) {
    spec.validate();
    // Separate streams: the noise-free cloud for a seed is the noisy one minus its noise.
    std::mt19937_64 rng(spec.rng_seed);
    std::seed_seq noise_seed{static_cast<std::uint32_t>(spec.rng_seed), static_cast<std::uint32_t>(spec.rng_seed >> 32),
                             0x6e6f6973u};
    std::mt19937_64 noise_rng(noise_seed);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * kPi);
    std::normal_distribution<double> noise(0.0, 1.0);

    const double rise_per_radian = spec.pitch_per_turn / (2.0 * kPi);
    const double step = spec.extent / static_cast<double>(spec.sections - 1);

    GeneratedCloud cloud;
    cloud.points.reserve(spec.sections * spec.points_per_section);
    cloud.labels.reserve(spec.sections * spec.points_per_section);
    for (std::size_t i = 0; i < spec.sections; ++i) {
        SectionTruth truth;
        truth.section = i;
        const double swept = step * static_cast<double>(i);
        truth.phi = wrap_full_turn(spec.start_azimuth + swept);
        truth.theta_x = spec.helix_angle;
        truth.theta_y = spec.twist_profile(i);
        truth.center = {spec.radius * std::cos(truth.phi), spec.radius * std::sin(truth.phi),
                        spec.start_height + rise_per_radian * swept};

        const double phase = phase_dist(rng);
        const auto local = section_ellipse_canonical(spec.semi_major, spec.semi_minor, truth.theta_x, truth.theta_y,
                                                     spec.points_per_section, phase);
        const RigidTransform place(RigidTransform::rotation_z(truth.phi).rotation(), truth.center.vec());
        for (const auto& p : local) {
            Point3 world = place.apply(p);
            if (spec.noise_sigma > 0.0) {
                world.x += spec.noise_sigma * noise(noise_rng);
                world.y += spec.noise_sigma * noise(noise_rng);
                world.z += spec.noise_sigma * noise(noise_rng);
            }
            cloud.points.push_back(world);
            cloud.labels.push_back(i);
        }
        cloud.truth.push_back(truth);
    }
    return cloud;
}

Segmentation segment_sections(std::span<const Point3> cloud, std::span<const std::size_t> labels,
                              std::size_t expected_sections) {
    if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "point cloud is empty");
    Segmentation out;

    if (!labels.empty()) {
        if (labels.size() != cloud.size()) {
            throw Error(ErrorCode::LengthMismatch, "label count differs from point count");
        }
        std::map<std::size_t, std::vector<Point3>> groups;
        for (std::size_t i = 0; i < cloud.size(); ++i) groups[labels[i]].push_back(cloud[i]);
        for (auto& [label, points] : groups) {
            out.labels.push_back(label);
            out.sections.push_back(std::move(points));
        }
    } else {
        if (expected_sections == 0) {
            throw Error(ErrorCode::InvalidSpec, "expected_sections must be >= 1 for an unlabeled cloud");
        }
        const std::size_t n = cloud.size();
        std::vector<double> azimuth(n);
        for (std::size_t i = 0; i < n; ++i) azimuth[i] = std::atan2(cloud[i].y, cloud[i].x);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t l, std::size_t r) { return azimuth[l] < azimuth[r]; });

        // Start the sweep right after the widest circular gap so that a part
        // straddling the +-pi cut stays contiguous.
        std::size_t start = 0;
        double widest = -1.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double next = k + 1 < n ? azimuth[order[k + 1]] : azimuth[order[0]] + 2.0 * kPi;
            const double gap = next - azimuth[order[k]];
            if (gap > widest) {
                widest = gap;
                start = (k + 1) % n;
            }
        }
        std::rotate(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(start), order.end());
        std::vector<double> unwrapped(n);
        for (std::size_t k = 0; k < n; ++k) {
            double a = azimuth[order[k]];
            if (k > 0 && a < unwrapped[k - 1]) a += 2.0 * kPi;
            unwrapped[k] = a;
        }

        const std::size_t bins = std::min(expected_sections, n);
        // Split before the (bins - 1) widest gaps; ties broken by position.
        std::vector<std::size_t> gap_index(n > 0 ? n - 1 : 0);
        std::iota(gap_index.begin(), gap_index.end(), 1);
        std::stable_sort(gap_index.begin(), gap_index.end(), [&](std::size_t l, std::size_t r) {
            return unwrapped[l] - unwrapped[l - 1] > unwrapped[r] - unwrapped[r - 1];
        });
        std::vector<std::size_t> cuts(gap_index.begin(), gap_index.begin() + static_cast<std::ptrdiff_t>(bins - 1));
        std::sort(cuts.begin(), cuts.end());
        cuts.push_back(n);

        std::size_t begin = 0;
        for (std::size_t b = 0; b < cuts.size(); ++b) {
            std::vector<Point3> section;
            for (std::size_t k = begin; k < cuts[b]; ++k) section.push_back(cloud[order[k]]);
            out.sections.push_back(std::move(section));
            out.labels.push_back(b);
            begin = cuts[b];
        }
        if (expected_sections > n) {
            throw Error(ErrorCode::UnderfilledSection, "more sections requested than points in the cloud");
        }
    }

    for (std::size_t s = 0; s < out.sections.size(); ++s) {
        if (out.sections[s].size() < kMinSectionPoints) {
            throw Error(ErrorCode::UnderfilledSection, "section " + std::to_string(out.labels[s]) + " has " +
                                                           std::to_string(out.sections[s].size()) +
                                                           " points (< 6)");
        }
    }
    return out;
}

ArcGeometry arc_parameters(std::span<const CanonicalSection> sections) {
    if (sections.size() < 2) {
        throw Error(ErrorCode::TooFewSections, "an arc needs at least 2 sections");
    }
    const std::size_t n = sections.size();
    std::vector<double> swept(n, 0.0);
    double direction = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double step = wrap_full_turn(sections[i].azimuth_phi - sections[i - 1].azimuth_phi);
        const double sign = step > 0.0 ? 1.0 : (step < 0.0 ? -1.0 : 0.0);
        if (sign == 0.0 || (direction != 0.0 && sign != direction)) {
            throw Error(ErrorCode::NonMonotoneAzimuth,
                        "section azimuth does not progress monotonically at section " + std::to_string(i));
        }
        direction = sign;
        swept[i] = swept[i - 1] + step;
    }

    ArcGeometry geo;
    double radius_sum = 0.0;
    for (const auto& s : sections) radius_sum += s.centroid_radius;
    geo.radius = radius_sum / static_cast<double>(n);
    geo.central_angle = std::abs(swept.back());
    geo.arc_length = geo.radius * geo.central_angle;

    // Rise per radian of azimuth (positive for a right-handed helix whichever
    // way it is traversed): least-squares slope of centroid height.
    double mean_phi = 0.0, mean_z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_phi += swept[i];
        mean_z += sections[i].centroid_world.z;
    }
    mean_phi /= static_cast<double>(n);
    mean_z /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = swept[i] - mean_phi;
        sxy += dx * (sections[i].centroid_world.z - mean_z);
        sxx += dx * dx;
    }
    const double rise = sxy / sxx;
    geo.pitch_per_turn = 2.0 * kPi * rise;
    geo.helical_arc_length = std::hypot(geo.radius, rise) * geo.central_angle;
    return geo;
}

}  // namespace pipeeval
