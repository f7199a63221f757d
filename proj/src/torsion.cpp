#include <pipeeval/torsion.hpp>

#include <algorithm>
#include <cmath>

namespace pipeeval {

std::vector<Point2> untilted_zx_points(const CanonicalSection& section, double theta_x) {
    // A tilt of theta_x carries +Z to (0, sin, cos); rotating by +theta_x
    // about X (right-handed) brings it back.
    const double c = std::cos(theta_x), s = std::sin(theta_x);
    std::vector<Point2> out;
    out.reserve(section.points_canonical.size());
    for (const auto& p : section.points_canonical) {
        const double z = s * p.y + c * p.z;
        out.push_back({z, p.x});
    }
    return out;
}

TorsionResult observe_torsion(const CanonicalSection& section, double theta_x, Fitter fitter,
                              std::size_t section_index, const GnSettings& settings) {
    const auto points = untilted_zx_points(section, theta_x);
    TorsionResult out;
    out.fitter = fitter;
    out.section_index = section_index;
    out.fit = fit_ellipse(points, fitter, settings);
    out.circle_degenerate = out.fit.params.is_circle();
    out.theta_y = out.circle_degenerate ? 0.0 : out.fit.params.orientation;
    return out;
}

namespace {

constexpr double kQuarter = kHalfPi;

/// Value + k*pi/2 nearest to target. Sets *tie when two branches are equally
/// close (the one nearer 0 wins).
double nearest_branch(double value, double target, bool* tie) {
    const double k = std::round((target - value) / kQuarter);
    const double best = value + k * kQuarter;
    const double alternative = best + (target - best > 0.0 ? kQuarter : -kQuarter);
    const double d_best = std::abs(best - target);
    const double d_alt = std::abs(alternative - target);
    if (std::abs(d_best - d_alt) <= 1e-12) {
        *tie = true;
        return std::abs(best) <= std::abs(alternative) ? best : alternative;
    }
    *tie = false;
    return best;
}

}  // namespace

TorsionRectification rectify_torsion_detailed(std::span<const double> raw, std::size_t anchor) {
    TorsionRectification out;
    out.values.assign(raw.begin(), raw.end());
    if (raw.empty()) return out;
    anchor = std::min(anchor, raw.size() - 1);

    bool tie = false;
    out.values[anchor] = nearest_branch(raw[anchor], 0.0, &tie);
    if (tie) out.ambiguous.push_back(anchor);
    for (std::size_t i = anchor + 1; i < raw.size(); ++i) {
        out.values[i] = nearest_branch(raw[i], out.values[i - 1], &tie);
        if (tie) out.ambiguous.push_back(i);
    }
    for (std::size_t i = anchor; i-- > 0;) {
        out.values[i] = nearest_branch(raw[i], out.values[i + 1], &tie);
        if (tie) out.ambiguous.push_back(i);
    }
    std::sort(out.ambiguous.begin(), out.ambiguous.end());
    return out;
}

std::vector<double> rectify_torsion(std::span<const double> raw) { return rectify_torsion_detailed(raw).values; }

TorsionSeries make_torsion_series(std::vector<TorsionResult> results) {
    std::stable_sort(results.begin(), results.end(),
                     [](const TorsionResult& l, const TorsionResult& r) { return l.section_index < r.section_index; });
    TorsionSeries series;
    std::vector<double> raw;
    raw.reserve(results.size());
    for (const auto& r : results) raw.push_back(r.theta_y);
    auto rect = rectify_torsion_detailed(raw);
    series.results = std::move(results);
    series.rectified = std::move(rect.values);
    series.ambiguous = std::move(rect.ambiguous);
    return series;
}

std::vector<double> torsion_deviation(const TorsionSeries& series, std::span<const double> expected) {
    if (series.rectified.size() != expected.size()) {
        throw Error(ErrorCode::LengthMismatch, "torsion series has " + std::to_string(series.rectified.size()) +
                                                   " sections, expected values " + std::to_string(expected.size()));
    }
    std::vector<double> out(expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) out[i] = fold_half_turn(series.rectified[i] - expected[i]);
    return out;
}

}  // namespace pipeeval
