#include <pipeeval/pipeline.hpp>
#include <pipeeval/parallel.hpp>

#include <algorithm>
#include <map>
#include <string>

namespace pipeeval {

bool EvaluationReport::all_converged() const {
    return std::all_of(sections.begin(), sections.end(), [](const SectionRecord& s) { return s.converged; });
}

namespace {

[[noreturn]] void rethrow_for_section(const Error& e, std::size_t label) {
    throw Error(e.code(), "section " + std::to_string(label) + ": " + e.detail());
}

template <typename Fn>
auto for_section(std::size_t label, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        rethrow_for_section(e, label);
    }
}

std::vector<std::pair<std::size_t, std::size_t>> arc_ranges(std::size_t count, std::vector<std::size_t> breaks) {
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    std::size_t first = 0;
    for (std::size_t b : breaks) {
        if (b == 0 || b >= count - 1) {
            throw Error(ErrorCode::InvalidSpec, "arc break " + std::to_string(b) + " is not an interior section index");
        }
        ranges.emplace_back(first, b);
        first = b;
    }
    ranges.emplace_back(first, count - 1);
    return ranges;
}

}  // namespace

EvaluationReport evaluate(std::span<const Point3> cloud, std::span<const std::size_t> labels,
                          const EvaluateOptions& options, std::span<const SectionTruth> truth) {
    if (options.window == 0) throw Error(ErrorCode::InvalidSpec, "window must be >= 1");
    const Segmentation segmentation = segment_sections(cloud, labels, options.expected_sections);
    const std::size_t n = segmentation.sections.size();

    std::vector<CanonicalSection> canonical(n);
    parallel_for(n, options.workers, [&](std::size_t i) {
        canonical[i] = for_section(segmentation.labels[i],
                                   [&] { return canonicalize_section(segmentation.sections[i]); });
    });

    const std::size_t before = (options.window - 1) / 2;
    const std::size_t after = options.window / 2;
    std::vector<DirectionResult> direction(n);
    std::vector<TorsionResult> torsion(n);
    parallel_for(n, options.workers, [&](std::size_t i) {
        const std::size_t lo = i >= before ? i - before : 0;
        const std::size_t hi = std::min(n - 1, i + after);
        std::vector<Point2> pooled;
        for (std::size_t j = lo; j <= hi; ++j) {
            const auto zy = project_zy(canonical[j].points_canonical);
            pooled.insert(pooled.end(), zy.begin(), zy.end());
        }
        const std::size_t label = segmentation.labels[i];
        direction[i] = for_section(label, [&] { return detect_direction(pooled); });
        torsion[i] = for_section(label, [&] {
            return observe_torsion(canonical[i], direction[i].theta_x, options.fitter, i, options.gauss_newton);
        });
    });

    const TorsionSeries series = make_torsion_series(torsion);

    EvaluationReport report;
    report.fitter = options.fitter;
    report.window = options.window;
    for (std::size_t i = 0; i < n; ++i) {
        SectionRecord rec;
        rec.index = i;
        rec.label = segmentation.labels[i];
        rec.point_count = segmentation.sections[i].size();
        rec.azimuth_phi = canonical[i].azimuth_phi;
        rec.centroid_radius = canonical[i].centroid_radius;
        rec.centroid = canonical[i].centroid_world;
        rec.line = direction[i].line;
        rec.theta_x = direction[i].theta_x;
        rec.line_rms = direction[i].rms_orthogonal_residual;
        rec.theta_y_raw = series.results[i].theta_y;
        rec.theta_y = series.rectified[i];
        rec.circle_degenerate = series.results[i].circle_degenerate;
        rec.rms_algebraic = series.results[i].fit.rms_algebraic_residual;
        rec.rms_geometric = series.results[i].fit.rms_geometric_residual;
        rec.iterations = series.results[i].fit.iterations;
        rec.converged = series.results[i].fit.converged;
        if (!rec.converged) {
            report.warnings.push_back("section " + std::to_string(rec.label) + ": Gauss-Newton did not converge");
        }
        if (rec.circle_degenerate) {
            report.warnings.push_back("section " + std::to_string(rec.label) +
                                      ": circular cross-section, theta_y undefined (reported as 0)");
        }
        report.sections.push_back(rec);
    }
    for (std::size_t i : series.ambiguous) {
        report.warnings.push_back("section " + std::to_string(segmentation.labels[i]) +
                                  ": torsion branch ambiguous, resolved toward 0");
    }

    if (!truth.empty()) {
        std::map<std::size_t, const SectionTruth*> by_label;
        for (const auto& t : truth) by_label[t.section] = &t;
        std::vector<double> expected;
        expected.reserve(n);
        for (const auto& rec : report.sections) {
            const auto it = by_label.find(rec.label);
            if (it == by_label.end()) {
                throw Error(ErrorCode::LengthMismatch, "no ground truth for section " + std::to_string(rec.label));
            }
            expected.push_back(it->second->theta_y);
        }
        const auto deviation = torsion_deviation(series, expected);
        for (std::size_t i = 0; i < n; ++i) {
            auto& rec = report.sections[i];
            rec.theta_x_error = fold_half_turn(rec.theta_x - by_label[rec.label]->theta_x);
            rec.theta_y_deviation = deviation[i];
        }
    }

    if (n >= 2) {
        for (const auto& [first, last] : arc_ranges(n, options.arc_breaks)) {
            ArcReport arc;
            arc.first_section = first;
            arc.last_section = last;
            arc.geometry = arc_parameters(std::span(canonical).subspan(first, last - first + 1));
            for (std::size_t i = first; i <= last; ++i) {
                arc.theta_x.push_back(report.sections[i].theta_x);
                arc.theta_y.push_back(report.sections[i].theta_y);
                arc.residuals.push_back(
                    {report.sections[i].line_rms, report.sections[i].rms_algebraic, report.sections[i].rms_geometric});
            }
            report.arcs.push_back(std::move(arc));
        }
    } else {
        report.warnings.push_back("single section: arc geometry not computed");
    }
    return report;
}

}  // namespace pipeeval
