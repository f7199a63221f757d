#include <pipeeval/compare.hpp>
#include <pipeeval/helix.hpp>
#include <pipeeval/io.hpp>
#include <pipeeval/parallel.hpp>
#include <pipeeval/torsion.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace pipeeval {

void SweepOptions::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidSweep, what); };
    if (trials == 0) fail("trials must be >= 1");
    if (steps == 0) fail("steps must be >= 1");
    if (!std::isfinite(min_angle) || !std::isfinite(max_angle) || min_angle > max_angle) {
        fail("angle range must satisfy min <= max");
    }
    if (min_angle < -kHalfPi - 1e-12 || max_angle > kHalfPi + 1e-12) fail("angle range must lie in [-90, 90] degrees");
    if (steps == 1 && min_angle != max_angle) fail("a single step needs min == max");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) fail("noise must be >= 0");
    if (!(semi_minor > 0.0) || !(semi_major > semi_minor)) fail("semi-axes must satisfy semi_major > semi_minor > 0");
    if (points < 6) fail("points must be >= 6");
    if (!(radius > semi_major)) fail("radius must exceed semi_major");
    if (!(band >= 0.0)) fail("band must be >= 0");
}

double sample_std(const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += (v - mean) * (v - mean);
    return std::sqrt(sum / static_cast<double>(values.size() - 1));
}

double paired_bootstrap_std_le(const std::vector<double>& a, const std::vector<double>& b, std::size_t resamples,
                               std::uint64_t seed) {
    if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "bootstrap samples must be paired");
    if (a.empty() || resamples == 0) return 0.0;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, a.size() - 1);
    std::vector<double> ra(a.size()), rb(b.size());
    std::size_t wins = 0;
    for (std::size_t r = 0; r < resamples; ++r) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::size_t k = pick(rng);
            ra[i] = a[k];
            rb[i] = b[k];
        }
        if (sample_std(ra) <= sample_std(rb)) ++wins;
    }
    return static_cast<double>(wins) / static_cast<double>(resamples);
}

namespace {

double sweep_angle(const SweepOptions& o, std::size_t step) {
    if (o.steps == 1) return o.min_angle;
    return o.min_angle + (o.max_angle - o.min_angle) * static_cast<double>(step) / static_cast<double>(o.steps - 1);
}

std::size_t fitter_slot(Fitter f) {
    switch (f) {
        case Fitter::Trace: return 0;
        case Fitter::Bookstein: return 1;
        case Fitter::GaussNewton: return 2;
    }
    return 0;
}

}  // namespace

SweepResult run_compare_fits(const SweepOptions& options) {
    options.validate();
    const std::size_t cases = options.steps * options.trials;
    // rows[case * 3 + fitter]
    std::vector<SweepRow> rows(cases * kAllFitters.size());
    GnSettings gn;
    gn.warm_start = false;

    parallel_for(cases, options.workers, [&](std::size_t c) {
        const std::size_t step = c / options.trials;
        const std::size_t trial = c % options.trials;
        const double truth = sweep_angle(options, step);
        std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                          static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(trial)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
        std::normal_distribution<double> noise(0.0, 1.0);

        auto points = section_ellipse_canonical(options.semi_major, options.semi_minor, 0.0, truth, options.points,
                                                phase(rng));
        for (auto& p : points) {
            p.x += options.radius;
            if (options.noise_sigma > 0.0) {
                p.x += options.noise_sigma * noise(rng);
                p.y += options.noise_sigma * noise(rng);
                p.z += options.noise_sigma * noise(rng);
            }
        }
        for (Fitter f : kAllFitters) {
            SweepRow& row = rows[c * kAllFitters.size() + fitter_slot(f)];
            row.fitter = f;
            row.step = step;
            row.trial = trial;
            row.true_angle = truth;
            try {
                const CanonicalSection section = canonicalize_section(points);
                row.raw = observe_torsion(section, 0.0, f, c, gn).theta_y;
                row.ok = true;
            } catch (const Error&) {
                row.ok = false;
                row.raw = std::numeric_limits<double>::quiet_NaN();
            }
        }
    });

    SweepResult result;
    for (Fitter f : kAllFitters) {
        const std::size_t slot = fitter_slot(f);
        std::vector<std::size_t> index;
        std::vector<double> raw;
        for (std::size_t c = 0; c < cases; ++c) {
            const SweepRow& row = rows[c * kAllFitters.size() + slot];
            if (!row.ok) continue;
            index.push_back(c * kAllFitters.size() + slot);
            raw.push_back(row.raw);
        }
        std::size_t anchor = 0;
        for (std::size_t k = 0; k < index.size(); ++k) {
            if (std::abs(rows[index[k]].true_angle) < std::abs(rows[index[anchor]].true_angle)) anchor = k;
        }
        const auto rect = rectify_torsion_detailed(raw, anchor);
        for (std::size_t k = 0; k < index.size(); ++k) rows[index[k]].rectified = rect.values[k];
        for (std::size_t c = 0; c < cases; ++c) {
            SweepRow& row = rows[c * kAllFitters.size() + slot];
            if (!row.ok) row.rectified = std::numeric_limits<double>::quiet_NaN();
        }
    }

    const double band = options.band + 1e-12;
    for (std::size_t c = 0; c < cases; ++c) {
        const SweepRow* r = &rows[c * kAllFitters.size()];
        if (std::abs(r[0].true_angle) > band) continue;
        for (std::size_t k = 0; k < kAllFitters.size(); ++k) {
            if (!r[k].ok) ++result.summaries[k].failures;
        }
        if (!(r[0].ok && r[1].ok && r[2].ok)) continue;
        for (std::size_t k = 0; k < kAllFitters.size(); ++k) {
            result.band_errors[k].push_back(fold_half_turn(r[k].raw - r[k].true_angle));
        }
    }
    result.paired_samples = result.band_errors[0].size();
    for (std::size_t k = 0; k < kAllFitters.size(); ++k) {
        auto& s = result.summaries[k];
        s.fitter = kAllFitters[k];
        const auto& e = result.band_errors[k];
        s.samples_in_band = e.size();
        double mean = 0.0;
        for (double v : e) mean += v;
        s.error_mean = e.empty() ? 0.0 : mean / static_cast<double>(e.size());
        s.error_std = sample_std(e);
    }
    result.bootstrap_trace_le_bookstein = paired_bootstrap_std_le(result.band_errors[0], result.band_errors[1],
                                                                  options.bootstrap_resamples, options.seed);
    result.bootstrap_trace_le_gauss_newton = paired_bootstrap_std_le(result.band_errors[0], result.band_errors[2],
                                                                     options.bootstrap_resamples, options.seed);

    // Output order: fitter-major, then (step, trial).
    for (Fitter f : kAllFitters) {
        for (std::size_t c = 0; c < cases; ++c) result.rows.push_back(rows[c * kAllFitters.size() + fitter_slot(f)]);
    }
    return result;
}

std::string sweep_rows_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "fitter,step,trial,true_theta_y_rad,raw_theta_y_rad,rectified_theta_y_rad,error_rad,ok\n";
    for (const auto& r : result.rows) {
        out << to_string(r.fitter) << ',' << r.step << ',' << r.trial << ',' << format_double(r.true_angle) << ',';
        if (r.ok) {
            out << format_double(r.raw) << ',' << format_double(r.rectified) << ','
                << format_double(r.rectified - r.true_angle) << ",1\n";
        } else {
            out << ",,,0\n";
        }
    }
    return out.str();
}

std::string sweep_summary_csv(const SweepResult& result, const SweepOptions& options) {
    std::ostringstream out;
    out << "# band_deg=" << format_double(rad_to_deg(options.band)) << " noise_mm=" << format_double(options.noise_sigma)
        << " paired_samples=" << result.paired_samples << " bootstrap_resamples=" << options.bootstrap_resamples
        << '\n';
    out << "fitter,samples_in_band,failures,error_mean_rad,error_std_rad,error_std_deg,bootstrap_trace_le\n";
    for (const auto& s : result.summaries) {
        out << to_string(s.fitter) << ',' << s.samples_in_band << ',' << s.failures << ','
            << format_double(s.error_mean) << ',' << format_double(s.error_std) << ','
            << format_double(rad_to_deg(s.error_std)) << ',';
        if (s.fitter == Fitter::Bookstein) out << format_double(result.bootstrap_trace_le_bookstein);
        if (s.fitter == Fitter::GaussNewton) out << format_double(result.bootstrap_trace_le_gauss_newton);
        out << '\n';
    }
    return out.str();
}

std::string sweep_fitter_csv(const SweepResult& result, Fitter fitter) {
    std::ostringstream out;
    out << "true_theta_y_deg,raw_theta_y_deg,rectified_theta_y_deg\n";
    for (const auto& r : result.rows) {
        if (r.fitter != fitter || !r.ok) continue;
        out << format_double(rad_to_deg(r.true_angle)) << ',' << format_double(rad_to_deg(r.raw)) << ','
            << format_double(rad_to_deg(r.rectified)) << '\n';
    }
    return out.str();
}

namespace {

std::string fixed(double v, int digits = 2) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

}  // namespace

std::string sweep_fitter_svg(const SweepResult& result, Fitter fitter, const SweepOptions& options) {
    constexpr double width = 520.0, height = 520.0, margin = 60.0;
    double x_lo = rad_to_deg(options.min_angle), x_hi = rad_to_deg(options.max_angle);
    if (x_hi - x_lo < 1e-9) {
        x_lo -= 1.0;
        x_hi += 1.0;
    }
    double y_lo = x_lo, y_hi = x_hi;
    for (const auto& r : result.rows) {
        if (r.fitter != fitter || !r.ok) continue;
        for (double v : {rad_to_deg(r.raw), rad_to_deg(r.rectified)}) {
            y_lo = std::min(y_lo, v);
            y_hi = std::max(y_hi, v);
        }
    }
    const auto px = [&](double deg) { return margin + (deg - x_lo) / (x_hi - x_lo) * (width - 2 * margin); };
    const auto py = [&](double deg) { return height - margin - (deg - y_lo) / (y_hi - y_lo) * (height - 2 * margin); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">Detected theta_y ("
        << to_string(fitter) << ")</text>\n";
    svg << "<g stroke=\"black\" fill=\"none\"><rect x=\"" << margin << "\" y=\"" << margin << "\" width=\""
        << width - 2 * margin << "\" height=\"" << height - 2 * margin << "\"/></g>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x_lo + (x_hi - x_lo) * k / 4.0;
        const double yv = y_lo + (y_hi - y_lo) * k / 4.0;
        svg << "<text x=\"" << fixed(px(xv)) << "\" y=\"" << height - margin + 16 << "\" text-anchor=\"middle\">"
            << fixed(xv, 1) << "</text>\n";
        svg << "<text x=\"" << margin - 6 << "\" y=\"" << fixed(py(yv) + 4) << "\" text-anchor=\"end\">" << fixed(yv, 1)
            << "</text>\n";
    }
    svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 18 << "\" text-anchor=\"middle\">true theta_y (deg)</text>\n";
    svg << "<text x=\"16\" y=\"" << height / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << height / 2
        << ")\">detected theta_y (deg)</text>\n";
    svg << "<g fill=\"#999999\">\n";
    for (const auto& r : result.rows) {
        if (r.fitter != fitter || !r.ok) continue;
        svg << "<circle cx=\"" << fixed(px(rad_to_deg(r.true_angle))) << "\" cy=\"" << fixed(py(rad_to_deg(r.raw)))
            << "\" r=\"2\"/>\n";
    }
    svg << "</g>\n<g fill=\"#1f5fbf\">\n";
    for (const auto& r : result.rows) {
        if (r.fitter != fitter || !r.ok) continue;
        svg << "<circle cx=\"" << fixed(px(rad_to_deg(r.true_angle))) << "\" cy=\""
            << fixed(py(rad_to_deg(r.rectified))) << "\" r=\"1.5\"/>\n";
    }
    svg << "</g>\n";
    svg << "<text x=\"" << margin + 8 << "\" y=\"" << margin + 16 << "\" fill=\"#999999\">raw</text>\n";
    svg << "<text x=\"" << margin + 8 << "\" y=\"" << margin + 30 << "\" fill=\"#1f5fbf\">rectified</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace pipeeval
