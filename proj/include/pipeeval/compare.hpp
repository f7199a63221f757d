#pragma once

#include <pipeeval/conic_fit.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace pipeeval {

inline constexpr std::array<Fitter, 3> kAllFitters = {Fitter::Trace, Fitter::Bookstein, Fitter::GaussNewton};

/// Monte-Carlo sweep of the true torsion angle for the three fitters.
struct SweepOptions {
    double min_angle = deg_to_rad(-10.0);
    double max_angle = deg_to_rad(10.0);
    std::size_t steps = 21;
    std::size_t trials = 50;
    double noise_sigma = 0.06;
    std::uint64_t seed = 42;
    double semi_major = 10.0;
    double semi_minor = 6.0;
    std::size_t points = 64;
    double radius = 120.0;
    /// Half-width of the near-zero band used for the summary statistics.
    double band = deg_to_rad(10.0);
    std::size_t bootstrap_resamples = 2000;
    std::size_t workers = 1;

    /// Throws InvalidSweep.
    void validate() const;
};

struct SweepRow {
    Fitter fitter = Fitter::Trace;
    std::size_t step = 0;
    std::size_t trial = 0;
    double true_angle = 0.0;
    double raw = 0.0;
    double rectified = 0.0;
    bool ok = true;
};

struct FitterSummary {
    Fitter fitter = Fitter::Trace;
    std::size_t samples_in_band = 0;
    std::size_t failures = 0;
    double error_mean = 0.0;
    double error_std = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::array<FitterSummary, 3> summaries;
    /// Share of paired bootstrap resamples with std(Trace) <= std(other).
    double bootstrap_trace_le_bookstein = 0.0;
    double bootstrap_trace_le_gauss_newton = 0.0;

    std::size_t paired_samples = 0;
    /// In-band orientation errors, paired by (step, trial) across fitters.
    std::array<std::vector<double>, 3> band_errors;
};

/// Every trial is generated from its own seed derived from (seed, step,
/// trial), so results do not depend on the worker count. Gauss-Newton is
/// started from the point moments, not from an algebraic fit.
SweepResult run_compare_fits(const SweepOptions& options);

/// Share of `resamples` paired bootstrap draws in which the sample standard
/// deviation of `a` does not exceed that of `b`.
double paired_bootstrap_std_le(const std::vector<double>& a, const std::vector<double>& b, std::size_t resamples,
                               std::uint64_t seed);

double sample_std(const std::vector<double>& values);

std::string sweep_rows_csv(const SweepResult& result);
std::string sweep_summary_csv(const SweepResult& result, const SweepOptions& options);
/// true/raw/rectified angles in degrees for one fitter.
std::string sweep_fitter_csv(const SweepResult& result, Fitter fitter);
/// Scatter of detected vs true angle (degrees), raw and rectified.
std::string sweep_fitter_svg(const SweepResult& result, Fitter fitter, const SweepOptions& options);

}  // namespace pipeeval
