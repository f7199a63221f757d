#include <pipeeval/cli.hpp>
#include <pipeeval/compare.hpp>
#include <pipeeval/io.hpp>
#include <pipeeval/parallel.hpp>
#include <pipeeval/pipeline.hpp>
#include <pipeeval/report.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace pipeeval::cli {

namespace {

namespace fs = std::filesystem;

struct SynthFlags {
    std::string output_dir = ".";
    std::string spec_file;
    bool unlabeled = false;
    // Degree-valued flags are converted on use.
    double helix_angle_deg = 0.0;
    double twist_deg = 0.0;
    double twist_rate_deg = 0.0;
    double defect_deg = 0.0;
    double extent_deg = 90.0;
    double start_azimuth_deg = 0.0;
};

struct EvaluateFlags {
    std::string input;
    std::string output_dir = ".";
    std::string fitter = "trace";
    std::string format = "report";
    std::string truth;
    std::size_t window = 5;
    std::size_t sections = 0;
    std::size_t workers = default_workers();
    std::vector<std::size_t> arc_breaks;
};

struct CompareFlags {
    std::string output_dir = ".";
    double min_deg = -10.0;
    double max_deg = 10.0;
    double band_deg = 10.0;
    SweepOptions sweep;
};

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create directory " + dir + ": " + ec.message());
}

void apply_spec_file(const std::string& path, HelixSpec& spec, SynthFlags& flags) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidSpec, path + ": " + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::InvalidSpec, path + ": expected a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (!value.is_number() && !(key == "unlabeled" && value.is_boolean())) {
            throw Error(ErrorCode::InvalidSpec, key + ": expected a number");
        }
        auto count = [&] {
            if (!value.is_number_unsigned()) throw Error(ErrorCode::InvalidSpec, key + ": expected a non-negative integer");
            return value.get<std::size_t>();
        };
        if (key == "radius") spec.radius = value.get<double>();
        else if (key == "pitch_per_turn") spec.pitch_per_turn = value.get<double>();
        else if (key == "semi_major") spec.semi_major = value.get<double>();
        else if (key == "semi_minor") spec.semi_minor = value.get<double>();
        else if (key == "helix_angle_deg") flags.helix_angle_deg = value.get<double>();
        else if (key == "twist_deg") flags.twist_deg = value.get<double>();
        else if (key == "twist_rate_deg") flags.twist_rate_deg = value.get<double>();
        else if (key == "defect_deg") flags.defect_deg = value.get<double>();
        else if (key == "defect_first") spec.twist_profile.defect_first = count();
        else if (key == "defect_last") spec.twist_profile.defect_last = count();
        else if (key == "extent_deg") flags.extent_deg = value.get<double>();
        else if (key == "start_azimuth_deg") flags.start_azimuth_deg = value.get<double>();
        else if (key == "start_height") spec.start_height = value.get<double>();
        else if (key == "sections") spec.sections = count();
        else if (key == "points_per_section") spec.points_per_section = count();
        else if (key == "noise_sigma") spec.noise_sigma = value.get<double>();
        else if (key == "seed") spec.rng_seed = value.get<std::uint64_t>();
        else if (key == "unlabeled") flags.unlabeled = value.get<bool>();
        else throw Error(ErrorCode::InvalidSpec, key + ": unknown field");
    }
}

std::string deg(double rad) {
    std::ostringstream s;
    const double d = rad_to_deg(rad);
    s << std::fixed << std::setprecision(4) << (std::abs(d) < 5e-5 ? 0.0 : d);
    return s.str();
}

void print_summary(std::ostream& out, const EvaluationReport& report) {
    out << "fitter " << to_string(report.fitter) << ", " << report.sections.size() << " sections\n";
    out << "section  theta_x_deg  theta_y_deg\n";
    for (const auto& s : report.sections) {
        out << std::setw(7) << s.label << "  " << std::setw(11) << deg(s.theta_x) << "  " << std::setw(11)
            << deg(s.theta_y) << '\n';
    }
    for (const auto& arc : report.arcs) {
        std::ostringstream line;
        line << std::fixed << std::setprecision(4) << "arc " << arc.first_section << ".." << arc.last_section
             << ": R=" << arc.geometry.radius << " mm, central angle=" << rad_to_deg(arc.geometry.central_angle)
             << " deg, length=" << arc.geometry.arc_length << " mm, helical length=" << arc.geometry.helical_arc_length
             << " mm";
        out << line.str() << '\n';
    }
    for (const auto& w : report.warnings) out << "warning: " << w << '\n';
}

int do_synth(const HelixSpec& base, SynthFlags flags, std::ostream& out) {
    HelixSpec spec = base;
    spec.helix_angle = deg_to_rad(flags.helix_angle_deg);
    spec.twist_profile.constant = deg_to_rad(flags.twist_deg);
    spec.twist_profile.rate_per_section = deg_to_rad(flags.twist_rate_deg);
    spec.twist_profile.defect_amount = deg_to_rad(flags.defect_deg);
    spec.extent = deg_to_rad(flags.extent_deg);
    spec.start_azimuth = deg_to_rad(flags.start_azimuth_deg);
    const GeneratedCloud cloud = generate(spec);

    ensure_dir(flags.output_dir);
    std::ostringstream cloud_text, truth_text;
    const std::vector<std::size_t> no_labels;
    write_cloud_csv(cloud_text, cloud.points, flags.unlabeled ? no_labels : cloud.labels);
    write_truth_csv(truth_text, cloud.truth);
    write_file(fs::path(flags.output_dir) / "cloud.csv", cloud_text.str());
    write_file(fs::path(flags.output_dir) / "truth.csv", truth_text.str());
    out << "wrote " << cloud.points.size() << " points in " << spec.sections << " sections to "
        << (fs::path(flags.output_dir) / "cloud.csv").string() << '\n';
    return kExitOk;
}

int do_evaluate(const EvaluateFlags& flags, std::ostream& out) {
    const std::string text = read_file(flags.input);
    const CloudData cloud = parse_cloud_csv(text);
    std::vector<SectionTruth> truth;
    if (!flags.truth.empty()) truth = parse_truth_csv(read_file(flags.truth));

    EvaluateOptions options;
    options.fitter = parse_fitter(flags.fitter);
    options.window = flags.window;
    options.expected_sections = flags.sections;
    options.workers = flags.workers;
    options.arc_breaks = flags.arc_breaks;
    EvaluationReport report = evaluate(cloud.points, cloud.labels, options, truth);
    report.tool_version = std::string(kToolVersion);
    report.input_digest = digest(text);

    ensure_dir(flags.output_dir);
    if (flags.format == "report") {
        write_file(fs::path(flags.output_dir) / "report.json", serialize_report(report));
    } else {
        write_file(fs::path(flags.output_dir) / "sections.csv", sections_csv(report));
        write_file(fs::path(flags.output_dir) / "arcs.csv", arcs_csv(report));
    }
    print_summary(out, report);
    return report.all_converged() ? kExitOk : kExitNotConverged;
}

int do_compare(CompareFlags flags, std::ostream& out) {
    SweepOptions& sweep = flags.sweep;
    sweep.min_angle = deg_to_rad(flags.min_deg);
    sweep.max_angle = deg_to_rad(flags.max_deg);
    sweep.band = deg_to_rad(flags.band_deg);
    const SweepResult result = run_compare_fits(sweep);

    ensure_dir(flags.output_dir);
    const fs::path dir(flags.output_dir);
    write_file(dir / "compare_fits.csv", sweep_rows_csv(result));
    write_file(dir / "compare_fits_summary.csv", sweep_summary_csv(result, sweep));
    for (Fitter f : kAllFitters) {
        const std::string name(to_string(f));
        write_file(dir / ("compare_" + name + ".csv"), sweep_fitter_csv(result, f));
        write_file(dir / ("compare_" + name + ".svg"), sweep_fitter_svg(result, f, sweep));
    }
    out << "fitter        in-band  failures  error_std_deg\n";
    for (const auto& s : result.summaries) {
        std::ostringstream line;
        line << std::left << std::setw(12) << to_string(s.fitter) << std::right << std::setw(9) << s.samples_in_band
             << std::setw(10) << s.failures << std::setw(15) << std::setprecision(6) << rad_to_deg(s.error_std);
        out << line.str() << '\n';
    }
    out << "P(std trace <= std bookstein) = " << result.bootstrap_trace_le_bookstein << '\n';
    out << "P(std trace <= std gauss-newton) = " << result.bootstrap_trace_le_gauss_newton << '\n';
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Evaluate elliptical helical pipe bending from measured surface points", "pipeeval"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    HelixSpec spec;
    SynthFlags synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic helix cloud with ground truth");
    synth_cmd->add_option("--output-dir", synth.output_dir, "Directory for cloud.csv and truth.csv");
    synth_cmd->add_option("--spec", synth.spec_file, "JSON file with spec fields; explicit flags override it");
    synth_cmd->add_option("--seed", spec.rng_seed, "Noise and phase seed");
    synth_cmd->add_option("--radius", spec.radius, "Bend radius (mm)");
    synth_cmd->add_option("--pitch", spec.pitch_per_turn, "Rise per full turn (mm)");
    synth_cmd->add_option("--semi-major", spec.semi_major, "Cross-section semi-major axis (mm)");
    synth_cmd->add_option("--semi-minor", spec.semi_minor, "Cross-section semi-minor axis (mm)");
    synth_cmd->add_option("--helix-angle-deg", synth.helix_angle_deg, "Surface direction of every section");
    synth_cmd->add_option("--twist-deg", synth.twist_deg, "Constant surface twist");
    synth_cmd->add_option("--twist-rate-deg", synth.twist_rate_deg, "Twist added per section");
    synth_cmd->add_option("--defect-first", spec.twist_profile.defect_first, "First section of the twist defect");
    synth_cmd->add_option("--defect-last", spec.twist_profile.defect_last, "Last section of the twist defect");
    synth_cmd->add_option("--defect-deg", synth.defect_deg, "Extra twist over the defect window");
    synth_cmd->add_option("--extent-deg", synth.extent_deg, "Central angle from first to last section");
    synth_cmd->add_option("--start-azimuth-deg", synth.start_azimuth_deg, "Azimuth of the first section");
    synth_cmd->add_option("--start-height", spec.start_height, "Height of the first section (mm)");
    synth_cmd->add_option("--sections", spec.sections, "Number of cross-sections");
    synth_cmd->add_option("--points", spec.points_per_section, "Points per cross-section");
    synth_cmd->add_option("--noise", spec.noise_sigma, "Isotropic Gaussian noise sigma (mm)");
    synth_cmd->add_flag("--unlabeled", synth.unlabeled, "Omit the section column");

    EvaluateFlags eval;
    auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a measured point cloud");
    eval_cmd->add_option("--input", eval.input, "Point cloud CSV")->required();
    eval_cmd->add_option("--output-dir", eval.output_dir, "Directory for the report files");
    eval_cmd->add_option("--fitter", eval.fitter, "Ellipse fitter")
        ->check(CLI::IsMember({"trace", "bookstein", "gauss-newton"}));
    eval_cmd->add_option("--format", eval.format, "csv: sections.csv + arcs.csv; report: report.json")
        ->check(CLI::IsMember({"csv", "report"}));
    eval_cmd->add_option("--workers", eval.workers, "Worker threads")->check(CLI::PositiveNumber);
    eval_cmd->add_option("--window", eval.window, "Adjacent sections pooled per direction fit")
        ->check(CLI::PositiveNumber);
    eval_cmd->add_option("--sections", eval.sections, "Section count for unlabeled clouds");
    eval_cmd->add_option("--truth", eval.truth, "Ground-truth CSV to compare against");
    eval_cmd->add_option("--arc-breaks", eval.arc_breaks, "Section indices where a new arc starts")->delimiter(',');

    CompareFlags cmp;
    auto* cmp_cmd = app.add_subcommand("compare-fits", "Monte-Carlo comparison of the ellipse fitters");
    cmp_cmd->add_option("--output-dir", cmp.output_dir, "Directory for CSV and SVG output");
    cmp_cmd->add_option("--min-deg", cmp.min_deg, "Smallest true theta_y");
    cmp_cmd->add_option("--max-deg", cmp.max_deg, "Largest true theta_y");
    cmp_cmd->add_option("--steps", cmp.sweep.steps, "Number of true angles");
    cmp_cmd->add_option("--trials", cmp.sweep.trials, "Trials per true angle");
    cmp_cmd->add_option("--noise", cmp.sweep.noise_sigma, "Noise sigma (mm)");
    cmp_cmd->add_option("--seed", cmp.sweep.seed, "Base seed");
    cmp_cmd->add_option("--semi-major", cmp.sweep.semi_major, "Semi-major axis (mm)");
    cmp_cmd->add_option("--semi-minor", cmp.sweep.semi_minor, "Semi-minor axis (mm)");
    cmp_cmd->add_option("--points", cmp.sweep.points, "Points per section");
    cmp_cmd->add_option("--band-deg", cmp.band_deg, "Half-width of the summary band");
    cmp_cmd->add_option("--bootstrap", cmp.sweep.bootstrap_resamples, "Bootstrap resamples");
    cmp_cmd->add_option("--workers", cmp.sweep.workers, "Worker threads")->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (synth_cmd->parsed()) {
            if (!synth.spec_file.empty()) {
                HelixSpec from_file;
                SynthFlags file_flags = synth;
                apply_spec_file(synth.spec_file, from_file, file_flags);
                // Explicitly given flags win over the file.
                auto given = [&](const char* name) { return synth_cmd->count(name) > 0; };
                if (given("--seed")) from_file.rng_seed = spec.rng_seed;
                if (given("--radius")) from_file.radius = spec.radius;
                if (given("--pitch")) from_file.pitch_per_turn = spec.pitch_per_turn;
                if (given("--semi-major")) from_file.semi_major = spec.semi_major;
                if (given("--semi-minor")) from_file.semi_minor = spec.semi_minor;
                if (given("--defect-first")) from_file.twist_profile.defect_first = spec.twist_profile.defect_first;
                if (given("--defect-last")) from_file.twist_profile.defect_last = spec.twist_profile.defect_last;
                if (given("--start-height")) from_file.start_height = spec.start_height;
                if (given("--sections")) from_file.sections = spec.sections;
                if (given("--points")) from_file.points_per_section = spec.points_per_section;
                if (given("--noise")) from_file.noise_sigma = spec.noise_sigma;
                if (given("--helix-angle-deg")) file_flags.helix_angle_deg = synth.helix_angle_deg;
                if (given("--twist-deg")) file_flags.twist_deg = synth.twist_deg;
                if (given("--twist-rate-deg")) file_flags.twist_rate_deg = synth.twist_rate_deg;
                if (given("--defect-deg")) file_flags.defect_deg = synth.defect_deg;
                if (given("--extent-deg")) file_flags.extent_deg = synth.extent_deg;
                if (given("--start-azimuth-deg")) file_flags.start_azimuth_deg = synth.start_azimuth_deg;
                if (given("--unlabeled")) file_flags.unlabeled = synth.unlabeled;
                return do_synth(from_file, file_flags, out);
            }
            return do_synth(spec, synth, out);
        }
        if (eval_cmd->parsed()) return do_evaluate(eval, out);
        if (cmp_cmd->parsed()) return do_compare(cmp, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.is_input_error() ? kExitInputError : kExitAnalysisError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitAnalysisError;
    }
    return kExitInputError;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + std::min(argc, 1), argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace pipeeval::cli
