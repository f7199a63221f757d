#include <pipeeval/io.hpp>
#include <pipeeval/report.hpp>

#include <json.hpp>

#include <sstream>

namespace pipeeval {

using ordered_json = nlohmann::ordered_json;

namespace {

void put_angle(ordered_json& j, const std::string& key, double radians) {
    j[key + "_rad"] = radians;
    j[key + "_deg"] = rad_to_deg(radians);
}

ordered_json section_to_json(const SectionRecord& s) {
    ordered_json j;
    j["index"] = s.index;
    j["label"] = s.label;
    j["point_count"] = s.point_count;
    put_angle(j, "azimuth_phi", s.azimuth_phi);
    j["centroid_radius_mm"] = s.centroid_radius;
    j["centroid_mm"] = {s.centroid.x, s.centroid.y, s.centroid.z};
    j["line"] = {{"a", s.line.a}, {"b", s.line.b}, {"c", s.line.c}};
    put_angle(j, "theta_x", s.theta_x);
    j["line_rms_mm"] = s.line_rms;
    put_angle(j, "theta_y_raw", s.theta_y_raw);
    put_angle(j, "theta_y", s.theta_y);
    j["circle_degenerate"] = s.circle_degenerate;
    j["fit"] = {{"rms_algebraic", s.rms_algebraic},
                {"rms_geometric_mm", s.rms_geometric},
                {"iterations", s.iterations},
                {"converged", s.converged}};
    if (s.theta_x_error) put_angle(j, "theta_x_error", *s.theta_x_error);
    if (s.theta_y_deviation) put_angle(j, "theta_y_deviation", *s.theta_y_deviation);
    return j;
}

SectionRecord section_from_json(const ordered_json& j) {
    SectionRecord s;
    s.index = j.at("index").get<std::size_t>();
    s.label = j.at("label").get<std::size_t>();
    s.point_count = j.at("point_count").get<std::size_t>();
    s.azimuth_phi = j.at("azimuth_phi_rad").get<double>();
    s.centroid_radius = j.at("centroid_radius_mm").get<double>();
    const auto& c = j.at("centroid_mm");
    s.centroid = {c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()};
    const auto& line = j.at("line");
    s.line = {line.at("a").get<double>(), line.at("b").get<double>(), line.at("c").get<double>()};
    s.theta_x = j.at("theta_x_rad").get<double>();
    s.line_rms = j.at("line_rms_mm").get<double>();
    s.theta_y_raw = j.at("theta_y_raw_rad").get<double>();
    s.theta_y = j.at("theta_y_rad").get<double>();
    s.circle_degenerate = j.at("circle_degenerate").get<bool>();
    const auto& fit = j.at("fit");
    s.rms_algebraic = fit.at("rms_algebraic").get<double>();
    s.rms_geometric = fit.at("rms_geometric_mm").get<double>();
    s.iterations = fit.at("iterations").get<int>();
    s.converged = fit.at("converged").get<bool>();
    if (j.contains("theta_x_error_rad")) s.theta_x_error = j.at("theta_x_error_rad").get<double>();
    if (j.contains("theta_y_deviation_rad")) s.theta_y_deviation = j.at("theta_y_deviation_rad").get<double>();
    return s;
}

ordered_json arc_to_json(const ArcReport& arc) {
    ordered_json j;
    j["first_section"] = arc.first_section;
    j["last_section"] = arc.last_section;
    j["radius_mm"] = arc.geometry.radius;
    put_angle(j, "central_angle", arc.geometry.central_angle);
    j["arc_length_mm"] = arc.geometry.arc_length;
    j["helical_arc_length_mm"] = arc.geometry.helical_arc_length;
    j["pitch_per_turn_mm"] = arc.geometry.pitch_per_turn;
    j["theta_x_rad"] = arc.theta_x;
    j["theta_y_rad"] = arc.theta_y;
    ordered_json residuals = ordered_json::array();
    for (const auto& r : arc.residuals) {
        residuals.push_back({{"line_rms_mm", r.line_rms},
                             {"ellipse_rms_algebraic", r.ellipse_rms_algebraic},
                             {"ellipse_rms_geometric_mm", r.ellipse_rms_geometric}});
    }
    j["residuals"] = residuals;
    return j;
}

ArcReport arc_from_json(const ordered_json& j) {
    ArcReport arc;
    arc.first_section = j.at("first_section").get<std::size_t>();
    arc.last_section = j.at("last_section").get<std::size_t>();
    arc.geometry.radius = j.at("radius_mm").get<double>();
    arc.geometry.central_angle = j.at("central_angle_rad").get<double>();
    arc.geometry.arc_length = j.at("arc_length_mm").get<double>();
    arc.geometry.helical_arc_length = j.at("helical_arc_length_mm").get<double>();
    arc.geometry.pitch_per_turn = j.at("pitch_per_turn_mm").get<double>();
    arc.theta_x = j.at("theta_x_rad").get<std::vector<double>>();
    arc.theta_y = j.at("theta_y_rad").get<std::vector<double>>();
    for (const auto& r : j.at("residuals")) {
        arc.residuals.push_back({r.at("line_rms_mm").get<double>(), r.at("ellipse_rms_algebraic").get<double>(),
                                 r.at("ellipse_rms_geometric_mm").get<double>()});
    }
    return arc;
}

}  // namespace

std::string serialize_report(const EvaluationReport& report) {
    ordered_json j;
    j["schema"] = report.schema;
    j["tool_version"] = report.tool_version;
    j["input_digest"] = report.input_digest;
    j["fitter"] = std::string(to_string(report.fitter));
    j["window"] = report.window;
    ordered_json sections = ordered_json::array();
    for (const auto& s : report.sections) sections.push_back(section_to_json(s));
    j["sections"] = sections;
    ordered_json arcs = ordered_json::array();
    for (const auto& a : report.arcs) arcs.push_back(arc_to_json(a));
    j["arcs"] = arcs;
    j["warnings"] = report.warnings;
    return j.dump(2) + "\n";
}

EvaluationReport parse_report(std::string_view text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("report: ") + e.what());
    }
    try {
        EvaluationReport report;
        report.schema = j.at("schema").get<std::string>();
        if (report.schema != "pipeeval.report/1") {
            throw Error(ErrorCode::ParseError, "unsupported report schema '" + report.schema + "'");
        }
        report.tool_version = j.at("tool_version").get<std::string>();
        report.input_digest = j.at("input_digest").get<std::string>();
        report.fitter = parse_fitter(j.at("fitter").get<std::string>());
        report.window = j.at("window").get<std::size_t>();
        for (const auto& s : j.at("sections")) report.sections.push_back(section_from_json(s));
        for (const auto& a : j.at("arcs")) report.arcs.push_back(arc_from_json(a));
        report.warnings = j.at("warnings").get<std::vector<std::string>>();
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("report: ") + e.what());
    }
}

std::string sections_csv(const EvaluationReport& report) {
    std::ostringstream out;
    out << "section,label,points,phi_rad,centroid_radius_mm,theta_x_rad,theta_x_deg,line_rms_mm,"
           "theta_y_raw_rad,theta_y_rad,theta_y_deg,circle_degenerate,rms_algebraic,rms_geometric_mm,"
           "iterations,converged\n";
    for (const auto& s : report.sections) {
        out << s.index << ',' << s.label << ',' << s.point_count << ',' << format_double(s.azimuth_phi) << ','
            << format_double(s.centroid_radius) << ',' << format_double(s.theta_x) << ','
            << format_double(rad_to_deg(s.theta_x)) << ',' << format_double(s.line_rms) << ','
            << format_double(s.theta_y_raw) << ',' << format_double(s.theta_y) << ','
            << format_double(rad_to_deg(s.theta_y)) << ',' << (s.circle_degenerate ? 1 : 0) << ','
            << format_double(s.rms_algebraic) << ',' << format_double(s.rms_geometric) << ',' << s.iterations << ','
            << (s.converged ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string arcs_csv(const EvaluationReport& report) {
    std::ostringstream out;
    out << "arc,first_section,last_section,radius_mm,central_angle_rad,central_angle_deg,arc_length_mm,"
           "helical_arc_length_mm,pitch_per_turn_mm\n";
    for (std::size_t i = 0; i < report.arcs.size(); ++i) {
        const auto& a = report.arcs[i];
        out << i << ',' << a.first_section << ',' << a.last_section << ',' << format_double(a.geometry.radius) << ','
            << format_double(a.geometry.central_angle) << ',' << format_double(rad_to_deg(a.geometry.central_angle))
            << ',' << format_double(a.geometry.arc_length) << ',' << format_double(a.geometry.helical_arc_length)
            << ',' << format_double(a.geometry.pitch_per_turn) << '\n';
    }
    return out.str();
}

}  // namespace pipeeval
