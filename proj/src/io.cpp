#include <pipeeval/io.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace pipeeval {

std::string format_double(double value) {
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) return "nan";
    return std::string(buf.data(), end);
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

[[noreturn]] void parse_fail(std::size_t line_number, const std::string& what) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_number) + ": " + what);
}

double parse_number(std::string_view field, std::size_t line_number, std::string_view column) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = field.data() + field.size();
    if (!field.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
        parse_fail(line_number, "invalid number '" + std::string(field) + "' in column " + std::string(column));
    }
    return value;
}

std::size_t parse_index(std::string_view field, std::size_t line_number, std::string_view column) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        parse_fail(line_number, "invalid index '" + std::string(field) + "' in column " + std::string(column));
    }
    return value;
}

/// Calls row(fields, line_number) for each data line after checking the header.
template <typename Row>
void for_each_csv_row(std::string_view text, std::span<const std::vector<std::string_view>> headers, Row&& row,
                      std::size_t* header_choice) {
    std::size_t line_number = 0;
    bool have_header = false;
    std::size_t expected_fields = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto newline = text.find('\n', start);
        if (newline == std::string_view::npos) newline = text.size();
        const std::string_view line = trim(text.substr(start, newline - start));
        start = newline + 1;
        ++line_number;
        if (line.empty() || line.front() == '#') continue;
        const auto fields = split_fields(line);
        if (!have_header) {
            for (std::size_t h = 0; h < headers.size(); ++h) {
                if (std::equal(fields.begin(), fields.end(), headers[h].begin(), headers[h].end())) {
                    *header_choice = h;
                    expected_fields = headers[h].size();
                    have_header = true;
                    break;
                }
            }
            if (!have_header) {
                std::string want;
                for (auto f : headers.front()) want += (want.empty() ? "" : ",") + std::string(f);
                parse_fail(line_number, "expected header '" + want + "', got '" + std::string(line) + "'");
            }
            continue;
        }
        if (fields.size() != expected_fields) {
            parse_fail(line_number, "expected " + std::to_string(expected_fields) + " fields, got " +
                                        std::to_string(fields.size()));
        }
        row(fields, line_number);
    }
    if (!have_header) throw Error(ErrorCode::EmptyCloud, "file has no header and no data");
}

}  // namespace

CloudData parse_cloud_csv(std::string_view text) {
    static const std::vector<std::vector<std::string_view>> headers = {{"x", "y", "z"}, {"x", "y", "z", "section"}};
    CloudData data;
    std::size_t choice = 0;
    for_each_csv_row(
        text, headers,
        [&](const std::vector<std::string_view>& f, std::size_t line) {
            data.points.push_back({parse_number(f[0], line, "x"), parse_number(f[1], line, "y"),
                                   parse_number(f[2], line, "z")});
            if (f.size() == 4) data.labels.push_back(parse_index(f[3], line, "section"));
        },
        &choice);
    if (data.points.empty()) throw Error(ErrorCode::EmptyCloud, "point cloud file has no data rows");
    return data;
}

void write_cloud_csv(std::ostream& out, std::span<const Point3> points, std::span<const std::size_t> labels) {
    const bool labeled = !labels.empty();
    out << (labeled ? "x,y,z,section\n" : "x,y,z\n");
    for (std::size_t i = 0; i < points.size(); ++i) {
        out << format_double(points[i].x) << ',' << format_double(points[i].y) << ',' << format_double(points[i].z);
        if (labeled) out << ',' << labels[i];
        out << '\n';
    }
}

std::vector<SectionTruth> parse_truth_csv(std::string_view text) {
    static const std::vector<std::vector<std::string_view>> headers = {
        {"section", "phi", "theta_x_true", "theta_y_true", "cx", "cy", "cz"}};
    std::vector<SectionTruth> truth;
    std::size_t choice = 0;
    for_each_csv_row(
        text, headers,
        [&](const std::vector<std::string_view>& f, std::size_t line) {
            SectionTruth t;
            t.section = parse_index(f[0], line, "section");
            t.phi = parse_number(f[1], line, "phi");
            t.theta_x = parse_number(f[2], line, "theta_x_true");
            t.theta_y = parse_number(f[3], line, "theta_y_true");
            t.center = {parse_number(f[4], line, "cx"), parse_number(f[5], line, "cy"), parse_number(f[6], line, "cz")};
            truth.push_back(t);
        },
        &choice);
    return truth;
}

void write_truth_csv(std::ostream& out, std::span<const SectionTruth> truth) {
    out << "section,phi,theta_x_true,theta_y_true,cx,cy,cz\n";
    for (const auto& t : truth) {
        out << t.section << ',' << format_double(t.phi) << ',' << format_double(t.theta_x) << ','
            << format_double(t.theta_y) << ',' << format_double(t.center.x) << ',' << format_double(t.center.y) << ','
            << format_double(t.center.z) << '\n';
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

std::string digest(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out = "fnv1a64:";
    for (int shift = 60; shift >= 0; shift -= 4) out += hex[(hash >> shift) & 0xF];
    return out;
}

}  // namespace pipeeval
