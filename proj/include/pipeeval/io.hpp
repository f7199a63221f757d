#pragma once

#include <pipeeval/geometry.hpp>
#include <pipeeval/helix.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pipeeval {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

struct CloudData {
    std::vector<Point3> points;
    /// Empty when the file has no section column.
    std::vector<std::size_t> labels;
};

/// CSV with header "x,y,z" or "x,y,z,section"; '#' starts a comment line.
/// ParseError messages name the offending line; no data rows is EmptyCloud.
CloudData parse_cloud_csv(std::string_view text);
void write_cloud_csv(std::ostream& out, std::span<const Point3> points, std::span<const std::size_t> labels);

/// Header "section,phi,theta_x_true,theta_y_true,cx,cy,cz".
std::vector<SectionTruth> parse_truth_csv(std::string_view text);
void write_truth_csv(std::ostream& out, std::span<const SectionTruth> truth);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// 64-bit FNV-1a, rendered as "fnv1a64:<16 hex digits>".
std::string digest(std::string_view bytes);

}  // namespace pipeeval
