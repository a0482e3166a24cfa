#pragma once

#include "rflab/geometry.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rflab {

using Json = nlohmann::ordered_json;

// --- profile text format ---------------------------------------------------
//
//   # rflab-profile v1
//   # q 3
//   # topology closed_sphere
//   # symmetric 1
//   # period 0
//   # time 0.1            (optional)
//   x phi psi
//   <x> <phi> <psi>       (one row per node, %.17g)

struct ProfileFile {
    ProfileMetric profile;
    std::optional<double> time;
};

void write_profile(std::ostream& out, const ProfileMetric& profile, std::optional<double> time = std::nullopt);
ProfileFile read_profile(std::istream& in, const std::string& source = "profile");
void save_profile(const std::filesystem::path& path, const ProfileMetric& profile,
                  std::optional<double> time = std::nullopt);
ProfileFile load_profile(const std::filesystem::path& path);

// --- numbers, CSV, JSON ----------------------------------------------------

/// Shortest decimal string that round-trips to the same double.
std::string format_number(double value);

/// RFC-4180 CSV: comma separated, CRLF line ends, fields quoted when they
/// contain a comma, quote, CR or LF.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void add_row(std::vector<std::string> fields);
    void add_row(const std::vector<double>& values);
    std::string str() const;
    void save(const std::filesystem::path& path) const;
    std::size_t columns() const { return header_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string csv_escape(const std::string& field);

Json profile_to_json(const ProfileMetric& profile);
Json field_to_json(const CoordinateMetricField& field);
CoordinateMetricField field_from_json(const Json& j);

void save_json(const std::filesystem::path& path, const Json& j);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// --- configuration files ---------------------------------------------------

/// Parses the sectioned key-value format:
///
///   # comment            ; comment
///   [section]
///   key = value
///
/// Values become numbers, booleans (true/false) or strings; a value with
/// commas becomes a list. Keys before any section go to the top level.
/// Errors carry "source:line".
Json parse_ini(std::istream& in, const std::string& source);

/// Reads a config file; JSON when the first non-blank character is '{',
/// otherwise the sectioned key-value format.
Json load_config(const std::filesystem::path& path);
Json parse_config_text(const std::string& text, const std::string& source);

} // namespace rflab
