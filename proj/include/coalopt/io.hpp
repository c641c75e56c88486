#pragma once

#include <filesystem>
#include <string>

#include "coalopt/reservoir.hpp"

namespace coalopt {

/// Shortest round-trip decimal form of a double ("." decimal separator,
/// locale-independent). All numeric file output goes through this so that
/// repeated runs produce byte-identical files.
std::string format_double(double value);

/// RFC 4180 quoting: wraps the field in quotes when it contains a comma,
/// quote, or newline.
std::string csv_field(const std::string& value);

/// Writes content to path (binary mode, LF endings preserved), creating
/// parent directories as needed.
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Reads a whole file; throws ValidationError when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

/// Parses a rate matrix: one line per well, `num_intervals` rates in
/// Mt/yr separated by commas or whitespace. Blank lines and lines starting
/// with '#' are skipped. Errors name the offending data row (1-based).
InjectionSchedule parse_schedule_csv(const std::string& text, int num_wells,
                                     int num_intervals, double interval_years);

}  // namespace coalopt
