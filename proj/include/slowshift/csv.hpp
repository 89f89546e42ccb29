#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace slowshift {

/// Shortest round-trip decimal form; locale independent so CSV output is
/// byte-identical across machines.
std::string format_number(double value);

/// Opens a file for writing or raises an Io error.
std::ofstream open_output(const std::filesystem::path& path);

/// Splits one CSV line on commas, trimming blanks around each field.
std::vector<std::string> split_csv_line(std::string_view line);

/// Parses a full-string double; returns false on trailing garbage.
bool parse_number(std::string_view text, double& out);

}  // namespace slowshift
