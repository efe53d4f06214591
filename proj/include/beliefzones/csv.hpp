#pragma once
// Small IO helpers: shortest round-trip float formatting, atomic file writes
// (temp file + rename in the target directory) and a minimal CSV reader for
// the plot command. Fields never contain commas or quotes by construction.

#include <optional>
#include <string>
#include <vector>

namespace bz {

std::string fmt_double(double v);
std::string fmt_opt(const std::optional<double>& v);

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& content);

std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::vector<std::vector<std::string>> read_csv(const std::string& path);

} // namespace bz
