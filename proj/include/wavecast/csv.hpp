#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wavecast {

using Date = std::chrono::sys_days;

/// Splits one CSV record into fields. Double-quoted fields may contain commas
/// and doubled quotes; surrounding quotes are removed.
std::vector<std::string> split_csv_line(std::string_view line);

/// Splits text into lines, accepting LF or CRLF endings. A trailing newline
/// does not produce an empty final line.
std::vector<std::string_view> split_lines(std::string_view text);

std::string_view trim(std::string_view s);

/// Locale-independent number parsing; the whole field must be consumed.
std::optional<double> parse_double(std::string_view s);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

/// `YYYY-MM-DD`
std::optional<Date> parse_iso_date(std::string_view s);
std::string format_iso_date(Date d);

/// `M/D/YY` as used by the JHU CSSE time-series headers (years 2000-2099).
std::optional<Date> parse_us_short_date(std::string_view s);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace wavecast
