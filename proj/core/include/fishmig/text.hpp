#pragma once

// Small text helpers shared by the CSV and key=value readers.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fishmig::text {

std::string_view trim(std::string_view s);

/// Splits on `sep` without quoting support; empty fields are preserved.
std::vector<std::string_view> split(std::string_view s, char sep);

/// Strict numeric parsing: the whole (trimmed) field must be consumed.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

/// Fixed-point formatting with `digits` decimals.
std::string format_fixed(double v, int digits);

/// Reads a whole file into lines, stripping trailing '\r'. Throws InputError if unreadable.
std::vector<std::string> read_lines(const std::string& path);

}  // namespace fishmig::text
