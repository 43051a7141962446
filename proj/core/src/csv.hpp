#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace placemotif::csv {

// Splits one CSV record. Supports double-quoted fields with "" escapes; no
// embedded newlines. Returns nullopt on an unterminated quote.
std::optional<std::vector<std::string>> split(std::string_view line);

// Quotes a field only when it contains a delimiter, quote, or newline.
std::string escape(std::string_view field);

// Reads a line and strips a trailing '\r'.
bool getline(std::istream& in, std::string& line);

std::optional<std::int64_t> to_int(std::string_view s);
std::optional<double> to_double(std::string_view s);

std::string_view trim(std::string_view s);

// Shortest round-trippable decimal representation.
std::string format_double(double v);

}  // namespace placemotif::csv
