#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace spinneedlets {

// Shortest round-trip-safe form: 17 significant digits.
std::string format_double(double value);

std::string_view trim(std::string_view text) noexcept;
std::vector<std::string_view> split_csv(std::string_view line);

// Strict conversions; throw IoError on trailing garbage or overflow.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);
std::uint64_t parse_uint64(std::string_view text);

// "# <tag> key=value key=value ..." -> {key: value}.
std::map<std::string, std::string> parse_tagged_header(std::string_view line,
                                                       std::string_view tag);
const std::string& header_value(const std::map<std::string, std::string>& header,
                                const std::string& key);

}  // namespace spinneedlets
