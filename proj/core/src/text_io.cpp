#include "spinneedlets/text_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "spinneedlets/errors.hpp"

namespace spinneedlets {

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string_view trim(std::string_view text) noexcept {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

double parse_double(std::string_view text) {
  const std::string buffer(trim(text));
  if (buffer == "inf" || buffer == "infinity") return INFINITY;
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(buffer.c_str(), &end);
  if (buffer.empty() || end != buffer.c_str() + buffer.size() || errno == ERANGE) {
    throw IoError("not a number: '" + buffer + "'");
  }
  return value;
}

long long parse_int(std::string_view text) {
  const std::string buffer(trim(text));
  char* end = nullptr;
  errno = 0;
  const long long value = std::strtoll(buffer.c_str(), &end, 10);
  if (buffer.empty() || end != buffer.c_str() + buffer.size() || errno == ERANGE) {
    throw IoError("not an integer: '" + buffer + "'");
  }
  return value;
}

std::uint64_t parse_uint64(std::string_view text) {
  const std::string buffer(trim(text));
  char* end = nullptr;
  errno = 0;
  const unsigned long long value = std::strtoull(buffer.c_str(), &end, 10);
  if (buffer.empty() || buffer.front() == '-' || end != buffer.c_str() + buffer.size() ||
      errno == ERANGE) {
    throw IoError("not an unsigned integer: '" + buffer + "'");
  }
  return value;
}

std::map<std::string, std::string> parse_tagged_header(std::string_view line,
                                                       std::string_view tag) {
  std::istringstream in{std::string(trim(line))};
  std::string hash;
  std::string found_tag;
  in >> hash >> found_tag;
  if (hash != "#" || found_tag != tag) {
    throw IoError("expected header '# " + std::string(tag) + " ...', got '" + std::string(line) +
                  "'");
  }
  std::map<std::string, std::string> fields;
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0) throw IoError("malformed header field '" + token + "'");
    fields[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return fields;
}

const std::string& header_value(const std::map<std::string, std::string>& header,
                                const std::string& key) {
  const auto it = header.find(key);
  if (it == header.end()) throw IoError("header lacks field '" + key + "'");
  return it->second;
}

}  // namespace spinneedlets
