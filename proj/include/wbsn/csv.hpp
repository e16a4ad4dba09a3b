#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wbsn {

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Version comment written as the first line of every CSV we emit.
std::string csv_version_line(std::string_view schema);

}  // namespace wbsn
