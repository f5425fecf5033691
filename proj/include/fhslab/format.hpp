#pragma once

#include <string>
#include <string_view>

namespace fhs {

// Shortest decimal string that reads back to the same double.
std::string fmt_double(double v);
// Strict parse of a full string; throws invalid_data on failure.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

std::string_view trim(std::string_view s);

}  // namespace fhs
