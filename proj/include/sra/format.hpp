#pragma once

#include <string>
#include <string_view>

namespace sra {

/// Shortest decimal string that parses back to exactly `value`.
std::string shortest(double value);

/// Parses a full decimal field; throws std::invalid_argument on trailing junk.
double parse_double(std::string_view text);

}  // namespace sra
