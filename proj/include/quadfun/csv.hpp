#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace quadfun::csv {

/// Splits one line on commas and trims surrounding blanks from each field.
std::vector<std::string_view> split(std::string_view line);

/// Strict numeric parsing: the whole field must be consumed.
std::optional<double> parse_double(std::string_view field);
std::optional<long long> parse_integer(std::string_view field);

/// Reads records, skipping blank lines and '#' comments. If the first record's
/// first field is not numeric it is treated as a header and skipped.
void for_each_record(
    std::istream& in,
    const std::function<void(std::size_t line,
                             const std::vector<std::string_view>& fields)>& visit);

}  // namespace quadfun::csv
