// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace genlog {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Strict parse of the whole string; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);

}  // namespace genlog
