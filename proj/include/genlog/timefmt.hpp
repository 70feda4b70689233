// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

#include "genlog/types.hpp"

namespace genlog {

/// Parses `YYYY-MM-DDTHH:MM:SS[.fff...](Z|+HH:MM|-HH:MM)`. Digits beyond the
/// millisecond are truncated. Throws Error on malformed input.
Timestamp parse_iso8601(std::string_view text);

/// Formats as `YYYY-MM-DDTHH:MM:SS.mmm+00:00`.
std::string format_iso8601(Timestamp t);

}  // namespace genlog
