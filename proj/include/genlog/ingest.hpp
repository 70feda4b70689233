// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "genlog/types.hpp"

namespace genlog {

struct IngestConfig {
  /// Metrics to extract; empty selects every metric observed in a log.
  std::vector<MetricId> metrics;
  /// Explicit log id -> batch assignment. Checked before the filename rule.
  std::map<std::string, BatchId> batch_of;
  /// Derive the batch from a `batchNN_` filename prefix.
  bool batch_from_prefix = true;
};

enum class LogFormat { yamlite, xeslite };

// YAML-lite interchange format:
//
//   log:
//     id: gv12_like_01
//     batch: batch14          (optional)
//     <key>: <value>          (kept verbatim in LogFile::meta)
//   events:
//     - name: <label>
//       time: 2021-03-04T10:00:00.000+00:00
//       data:                 (optional)
//         <metric>: <number>
//
// Two-space indentation, `#` full-line comments, plain or double-quoted
// scalars. Events that appear out of time order are stably re-sorted and
// meta["reordered"] is set to "true".
LogFile parse_log_yamlite(std::string_view text);
std::string write_log_yamlite(const LogFile& log);

// XES-lite: a single <trace id=".." [batch=".."]> holding optional
// <meta key=".." value=".."/> and <event name=".." time=".."> children, each
// event with zero or more <val key=".." v=".."/> children.
LogFile parse_log_xeslite(std::string_view text);
std::string write_log_xeslite(const LogFile& log);

LogFile parse_log(std::string_view text, LogFormat format);
std::string write_log(const LogFile& log, LogFormat format);

/// Guesses the format from the first non-blank character.
LogFormat sniff_format(std::string_view text);
/// `.xml`/`.xes` -> xeslite, `.yaml`/`.yml` -> yamlite, anything else nullopt.
std::optional<LogFormat> format_from_filename(std::string_view filename);

struct Extraction {
  std::vector<Series> series;
  std::vector<std::string> warnings;
};

/// One Series per requested metric present in the log. When several events
/// share a timestamp, the later reading for that metric wins.
Extraction extract_series(const LogFile& log, const IngestConfig& cfg);

/// Batch for a log: explicit map, then `batchNN_` filename prefix, then the
/// batch recorded in the log itself, then "unbatched".
BatchId resolve_batch(const IngestConfig& cfg, std::string_view filename, const LogFile& log);

/// Builds the series index. `batch` must already be set on every log.
Catalog build_catalog(std::vector<LogFile> logs, const IngestConfig& cfg,
                      std::vector<std::string>* warnings = nullptr);

/// CSV intermediate: header `timestamp_ms,value`, one row per sample, LF newlines.
std::string write_series_csv(const Series& series);
Series read_series_csv(std::string_view text, MetricId metric = {}, std::string source_log = {});

}  // namespace genlog
