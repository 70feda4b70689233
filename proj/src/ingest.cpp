// SPDX-License-Identifier: Apache-2.0
#include "genlog/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "genlog/error.hpp"
#include "genlog/numfmt.hpp"

namespace genlog {

LogFile parse_log(std::string_view text, LogFormat format) {
  return format == LogFormat::xeslite ? parse_log_xeslite(text) : parse_log_yamlite(text);
}

std::string write_log(const LogFile& log, LogFormat format) {
  return format == LogFormat::xeslite ? write_log_xeslite(log) : write_log_yamlite(log);
}

LogFormat sniff_format(std::string_view text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '<' ? LogFormat::xeslite : LogFormat::yamlite;
  }
  return LogFormat::yamlite;
}

std::optional<LogFormat> format_from_filename(std::string_view filename) {
  auto ends = [&](std::string_view suffix) { return filename.ends_with(suffix); };
  if (ends(".xml") || ends(".xes")) return LogFormat::xeslite;
  if (ends(".yaml") || ends(".yml")) return LogFormat::yamlite;
  return std::nullopt;
}

Extraction extract_series(const LogFile& log, const IngestConfig& cfg) {
  Extraction out;
  std::vector<MetricId> wanted;
  const auto observed = observed_metrics(log);
  if (cfg.metrics.empty()) {
    wanted.assign(observed.begin(), observed.end());
  } else {
    for (const auto& m : cfg.metrics) {
      if (observed.contains(m)) {
        if (std::find(wanted.begin(), wanted.end(), m) == wanted.end()) wanted.push_back(m);
      } else {
        out.warnings.push_back("log '" + log.id + "': metric '" + m.str() + "' not present");
      }
    }
  }

  for (const auto& metric : wanted) {
    Series s{metric, log.id, {}};
    for (const auto& e : log.events) {
      const auto it = e.readings.find(metric);
      if (it == e.readings.end()) continue;
      if (!s.samples.empty() && s.samples.back().time == e.time) {
        s.samples.back().value = it->second;  // later duplicate wins
      } else {
        s.samples.push_back(Sample{e.time, it->second});
      }
    }
    out.series.push_back(std::move(s));
  }
  return out;
}

BatchId resolve_batch(const IngestConfig& cfg, std::string_view filename, const LogFile& log) {
  if (const auto it = cfg.batch_of.find(log.id); it != cfg.batch_of.end()) return it->second;
  if (cfg.batch_from_prefix && filename.starts_with("batch")) {
    std::size_t k = 5;
    while (k < filename.size() && std::isdigit(static_cast<unsigned char>(filename[k]))) ++k;
    if (k > 5 && k < filename.size() && filename[k] == '_') return BatchId(std::string(filename.substr(0, k)));
  }
  if (!log.batch.empty()) return log.batch;
  return BatchId("unbatched");
}

Catalog build_catalog(std::vector<LogFile> logs, const IngestConfig& cfg, std::vector<std::string>* warnings) {
  Catalog cat;
  for (const auto& log : logs) {
    if (log.batch.empty()) throw Error("log '" + log.id + "' has no batch");
    auto ex = extract_series(log, cfg);
    if (warnings) warnings->insert(warnings->end(), ex.warnings.begin(), ex.warnings.end());
    for (auto& s : ex.series) {
      SeriesKey key{log.batch, s.metric, log.id};
      if (!cat.index.emplace(key, std::move(s)).second) throw Error("duplicate log id '" + log.id + "'");
    }
  }
  cat.logs = std::move(logs);
  return cat;
}

std::string write_series_csv(const Series& series) {
  std::string out = "timestamp_ms,value\n";
  for (const auto& s : series.samples) {
    out += std::to_string(s.time.ms);
    out += ',';
    out += format_double(s.value);
    out += '\n';
  }
  return out;
}

Series read_series_csv(std::string_view text, MetricId metric, std::string source_log) {
  Series s{std::move(metric), std::move(source_log), {}};
  std::size_t row = 0;
  bool header = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (header) {
      if (line != "timestamp_ms,value") throw ParseError("bad CSV header '" + std::string(line) + "'", 1);
      header = false;
      continue;
    }
    ++row;
    if (line.empty() && text.empty()) break;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) throw ParseError("row " + std::to_string(row) + ": expected two fields", row + 1);
    const auto ts = parse_int(line.substr(0, comma));
    const auto v = parse_double(line.substr(comma + 1));
    if (!ts) throw ParseError("row " + std::to_string(row) + ": timestamp is not an integer", row + 1);
    if (!v || !std::isfinite(*v)) throw ParseError("row " + std::to_string(row) + ": value is not a finite number", row + 1);
    if (!s.samples.empty() && *ts <= s.samples.back().time.ms)
      throw ParseError("row " + std::to_string(row) + ": timestamps must be strictly increasing", row + 1);
    s.samples.push_back(Sample{Timestamp{*ts}, *v});
  }
  if (header) throw ParseError("empty CSV", 1);
  return s;
}

}  // namespace genlog
