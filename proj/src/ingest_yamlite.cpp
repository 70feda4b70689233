// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "genlog/error.hpp"
#include "genlog/ingest.hpp"
#include "genlog/numfmt.hpp"
#include "genlog/timefmt.hpp"

namespace genlog {
namespace {

struct Line {
  std::size_t number = 0;
  std::size_t indent = 0;
  bool item = false;  // starts with "- "
  std::string key;
  std::optional<std::string> value;  // nullopt for "key:" opening a block
};

std::string parse_quoted(std::string_view s, std::size_t& pos, std::size_t line) {
  const char quote = s[pos++];
  std::string out;
  while (pos < s.size()) {
    const char c = s[pos++];
    if (c == quote) {
      if (quote == '\'' && pos < s.size() && s[pos] == '\'') {
        out.push_back('\'');
        ++pos;
        continue;
      }
      return out;
    }
    if (quote == '"' && c == '\\') {
      if (pos >= s.size()) break;
      const char e = s[pos++];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: throw ParseError(std::string("unknown escape '\\") + e + "'", line);
      }
      continue;
    }
    out.push_back(c);
  }
  throw ParseError("unterminated quoted string", line);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string parse_scalar(std::string_view raw, std::size_t line) {
  raw = trim(raw);
  if (!raw.empty() && (raw.front() == '"' || raw.front() == '\'')) {
    std::size_t pos = 0;
    std::string v = parse_quoted(raw, pos, line);
    if (!trim(raw.substr(pos)).empty()) throw ParseError("text after quoted scalar", line);
    return v;
  }
  return std::string(raw);
}

std::optional<Line> tokenize(std::string_view text, std::size_t number) {
  if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
  std::size_t indent = 0;
  while (indent < text.size() && text[indent] == ' ') ++indent;
  std::string_view rest = text.substr(indent);
  if (rest.empty() || rest.front() == '#') return std::nullopt;
  if (rest.front() == '\t') throw ParseError("tab in indentation", number);
  if (indent % 2 != 0) throw ParseError("indentation must be a multiple of two spaces", number);

  Line line;
  line.number = number;
  line.indent = indent;
  if (rest.starts_with("- ")) {
    line.item = true;
    rest.remove_prefix(2);
    line.indent += 2;
  } else if (rest == "-") {
    throw ParseError("empty list item", number);
  }

  std::size_t pos = 0;
  if (!rest.empty() && (rest.front() == '"' || rest.front() == '\'')) {
    line.key = parse_quoted(rest, pos, number);
    if (pos >= rest.size() || rest[pos] != ':') throw ParseError("expected ':' after key", number);
  } else {
    pos = rest.find(':');
    if (pos == std::string_view::npos) throw ParseError("expected 'key: value'", number);
    line.key = std::string(trim(rest.substr(0, pos)));
    if (line.key.empty()) throw ParseError("empty key", number);
  }
  const std::string_view after = rest.substr(pos + 1);
  if (!after.empty() && after.front() != ' ') throw ParseError("expected space after ':'", number);
  if (!trim(after).empty()) line.value = parse_scalar(after, number);
  return line;
}

double parse_reading(const std::string& text, const std::string& metric, std::size_t line) {
  const auto v = parse_double(text);
  if (!v) throw ParseError("reading '" + metric + "' is not a number: '" + text + "'", line);
  if (!std::isfinite(*v)) throw ParseError("reading '" + metric + "' is not finite", line);
  return *v;
}

bool needs_quotes(std::string_view s) {
  if (s.empty()) return true;
  if (s.front() == ' ' || s.back() == ' ') return true;
  if (s.front() == '"' || s.front() == '\'' || s.front() == '#') return true;
  if (s == "-" || s.starts_with("- ")) return true;
  return std::any_of(s.begin(), s.end(), [](char c) { return c == '\n' || c == '\r' || c == '\t' || c == '\\'; });
}

bool key_needs_quotes(std::string_view s) {
  return needs_quotes(s) || s.find(':') != std::string_view::npos || s.find('"') != std::string_view::npos;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string scalar(std::string_view s) { return needs_quotes(s) ? quote(s) : std::string(s); }
std::string key(std::string_view s) { return key_needs_quotes(s) ? quote(s) : std::string(s); }

struct PendingEvent {
  std::size_t line = 0;
  std::optional<std::string> name;
  std::optional<Timestamp> time;
  std::map<MetricId, double> readings;
};

}  // namespace

LogFile parse_log_yamlite(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  while (!text.empty() || number == 0) {
    ++number;
    const auto nl = text.find('\n');
    const std::string_view raw = text.substr(0, nl);
    if (auto line = tokenize(raw, number)) lines.push_back(std::move(*line));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }

  LogFile log;
  bool saw_log = false;
  bool saw_events = false;
  bool saw_id = false;
  enum class Section { none, log, events } section = Section::none;
  std::vector<PendingEvent> pending;
  bool in_data = false;

  for (const Line& line : lines) {
    if (line.indent == 0) {
      if (line.item) throw ParseError("list item at top level", line.number);
      if (line.key == "log") {
        if (saw_log) throw ParseError("duplicate 'log' section", line.number);
        if (line.value) throw ParseError("'log' must be a mapping", line.number);
        saw_log = true;
        section = Section::log;
      } else if (line.key == "events") {
        if (saw_events) throw ParseError("duplicate 'events' section", line.number);
        if (line.value && *line.value != "[]") throw ParseError("'events' must be a list", line.number);
        saw_events = true;
        section = Section::events;
      } else {
        throw ParseError("unknown top-level key '" + line.key + "'", line.number);
      }
      continue;
    }

    if (section == Section::log) {
      if (line.indent != 2 || line.item) throw ParseError("unexpected indentation in 'log'", line.number);
      if (!line.value) throw ParseError("log key '" + line.key + "' has no value", line.number);
      if (line.key == "id") {
        log.id = *line.value;
        saw_id = true;
      } else if (line.key == "batch") {
        log.batch = BatchId(*line.value);
      } else if (!log.meta.emplace(line.key, *line.value).second) {
        throw ParseError("duplicate log key '" + line.key + "'", line.number);
      }
      continue;
    }

    if (section != Section::events) throw ParseError("content outside a section", line.number);

    if (line.item) {
      if (line.indent != 4) throw ParseError("event items must be indented by two spaces", line.number);
      pending.push_back(PendingEvent{line.number, {}, {}, {}});
      in_data = false;
    } else if (pending.empty()) {
      throw ParseError("expected '- ' to start an event", line.number);
    }
    PendingEvent& ev = pending.back();

    if (line.indent == 4) {
      in_data = false;
      if (line.key == "name") {
        if (ev.name) throw ParseError("duplicate 'name'", line.number);
        ev.name = line.value.value_or("");
      } else if (line.key == "time") {
        if (ev.time) throw ParseError("duplicate 'time'", line.number);
        if (!line.value) throw ParseError("'time' has no value", line.number);
        try {
          ev.time = parse_iso8601(*line.value);
        } catch (const Error& e) {
          throw ParseError(e.what(), line.number);
        }
      } else if (line.key == "data") {
        if (line.value && *line.value != "{}") throw ParseError("'data' must be a mapping", line.number);
        in_data = !line.value.has_value();
      } else {
        throw ParseError("unknown event key '" + line.key + "'", line.number);
      }
    } else if (line.indent == 6 && in_data) {
      if (!line.value) throw ParseError("reading '" + line.key + "' has no value", line.number);
      const double v = parse_reading(*line.value, line.key, line.number);
      if (!ev.readings.emplace(MetricId(line.key), v).second)
        throw ParseError("duplicate reading '" + line.key + "'", line.number);
    } else {
      throw ParseError("unexpected indentation", line.number);
    }
  }

  if (!saw_log) throw ParseError("missing 'log' section", 0);
  if (!saw_id) throw ParseError("missing log id", 0);
  if (!saw_events || pending.empty()) throw ParseError("log has no events", 0);

  log.events.reserve(pending.size());
  for (auto& ev : pending) {
    if (!ev.name) throw ParseError("event without 'name'", ev.line);
    if (!ev.time) throw ParseError("event without 'time'", ev.line);
    log.events.push_back(Event{std::move(*ev.name), *ev.time, std::move(ev.readings)});
  }
  if (!std::is_sorted(log.events.begin(), log.events.end(),
                      [](const Event& a, const Event& b) { return a.time < b.time; })) {
    std::stable_sort(log.events.begin(), log.events.end(),
                     [](const Event& a, const Event& b) { return a.time < b.time; });
    log.meta["reordered"] = "true";
  }
  return log;
}

std::string write_log_yamlite(const LogFile& log) {
  std::string out = "log:\n  id: " + scalar(log.id) + "\n";
  if (!log.batch.empty()) out += "  batch: " + scalar(log.batch.str()) + "\n";
  for (const auto& [k, v] : log.meta) out += "  " + key(k) + ": " + scalar(v) + "\n";
  out += "events:\n";
  for (const auto& e : log.events) {
    out += "  - name: " + scalar(e.name) + "\n";
    out += "    time: " + format_iso8601(e.time) + "\n";
    if (!e.readings.empty()) {
      out += "    data:\n";
      for (const auto& [metric, value] : e.readings)
        out += "      " + key(metric.str()) + ": " + format_double(value) + "\n";
    }
  }
  return out;
}

}  // namespace genlog
