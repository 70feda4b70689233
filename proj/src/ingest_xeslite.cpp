// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "genlog/error.hpp"
#include "genlog/ingest.hpp"
#include "genlog/numfmt.hpp"
#include "genlog/timefmt.hpp"

namespace genlog {
namespace {

namespace pt = boost::property_tree;

std::optional<std::string> attr(const pt::ptree& node, const char* name) {
  const auto attrs = node.get_child_optional("<xmlattr>");
  if (!attrs) return std::nullopt;
  const auto v = attrs->get_optional<std::string>(name);
  if (!v) return std::nullopt;
  return *v;
}

std::string required_attr(const pt::ptree& node, const char* element, const char* name) {
  auto v = attr(node, name);
  if (!v) throw ParseError(std::string("<") + element + "> is missing attribute '" + name + "'", 0);
  return *v;
}

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += "&#9;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

LogFile parse_log_xeslite(std::string_view text) {
  pt::ptree doc;
  std::istringstream in{std::string(text)};
  try {
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(e.message(), e.line());
  }

  const pt::ptree* trace = nullptr;
  for (const auto& [name, child] : doc) {
    if (name == "trace") {
      if (trace) throw ParseError("more than one <trace>", 0);
      trace = &child;
    } else if (name != "<xmlcomment>") {
      throw ParseError("unexpected top-level element <" + name + ">", 0);
    }
  }
  if (!trace) throw ParseError("missing <trace>", 0);

  LogFile log;
  log.id = required_attr(*trace, "trace", "id");
  if (auto b = attr(*trace, "batch")) log.batch = BatchId(*b);

  for (const auto& [name, child] : *trace) {
    if (name == "<xmlattr>" || name == "<xmlcomment>") continue;
    if (name == "meta") {
      const std::string k = required_attr(child, "meta", "key");
      if (k == "id" || k == "batch") throw ParseError("reserved meta key '" + k + "'", 0);
      if (!log.meta.emplace(k, required_attr(child, "meta", "value")).second)
        throw ParseError("duplicate meta key '" + k + "'", 0);
      continue;
    }
    if (name != "event") throw ParseError("unexpected element <" + name + "> in <trace>", 0);

    Event ev;
    ev.name = required_attr(child, "event", "name");
    const std::string time = required_attr(child, "event", "time");
    try {
      ev.time = parse_iso8601(time);
    } catch (const Error& e) {
      throw ParseError(std::string("event '") + ev.name + "': " + e.what(), 0);
    }
    for (const auto& [vname, val] : child) {
      if (vname == "<xmlattr>" || vname == "<xmlcomment>") continue;
      if (vname != "val") throw ParseError("unexpected element <" + vname + "> in <event>", 0);
      const std::string k = required_attr(val, "val", "key");
      const std::string v = required_attr(val, "val", "v");
      const auto num = parse_double(v);
      if (!num || !std::isfinite(*num)) throw ParseError("reading '" + k + "' is not a finite number: '" + v + "'", 0);
      if (k.empty()) throw ParseError("empty metric key", 0);
      if (!ev.readings.emplace(MetricId(k), *num).second) throw ParseError("duplicate reading '" + k + "'", 0);
    }
    log.events.push_back(std::move(ev));
  }
  if (log.events.empty()) throw ParseError("log has no events", 0);

  if (!std::is_sorted(log.events.begin(), log.events.end(),
                      [](const Event& a, const Event& b) { return a.time < b.time; })) {
    std::stable_sort(log.events.begin(), log.events.end(),
                     [](const Event& a, const Event& b) { return a.time < b.time; });
    log.meta["reordered"] = "true";
  }
  return log;
}

std::string write_log_xeslite(const LogFile& log) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<trace id=\"" + escape(log.id) + "\"";
  if (!log.batch.empty()) out += " batch=\"" + escape(log.batch.str()) + "\"";
  out += ">\n";
  for (const auto& [k, v] : log.meta) out += "  <meta key=\"" + escape(k) + "\" value=\"" + escape(v) + "\"/>\n";
  for (const auto& e : log.events) {
    out += "  <event name=\"" + escape(e.name) + "\" time=\"" + format_iso8601(e.time) + "\"";
    if (e.readings.empty()) {
      out += "/>\n";
      continue;
    }
    out += ">\n";
    for (const auto& [metric, value] : e.readings)
      out += "    <val key=\"" + escape(metric.str()) + "\" v=\"" + format_double(value) + "\"/>\n";
    out += "  </event>\n";
  }
  out += "</trace>\n";
  return out;
}

}  // namespace genlog
