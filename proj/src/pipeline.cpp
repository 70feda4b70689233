// SPDX-License-Identifier: Apache-2.0
#include "genlog/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "genlog/error.hpp"
#include "genlog/numfmt.hpp"
#include "genlog/random.hpp"
#include "genlog/resample.hpp"

namespace genlog {
namespace {

using nlohmann::json;

constexpr const char* kCatalogFormat = "genlog-catalog/1";

std::string safe_name(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' ||
                    c == '_' || c == '-';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

std::string part_name(std::size_t part) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "part_%04zu", part);
  return buf;
}

const char* format_name(LogFormat f) { return f == LogFormat::xeslite ? "xeslite" : "yamlite"; }

LogFormat format_from_name(const std::string& s) {
  if (s == "xeslite") return LogFormat::xeslite;
  if (s == "yamlite") return LogFormat::yamlite;
  throw Error("unknown log format '" + s + "'");
}

const char* format_extension(LogFormat f) { return f == LogFormat::xeslite ? ".xes.xml" : ".log.yaml"; }

json read_json(const fs::path& path) {
  if (!fs::exists(path)) throw Error("missing " + path.string());
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error("malformed JSON in " + path.string() + ": " + e.what());
  }
}

Outcome outcome_of(std::size_t ok, std::size_t failed) {
  if (failed == 0) return Outcome::success;
  if (ok == 0) return Outcome::total_failure;
  return Outcome::partial_failure;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
}

std::vector<double> read_csv_values(const fs::path& path) {
  const Series s = read_series_csv(read_file(path));
  std::vector<double> v;
  v.reserve(s.samples.size());
  for (const auto& smp : s.samples) v.push_back(smp.value);
  return v;
}

struct ManifestEntry {
  MetricId metric;
  std::string file;
  Provenance provenance;
};

struct GenManifest {
  std::uint64_t seed = 0;
  SelectionSet selection;
  std::vector<std::vector<ManifestEntry>> parts;
};

GenManifest load_gen_manifest(const fs::path& gen_dir) {
  const json j = read_json(gen_dir / "manifest.json");
  GenManifest m;
  try {
    m.seed = j.at("seed").get<std::uint64_t>();
    m.selection = selection_from_json(j.at("selection"));
    for (const auto& p : j.at("parts")) {
      std::vector<ManifestEntry> entries;
      for (const auto& s : p.at("series")) {
        entries.push_back(ManifestEntry{MetricId(s.at("metric").get<std::string>()),
                                        p.at("dir").get<std::string>() + "/" + s.at("file").get<std::string>(),
                                        Provenance{BatchId(s.at("model_batch").get<std::string>()),
                                                   BatchId(s.at("input_batch").get<std::string>()),
                                                   s.at("input_log").get<std::string>()}});
      }
      m.parts.push_back(std::move(entries));
    }
  } catch (const json::exception& e) {
    throw Error("malformed generation manifest: " + std::string(e.what()));
  }
  return m;
}

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- catalog index

const CatalogIndex::LogEntry* CatalogIndex::find_log(const std::string& id) const {
  const auto it = std::find_if(logs.begin(), logs.end(), [&](const LogEntry& e) { return e.id == id; });
  return it == logs.end() ? nullptr : &*it;
}

const CatalogIndex::SeriesEntry* CatalogIndex::find_series(const SeriesKey& key) const {
  const auto it = std::find_if(series.begin(), series.end(), [&](const SeriesEntry& e) { return e.key == key; });
  return it == series.end() ? nullptr : &*it;
}

bool CatalogIndex::has_cell(const MetricId& metric, const BatchId& batch) const {
  return std::any_of(series.begin(), series.end(),
                     [&](const SeriesEntry& e) { return e.key.metric == metric && e.key.batch == batch; });
}

json to_json(const CatalogIndex& index) {
  json logs = json::array();
  for (const auto& l : index.logs)
    logs.push_back({{"id", l.id}, {"batch", l.batch.str()}, {"file", l.file}, {"format", format_name(l.format)}});
  json series = json::array();
  for (const auto& s : index.series)
    series.push_back({{"batch", s.key.batch.str()},
                      {"metric", s.key.metric.str()},
                      {"log", s.key.log},
                      {"file", s.file},
                      {"samples", s.samples}});
  json metrics = json::array();
  for (const auto& m : index.metrics) metrics.push_back(m.str());
  json batches = json::array();
  for (const auto& b : index.batches) batches.push_back(b.str());
  return {{"format", kCatalogFormat}, {"dt_ms", index.dt_ms},       {"metrics", metrics},
          {"batches", batches},       {"logs", logs},               {"series", series},
          {"failures", index.failures}, {"warnings", index.warnings}};
}

CatalogIndex catalog_index_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kCatalogFormat) throw Error("unsupported catalog format");
    CatalogIndex idx;
    idx.dt_ms = j.at("dt_ms").get<Millis>();
    for (const auto& m : j.at("metrics")) idx.metrics.emplace_back(m.get<std::string>());
    for (const auto& b : j.at("batches")) idx.batches.emplace_back(b.get<std::string>());
    for (const auto& l : j.at("logs"))
      idx.logs.push_back({l.at("id").get<std::string>(), BatchId(l.at("batch").get<std::string>()),
                          l.at("file").get<std::string>(), format_from_name(l.at("format").get<std::string>())});
    for (const auto& s : j.at("series"))
      idx.series.push_back({SeriesKey{BatchId(s.at("batch").get<std::string>()),
                                      MetricId(s.at("metric").get<std::string>()), s.at("log").get<std::string>()},
                            s.at("file").get<std::string>(), s.at("samples").get<std::size_t>()});
    idx.failures = j.at("failures").get<std::vector<std::string>>();
    idx.warnings = j.at("warnings").get<std::vector<std::string>>();
    return idx;
  } catch (const json::exception& e) {
    throw Error("malformed catalog index: " + std::string(e.what()));
  }
}

CatalogIndex load_catalog_index(const Layout& layout) {
  return catalog_index_from_json(read_json(layout.index_file()));
}

LogFile load_catalog_log(const Layout& layout, const CatalogIndex::LogEntry& entry) {
  LogFile log = parse_log(read_file(layout.catalog_logs() / entry.file), entry.format);
  log.batch = entry.batch;
  return log;
}

Series load_catalog_series(const Layout& layout, const CatalogIndex::SeriesEntry& entry) {
  return read_series_csv(read_file(layout.catalog() / entry.file), entry.key.metric, entry.key.log);
}

UniformSeries load_uniform(const Layout& layout, const CatalogIndex& index, const SeriesKey& key) {
  const auto* entry = index.find_series(key);
  if (!entry) throw Error("no series " + key.batch.str() + "/" + key.metric.str() + "/" + key.log);
  return to_uniform(load_catalog_series(layout, *entry), index.dt_ms);
}

// ---------------------------------------------------------------- ingest

IngestSummary run_ingest(const fs::path& input_dir, const Layout& layout, const IngestConfig& cfg) {
  if (!fs::is_directory(input_dir)) throw Error("input directory " + input_dir.string() + " does not exist");

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(input_dir))
    if (entry.is_regular_file() && format_from_filename(entry.path().filename().string())) files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  IngestSummary sum;
  CatalogIndex& idx = sum.index;
  std::vector<LogFile> logs;
  std::vector<std::pair<std::string, LogFormat>> sources;  // filename, format
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    try {
      const std::string text = read_file(path);
      const LogFormat fmt = *format_from_filename(name);
      LogFile log = parse_log(text, fmt);
      if (std::any_of(logs.begin(), logs.end(), [&](const LogFile& l) { return l.id == log.id; }))
        throw Error("duplicate log id '" + log.id + "'");
      log.batch = resolve_batch(cfg, name, log);
      logs.push_back(std::move(log));
      sources.emplace_back(name, fmt);
    } catch (const std::exception& e) {
      idx.failures.push_back(name + ": " + e.what());
    }
  }
  sum.parsed = logs.size();
  sum.failed = idx.failures.size();
  sum.outcome = outcome_of(sum.parsed, sum.failed);
  if (files.empty()) {
    idx.failures.push_back("no log files in " + input_dir.string());
    sum.outcome = Outcome::total_failure;
  }

  fs::remove_all(layout.catalog());
  fs::create_directories(layout.catalog_logs());

  Catalog cat = build_catalog(logs, cfg, &idx.warnings);
  std::vector<Series> for_dt;
  for (const auto& [key, s] : cat.index) for_dt.push_back(s);
  try {
    idx.dt_ms = common_dt(for_dt);
  } catch (const Error& e) {
    idx.dt_ms = 1;
    idx.warnings.push_back(std::string("sample interval: ") + e.what());
  }

  std::set<std::string> used;
  for (const auto& [key, s] : cat.index) {
    std::string rel = safe_name(key.batch.str()) + "/" + safe_name(key.metric.str()) + "/" + safe_name(key.log);
    std::string file = rel + ".csv";
    for (int n = 1; used.contains(file); ++n) file = rel + "~" + std::to_string(n) + ".csv";
    used.insert(file);
    write_file_atomic(layout.catalog() / file, write_series_csv(s));
    idx.series.push_back({key, file, s.samples.size()});
  }
  for (std::size_t k = 0; k < cat.logs.size(); ++k) {
    const auto& [name, fmt] = sources[k];
    fs::copy_file(input_dir / name, layout.catalog_logs() / name, fs::copy_options::overwrite_existing);
    idx.logs.push_back({cat.logs[k].id, cat.logs[k].batch, name, fmt});
  }
  for (const auto& m : cat.metrics()) idx.metrics.push_back(m);
  for (const auto& b : cat.batches()) idx.batches.push_back(b);

  write_file_atomic(layout.index_file(), to_json(idx).dump(1) + "\n");
  return sum;
}

// ---------------------------------------------------------------- train

std::string model_filename(const MetricId& metric, const BatchId& batch) {
  return safe_name(metric.str()) + "__" + safe_name(batch.str()) + ".json";
}

fs::path model_path(const Layout& layout, const MetricId& metric, const BatchId& batch) {
  return layout.models() / model_filename(metric, batch);
}

ModelRecord train_cell(const Layout& layout, const CatalogIndex& index, const MetricId& metric, const BatchId& batch,
                       TrainConfig cfg, std::uint64_t seed) {
  std::vector<UniformSeries> inputs;
  std::size_t longest = 0;
  for (const auto& e : index.series) {
    if (e.key.metric != metric || e.key.batch != batch) continue;
    const Series s = load_catalog_series(layout, e);
    longest = std::max(longest, s.samples.size());
    if (s.samples.size() >= 2) inputs.push_back(to_uniform(s, index.dt_ms));
  }
  if (!index.has_cell(metric, batch)) throw Error("unknown cell " + metric.str() + "/" + batch.str());
  if (inputs.empty())
    throw Error("series too short: need at least 2 samples, got " + std::to_string(longest));

  cfg.seed = derive_seed(seed, metric.str() + "\x1f" + batch.str());
  ModelRecord rec = train(inputs, cfg);
  rec.batch = batch;
  fs::create_directories(layout.models());
  save_model(rec, model_path(layout, metric, batch));
  return rec;
}

TrainSummary run_train(const Layout& layout, const TrainConfig& cfg, std::uint64_t seed,
                       const std::vector<MetricId>& metrics, unsigned workers) {
  const CatalogIndex index = load_catalog_index(layout);
  std::vector<Cell> cells;
  for (const auto& m : index.metrics) {
    if (!metrics.empty() && std::find(metrics.begin(), metrics.end(), m) == metrics.end()) continue;
    for (const auto& b : index.batches)
      if (index.has_cell(m, b)) cells.emplace_back(m, b);
  }

  TrainSummary sum;
  sum.models.resize(cells.size());
  parallel_for(cells.size(), workers, [&](std::size_t i) {
    TrainOutcome& out = sum.models[i];
    out.metric = cells[i].first;
    out.batch = cells[i].second;
    try {
      const ModelRecord rec = train_cell(layout, index, out.metric, out.batch, cfg, seed);
      out.ok = true;
      out.stopped_epoch = rec.stopped_epoch;
      out.first_loss = rec.loss_history.front();
      out.final_loss = rec.loss_history.back();
      out.best_loss = rec.best_loss();
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });

  json models = json::array();
  std::size_t ok = 0;
  for (const auto& m : sum.models) {
    json entry = {{"metric", m.metric.str()}, {"batch", m.batch.str()}, {"ok", m.ok}};
    if (m.ok) {
      ++ok;
      entry["file"] = model_filename(m.metric, m.batch);
      entry["stopped_epoch"] = m.stopped_epoch;
      entry["first_loss"] = m.first_loss;
      entry["final_loss"] = m.final_loss;
      entry["best_loss"] = m.best_loss;
    } else {
      entry["error"] = m.error;
    }
    models.push_back(std::move(entry));
  }
  sum.outcome = cells.empty() ? Outcome::total_failure : outcome_of(ok, cells.size() - ok);
  write_file_atomic(layout.models() / "manifest.json",
                    json{{"seed", seed}, {"config", to_json(cfg)}, {"models", models}}.dump(1) + "\n");
  return sum;
}

// ---------------------------------------------------------------- selection

SelectionSet selection_from_cells(const CatalogIndex& index, const std::set<Cell>& active) {
  SelectionSet sel;
  for (const auto& [metric, batch] : active) {
    auto& ms = sel[metric];
    ms.models.insert(batch);
    for (const auto& e : index.series)
      if (e.key.metric == metric && e.key.batch == batch && e.samples >= 2) ms.inputs.insert(InputRef{batch, e.key.log});
  }
  return sel;
}

std::set<Cell> trained_cells(const Layout& layout, const CatalogIndex& index, const std::vector<MetricId>& metrics) {
  std::set<Cell> out;
  for (const auto& e : index.series) {
    if (!metrics.empty() && std::find(metrics.begin(), metrics.end(), e.key.metric) == metrics.end()) continue;
    if (fs::exists(model_path(layout, e.key.metric, e.key.batch))) out.emplace(e.key.metric, e.key.batch);
  }
  return out;
}

std::set<Cell> load_active_cells(const Layout& layout) {
  std::set<Cell> out;
  if (!fs::exists(layout.selection_file())) return out;
  const json j = read_json(layout.selection_file());
  for (const auto& c : j.at("active")) out.emplace(MetricId(c.at("metric").get<std::string>()),
                                                   BatchId(c.at("batch").get<std::string>()));
  return out;
}

void save_active_cells(const Layout& layout, const std::set<Cell>& active) {
  json arr = json::array();
  for (const auto& [m, b] : active) arr.push_back({{"metric", m.str()}, {"batch", b.str()}});
  write_file_atomic(layout.selection_file(), json{{"active", arr}}.dump(1) + "\n");
}

Registry load_registry(const Layout& layout, const CatalogIndex& index, const SelectionSet& selection) {
  Registry reg;
  for (const auto& [metric, sel] : selection) {
    for (const auto& b : sel.models) {
      const fs::path path = model_path(layout, metric, b);
      if (!fs::exists(path)) throw Error("missing model " + path.string());
      reg.add_model(load_model(path));
    }
    for (const auto& in : sel.inputs) reg.add_input(in, load_uniform(layout, index, SeriesKey{in.batch, metric, in.log}));
  }
  return reg;
}

json to_json(const SelectionSet& selection) {
  json out = json::object();
  for (const auto& [metric, sel] : selection) {
    json models = json::array();
    for (const auto& b : sel.models) models.push_back(b.str());
    json inputs = json::array();
    for (const auto& in : sel.inputs) inputs.push_back({{"batch", in.batch.str()}, {"log", in.log}});
    out[metric.str()] = {{"models", models}, {"inputs", inputs}};
  }
  return out;
}

SelectionSet selection_from_json(const json& j) {
  SelectionSet sel;
  for (const auto& [metric, v] : j.items()) {
    auto& ms = sel[MetricId(metric)];
    for (const auto& b : v.at("models")) ms.models.insert(BatchId(b.get<std::string>()));
    for (const auto& in : v.at("inputs"))
      ms.inputs.insert(InputRef{BatchId(in.at("batch").get<std::string>()), in.at("log").get<std::string>()});
  }
  return sel;
}

// ---------------------------------------------------------------- generate

GenerateSummary run_generate(const Layout& layout, const SelectionSet& selection, std::int64_t count,
                             std::uint64_t seed, const fs::path& gen_dir) {
  const CatalogIndex index = load_catalog_index(layout);
  const Registry registry = load_registry(layout, index, selection);

  // Inputs shorter than a model window cannot drive generation.
  SelectionSet usable = selection;
  for (auto& [metric, sel] : usable) {
    std::size_t need = 0;
    for (const auto& b : sel.models) need = std::max(need, registry.model(metric, b)->config.lookback + 1);
    std::erase_if(sel.inputs, [&](const InputRef& in) { return registry.input(metric, in)->values.size() < need; });
  }

  GenerateSummary sum;
  sum.parts = generate_batch(GenRequest{usable, count, seed}, registry);

  fs::remove_all(gen_dir);
  json parts = json::array();
  for (std::size_t p = 0; p < sum.parts.size(); ++p) {
    const std::string dir = part_name(p);
    json series = json::array();
    for (const auto& [metric, g] : sum.parts[p]) {
      Series s{metric, g.provenance.input_log, {}};
      for (std::size_t k = 0; k < g.values.size(); ++k)
        s.samples.push_back(Sample{Timestamp{g.t0.ms + static_cast<Millis>(k) * g.dt_ms}, g.values[k]});
      const std::string base = safe_name(metric.str());
      write_file_atomic(gen_dir / dir / (base + ".csv"), write_series_csv(s));
      const json side = {{"metric", metric.str()},
                         {"part", p},
                         {"seed", seed},
                         {"model_batch", g.provenance.model_batch.str()},
                         {"input_batch", g.provenance.input_batch.str()},
                         {"input_log", g.provenance.input_log},
                         {"t0_ms", g.t0.ms},
                         {"dt_ms", g.dt_ms},
                         {"length", g.values.size()}};
      write_file_atomic(gen_dir / dir / (base + ".json"), side.dump(1) + "\n");
      series.push_back({{"metric", metric.str()},
                        {"file", base + ".csv"},
                        {"model_batch", g.provenance.model_batch.str()},
                        {"input_batch", g.provenance.input_batch.str()},
                        {"input_log", g.provenance.input_log}});
    }
    parts.push_back({{"part", p}, {"dir", dir}, {"series", series}});
  }
  const json manifest = {{"seed", seed}, {"count", count}, {"selection", to_json(usable)}, {"parts", parts}};
  write_file_atomic(gen_dir / "manifest.json", manifest.dump(1) + "\n");
  return sum;
}

// ---------------------------------------------------------------- remap

RemapSummary run_remap(const Layout& layout, const fs::path& gen_dir, const fs::path& out_dir) {
  const CatalogIndex index = load_catalog_index(layout);
  const GenManifest manifest = load_gen_manifest(gen_dir);

  RemapSummary sum;
  fs::remove_all(out_dir);
  fs::create_directories(out_dir);
  json logs = json::array();
  for (std::size_t p = 0; p < manifest.parts.size(); ++p) {
    const auto& entries = manifest.parts[p];
    try {
      if (entries.empty()) throw Error("part has no series");
      const auto* tmpl_entry = index.find_log(entries.front().provenance.input_log);
      if (!tmpl_entry) throw Error("template log '" + entries.front().provenance.input_log + "' not in catalog");
      const LogFile tmpl = load_catalog_log(layout, *tmpl_entry);

      std::map<MetricId, std::vector<double>> values;
      std::vector<MetricId> metrics;
      RemappedLog out;
      for (const auto& e : entries) {
        if (count_metric_values(tmpl, e.metric) == 0) {
          out.report.notes.push_back("template has no '" + e.metric.str() + "' values; metric not embedded");
          continue;
        }
        values[e.metric] = read_csv_values(gen_dir / e.file);
        metrics.push_back(e.metric);
      }
      LogFile embedded = embed(tmpl, values, build_embed_plan(tmpl, metrics));

      const std::string stem = tmpl_entry->file.substr(0, tmpl_entry->file.find('.'));
      const std::string suffix = "_gen" + part_name(p).substr(5);
      embedded.id = tmpl.id + suffix;
      out.part = p;
      out.id = embedded.id;
      out.template_id = tmpl.id;
      out.file = stem + suffix + format_extension(tmpl_entry->format);
      const std::string text = write_log(embedded, tmpl_entry->format);
      write_file_atomic(out_dir / out.file, text);

      const LogFile reparsed = parse_log(text, tmpl_entry->format);
      RoundtripReport rep = roundtrip_check(tmpl, reparsed);
      rep.notes.insert(rep.notes.begin(), out.report.notes.begin(), out.report.notes.end());
      out.report = std::move(rep);
      logs.push_back({{"part", p},
                      {"id", out.id},
                      {"template", out.template_id},
                      {"file", out.file},
                      {"violations", out.report.violations},
                      {"notes", out.report.notes}});
      if (!out.report.ok()) sum.failures.push_back(part_name(p) + ": round-trip violations");
      sum.logs.push_back(std::move(out));
    } catch (const std::exception& e) {
      sum.failures.push_back(part_name(p) + ": " + e.what());
    }
  }
  sum.outcome = manifest.parts.empty() ? Outcome::total_failure
                                       : outcome_of(manifest.parts.size() - sum.failures.size(), sum.failures.size());
  write_file_atomic(out_dir / "manifest.json", json{{"logs", logs}, {"failures", sum.failures}}.dump(1) + "\n");
  return sum;
}

// ---------------------------------------------------------------- validate

json envelope_json(const Layout& layout, const CatalogIndex& index, const fs::path& gen_dir, const MetricId& metric) {
  const GenManifest manifest = load_gen_manifest(gen_dir);
  const auto sel = manifest.selection.find(metric);
  if (sel == manifest.selection.end()) throw Error("metric '" + metric.str() + "' was not generated");

  std::vector<std::vector<double>> generated;
  for (const auto& part : manifest.parts)
    for (const auto& e : part)
      if (e.metric == metric) generated.push_back(read_csv_values(gen_dir / e.file));
  if (generated.empty()) throw Error("no generated series for '" + metric.str() + "'");

  std::size_t len = 0;
  for (const auto& g : generated) len = std::max(len, g.size());
  for (auto& g : generated) g = resample_to_count(g, static_cast<std::int64_t>(len));

  json real = json::array();
  for (const auto& in : sel->second.inputs) {
    const UniformSeries u = load_uniform(layout, index, SeriesKey{in.batch, metric, in.log});
    real.push_back({{"batch", in.batch.str()},
                    {"log", in.log},
                    {"values", resample_to_count(u, static_cast<std::int64_t>(len))}});
  }

  json out = to_json(envelope(generated));
  out["metric"] = metric.str();
  out["samples"] = generated.size();
  out["real"] = std::move(real);
  return out;
}

ValidateSummary run_validate(const Layout& layout, const fs::path& gen_dir, const fs::path& reports_dir) {
  const CatalogIndex index = load_catalog_index(layout);
  const GenManifest manifest = load_gen_manifest(gen_dir);

  std::map<MetricId, std::vector<SeriesPair>> own, cross;
  std::map<MetricId, std::vector<double>> gen_values, orig_values;
  std::map<SeriesKey, UniformSeries> cache;
  json pairs = json::array();
  std::map<MetricId, json> example_paths;
  for (std::size_t p = 0; p < manifest.parts.size(); ++p) {
    for (const auto& e : manifest.parts[p]) {
      const SeriesKey key{e.provenance.input_batch, e.metric, e.provenance.input_log};
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, load_uniform(layout, index, key)).first;
      SeriesPair pair{read_csv_values(gen_dir / e.file), it->second.values};
      const bool is_own = e.provenance.model_batch == e.provenance.input_batch;
      const DtwResult d = dtw(pair.generated, pair.original);
      pairs.push_back({{"part", p},
                       {"metric", e.metric.str()},
                       {"model_batch", e.provenance.model_batch.str()},
                       {"input_batch", e.provenance.input_batch.str()},
                       {"input_log", e.provenance.input_log},
                       {"kind", is_own ? "own" : "cross"},
                       {"dtw", d.distance}});
      const std::string slot = is_own ? "own" : "cross";
      if (!example_paths[e.metric].contains(slot)) example_paths[e.metric][slot] = to_json(d);
      auto& g = gen_values[e.metric];
      g.insert(g.end(), pair.generated.begin(), pair.generated.end());
      (is_own ? own : cross)[e.metric].push_back(std::move(pair));
    }
  }
  for (const auto& [key, u] : cache) {
    auto& o = orig_values[key.metric];
    o.insert(o.end(), u.values.begin(), u.values.end());
  }

  auto report_for = [](const std::vector<SeriesPair>& a, const std::vector<SeriesPair>& b) -> json {
    if (a.empty() || b.empty())
      return {{"available", false}, {"own_pairs", a.size()}, {"cross_pairs", b.size()}};
    json r = to_json(variance_report(a, b));
    r["available"] = true;
    return r;
  };

  json metrics = json::object();
  std::vector<SeriesPair> all_own, all_cross;
  for (const auto& [metric, sel] : manifest.selection) {
    const auto& o = own[metric];
    const auto& c = cross[metric];
    all_own.insert(all_own.end(), o.begin(), o.end());
    all_cross.insert(all_cross.end(), c.begin(), c.end());
    json m = {{"variance", report_for(o, c)}};
    if (!gen_values[metric].empty()) m["generated_stats"] = to_json(series_stats(gen_values[metric]));
    if (!orig_values[metric].empty()) m["original_stats"] = to_json(series_stats(orig_values[metric]));
    metrics[metric.str()] = std::move(m);
    write_file_atomic(reports_dir / ("envelope_" + safe_name(metric.str()) + ".json"),
                      envelope_json(layout, index, gen_dir, metric).dump() + "\n");
  }

  json paths = json::object();
  for (const auto& [metric, p] : example_paths) paths[metric.str()] = p;
  write_file_atomic(reports_dir / "dtw_paths.json", paths.dump() + "\n");

  ValidateSummary sum;
  sum.report = {{"seed", manifest.seed},
                {"parts", manifest.parts.size()},
                {"overall", report_for(all_own, all_cross)},
                {"metrics", metrics},
                {"pairs", pairs}};
  write_file_atomic(reports_dir / "validation.json", sum.report.dump(1) + "\n");
  return sum;
}

}  // namespace genlog
