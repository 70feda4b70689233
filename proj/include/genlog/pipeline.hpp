// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "genlog/genesis.hpp"
#include "genlog/ingest.hpp"
#include "genlog/remap.hpp"
#include "genlog/train.hpp"
#include "genlog/types.hpp"
#include "genlog/validate.hpp"

namespace genlog {

namespace fs = std::filesystem;

/// On-disk layout of an output directory.
struct Layout {
  fs::path root;

  fs::path catalog() const { return root / "catalog"; }
  fs::path catalog_logs() const { return root / "catalog" / "logs"; }
  fs::path index_file() const { return root / "catalog" / "index.json"; }
  fs::path models() const { return root / "models"; }
  fs::path generated() const { return root / "generated"; }
  fs::path out_logs() const { return root / "out_logs"; }
  fs::path reports() const { return root / "reports"; }
  fs::path selection_file() const { return root / "selection.json"; }
  fs::path runs() const { return root / "runs"; }
};

/// Exit codes shared by every stage.
enum class Outcome : int { success = 0, total_failure = 1, partial_failure = 2 };

/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const fs::path& path, std::string_view content);
std::string read_file(const fs::path& path);

struct CatalogIndex {
  struct LogEntry {
    std::string id;
    BatchId batch;
    std::string file;  // relative to catalog/logs
    LogFormat format = LogFormat::yamlite;
  };
  struct SeriesEntry {
    SeriesKey key;
    std::string file;  // relative to catalog/
    std::size_t samples = 0;
  };

  Millis dt_ms = 1;
  std::vector<MetricId> metrics;
  std::vector<BatchId> batches;
  std::vector<LogEntry> logs;
  std::vector<SeriesEntry> series;
  std::vector<std::string> failures;
  std::vector<std::string> warnings;

  const LogEntry* find_log(const std::string& id) const;
  const SeriesEntry* find_series(const SeriesKey& key) const;
  bool has_cell(const MetricId& metric, const BatchId& batch) const;
};

nlohmann::json to_json(const CatalogIndex& index);
CatalogIndex catalog_index_from_json(const nlohmann::json& j);

/// Throws Error naming the missing path when the catalog was never ingested.
CatalogIndex load_catalog_index(const Layout& layout);

LogFile load_catalog_log(const Layout& layout, const CatalogIndex::LogEntry& entry);
Series load_catalog_series(const Layout& layout, const CatalogIndex::SeriesEntry& entry);
UniformSeries load_uniform(const Layout& layout, const CatalogIndex& index, const SeriesKey& key);

// ---------------------------------------------------------------- ingest

struct IngestSummary {
  CatalogIndex index;
  std::size_t parsed = 0;
  std::size_t failed = 0;
  Outcome outcome = Outcome::success;
};

/// Parses every `.yaml`/`.yml`/`.xml`/`.xes` file in `input_dir`, writes one CSV
/// per (batch, metric, log), copies the logs, and writes catalog/index.json.
IngestSummary run_ingest(const fs::path& input_dir, const Layout& layout, const IngestConfig& cfg);

// ---------------------------------------------------------------- train

std::string model_filename(const MetricId& metric, const BatchId& batch);
fs::path model_path(const Layout& layout, const MetricId& metric, const BatchId& batch);

struct TrainOutcome {
  MetricId metric;
  BatchId batch;
  bool ok = false;
  std::string error;
  std::int64_t stopped_epoch = 0;
  double first_loss = 0.0;
  double final_loss = 0.0;
  double best_loss = 0.0;
};

/// Trains the (metric, batch) cell on every series of that slice. The model
/// seed is derived from `seed`, the metric and the batch. Saves atomically.
ModelRecord train_cell(const Layout& layout, const CatalogIndex& index, const MetricId& metric,
                       const BatchId& batch, TrainConfig cfg, std::uint64_t seed);

struct TrainSummary {
  std::vector<TrainOutcome> models;
  Outcome outcome = Outcome::success;
};

/// Trains every cell of the catalog (optionally only `metrics`) on up to
/// `workers` threads, then writes models/manifest.json.
TrainSummary run_train(const Layout& layout, const TrainConfig& cfg, std::uint64_t seed,
                       const std::vector<MetricId>& metrics, unsigned workers);

// ---------------------------------------------------------------- selection

using Cell = std::pair<MetricId, BatchId>;

/// Selection over `active` cells: model batches are the active batches, inputs
/// are every catalog series of those batches.
SelectionSet selection_from_cells(const CatalogIndex& index, const std::set<Cell>& active);

/// Cells with a model file on disk, restricted to `metrics` when non-empty.
std::set<Cell> trained_cells(const Layout& layout, const CatalogIndex& index,
                             const std::vector<MetricId>& metrics = {});

std::set<Cell> load_active_cells(const Layout& layout);
void save_active_cells(const Layout& layout, const std::set<Cell>& active);

Registry load_registry(const Layout& layout, const CatalogIndex& index,
                       const SelectionSet& selection);

nlohmann::json to_json(const SelectionSet& selection);
SelectionSet selection_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------- generate

struct GenerateSummary {
  std::vector<GeneratedPart> parts;
  Outcome outcome = Outcome::success;
};

/// Writes `<gen_dir>/part_NNNN/<metric>.csv` plus a `<metric>.json` provenance
/// sidecar per part, and `<gen_dir>/manifest.json` last.
GenerateSummary run_generate(const Layout& layout, const SelectionSet& selection,
                             std::int64_t count, std::uint64_t seed, const fs::path& gen_dir);

// ---------------------------------------------------------------- remap

struct RemappedLog {
  std::size_t part = 0;
  std::string id;
  std::string template_id;
  std::string file;
  RoundtripReport report;
};

struct RemapSummary {
  std::vector<RemappedLog> logs;
  std::vector<std::string> failures;
  Outcome outcome = Outcome::success;
};

/// Embeds each generated part into the log its first metric's input came
/// from and writes it in that log's format under `out_dir`.
RemapSummary run_remap(const Layout& layout, const fs::path& gen_dir, const fs::path& out_dir);

// ---------------------------------------------------------------- validate

/// Envelope of the generated series of one metric (all resampled to the
/// longest length) with the eligible real series overlaid.
nlohmann::json envelope_json(const Layout& layout, const CatalogIndex& index,
                             const fs::path& gen_dir, const MetricId& metric);

struct ValidateSummary {
  nlohmann::json report;
  Outcome outcome = Outcome::success;
};

/// DTW of every generated series against its input, split into own-batch and
/// cross-batch pairs, plus statistics and envelopes. Writes into `reports_dir`.
ValidateSummary run_validate(const Layout& layout, const fs::path& gen_dir,
                             const fs::path& reports_dir);

}  // namespace genlog
