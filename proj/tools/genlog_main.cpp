// SPDX-License-Identifier: Apache-2.0
// genlog: batch-mode driver for the ingest -> train -> generate -> remap ->
// validate pipeline, plus the HTTP service.
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "genlog/error.hpp"
#include "genlog/pipeline.hpp"
#include "genlog/service.hpp"
#include "genlog/simd.hpp"

namespace {

using namespace genlog;

std::vector<MetricId> to_metrics(const std::vector<std::string>& names) {
  std::vector<MetricId> out;
  for (const auto& n : names)
    if (!n.empty()) out.emplace_back(n);
  return out;
}

// "metric=batchA+batchB,metric2=batchC"
std::set<Cell> parse_select(const std::string& spec) {
  std::set<Cell> cells;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error("--select entries look like metric=batch+batch, got '" + item + "'");
    const MetricId metric(item.substr(0, eq));
    std::stringstream bs(item.substr(eq + 1));
    std::string batch;
    while (std::getline(bs, batch, '+'))
      if (!batch.empty()) cells.emplace(metric, BatchId(batch));
  }
  return cells;
}

std::map<std::string, BatchId> read_batch_map(const std::string& path) {
  std::map<std::string, BatchId> out;
  std::stringstream ss(read_file(path));
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("batch map lines look like log_id=batch: '" + line + "'");
    out[line.substr(0, eq)] = BatchId(line.substr(eq + 1));
  }
  return out;
}

int code(Outcome o) { return static_cast<int>(o); }

Service* g_service = nullptr;
void on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"genlog - boost small process-log data sets with generated sensor series"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Flat key=value file with option defaults");

  std::uint64_t seed = 0;
  std::vector<std::string> metric_names;
  app.add_option("--seed", seed, "Seed for training and generation")->capture_default_str();
  app.add_option("--metrics", metric_names, "Comma-separated metric filter (default: all)")->delimiter(',');

  std::string out_dir;
  std::string input_dir;
  std::string batch_map;
  bool no_prefix = false;
  auto* ingest = app.add_subcommand("ingest", "Extract per-metric series from a directory of logs");
  ingest->add_option("--input", input_dir, "Directory with .log.yaml / .xes.xml files")->required();
  ingest->add_option("--out", out_dir, "Output directory")->required();
  ingest->add_option("--batch-map", batch_map, "File of log_id=batch lines");
  ingest->add_flag("--no-prefix-batches", no_prefix, "Do not derive batches from batchNN_ filename prefixes");

  TrainConfig tcfg;
  unsigned workers = 0;
  auto* train = app.add_subcommand("train", "Train one model per (metric, batch) cell");
  train->add_option("--out", out_dir, "Output directory")->required();
  train->add_option("--hidden", tcfg.hidden_size, "LSTM hidden units")->capture_default_str();
  train->add_option("--lookback", tcfg.lookback, "Window length")->capture_default_str();
  train->add_option("--max-epochs", tcfg.max_epochs, "Epoch limit")->capture_default_str();
  train->add_option("--learning-rate", tcfg.adam.learning_rate, "Adam step size")->capture_default_str();
  train->add_option("--patience", tcfg.patience, "Early-stopping patience (epochs)")->capture_default_str();
  train->add_option("--min-delta", tcfg.min_delta, "Early-stopping minimum improvement")->capture_default_str();
  train->add_option("--workers", workers, "Training threads (0 = all cores)")->capture_default_str();

  std::int64_t count = 1;
  std::string select;
  auto* generate = app.add_subcommand("generate", "Generate series from the selected models and inputs");
  generate->add_option("--out", out_dir, "Output directory")->required();
  generate->add_option("--count", count, "Number of synthetic parts")->capture_default_str();
  generate->add_option("--select", select,
                       "Cells as metric=batch+batch,... (default: saved selection, else every trained cell)");

  auto* remap = app.add_subcommand("remap", "Embed generated series into template logs");
  remap->add_option("--out", out_dir, "Output directory")->required();

  auto* validate = app.add_subcommand("validate", "DTW, statistics and envelope reports");
  validate->add_option("--out", out_dir, "Output directory")->required();

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string static_dir;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API (data directory from --out or GENLOG_DIR)");
  serve->add_option("--out", out_dir, "Data directory");
  serve->add_option("--port", port, "Listen port")->capture_default_str();
  serve->add_option("--host", host, "Listen address")->capture_default_str();
  serve->add_option("--static", static_dir, "Dashboard bundle directory served at /");
  serve->add_option("--workers", workers, "Training threads (0 = all cores)")->capture_default_str();
  serve->add_option("--hidden", tcfg.hidden_size, "Default LSTM hidden units")->capture_default_str();
  serve->add_option("--lookback", tcfg.lookback, "Default window length")->capture_default_str();
  serve->add_option("--max-epochs", tcfg.max_epochs, "Default epoch limit")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  const std::vector<MetricId> metrics = to_metrics(metric_names);
  try {
    if (*ingest) {
      IngestConfig cfg;
      cfg.metrics = metrics;
      cfg.batch_from_prefix = !no_prefix;
      if (!batch_map.empty()) cfg.batch_of = read_batch_map(batch_map);
      const IngestSummary sum = run_ingest(input_dir, Layout{out_dir}, cfg);
      std::cout << "ingested " << sum.parsed << " logs, " << sum.index.series.size() << " series, dt "
                << sum.index.dt_ms << " ms\n";
      if (!sum.index.failures.empty()) {
        std::cout << "failures:\n";
        for (const auto& f : sum.index.failures) std::cout << "  " << f << "\n";
      }
      return code(sum.outcome);
    }
    if (*train) {
      tcfg.check();
      const TrainSummary sum = run_train(Layout{out_dir}, tcfg, seed, metrics, workers);
      for (const auto& m : sum.models) {
        std::cout << m.metric << " / " << m.batch << ": ";
        if (m.ok)
          std::cout << "epochs " << m.stopped_epoch << ", loss " << m.first_loss << " -> " << m.final_loss << "\n";
        else
          std::cout << "skipped (" << m.error << ")\n";
      }
      std::cerr << "kernels: " << simd::isa_name(simd::kernels().isa) << "\n";
      return code(sum.outcome);
    }
    if (*generate) {
      const Layout layout{out_dir};
      const CatalogIndex index = load_catalog_index(layout);
      std::set<Cell> cells;
      if (!select.empty()) cells = parse_select(select);
      else cells = load_active_cells(layout);
      if (cells.empty()) cells = trained_cells(layout, index, metrics);
      if (!metrics.empty())
        std::erase_if(cells, [&](const Cell& c) { return std::find(metrics.begin(), metrics.end(), c.first) == metrics.end(); });
      if (cells.empty()) throw Error("no trained cells to generate from (run 'genlog train' first)");
      const GenerateSummary sum = run_generate(layout, selection_from_cells(index, cells), count, seed, layout.generated());
      std::cout << "generated " << sum.parts.size() << " parts into " << layout.generated().string() << "\n";
      return code(sum.outcome);
    }
    if (*remap) {
      const Layout layout{out_dir};
      const RemapSummary sum = run_remap(layout, layout.generated(), layout.out_logs());
      std::cout << "wrote " << sum.logs.size() << " logs into " << layout.out_logs().string() << "\n";
      for (const auto& f : sum.failures) std::cout << "  " << f << "\n";
      return code(sum.outcome);
    }
    if (*validate) {
      const Layout layout{out_dir};
      const ValidateSummary sum = run_validate(layout, layout.generated(), layout.reports());
      const auto& overall = sum.report.at("overall");
      std::cout << "validation report: " << (layout.reports() / "validation.json").string() << "\n";
      if (overall.at("available").get<bool>())
        std::cout << "mean DTW own " << overall.at("own_mean_dtw").get<double>() << ", cross "
                  << overall.at("cross_mean_dtw").get<double>() << "\n";
      return code(sum.outcome);
    }
    if (*serve) {
      if (out_dir.empty()) {
        const char* env = std::getenv("GENLOG_DIR");
        if (!env) throw Error("serve needs --out or GENLOG_DIR");
        out_dir = env;
      }
      ServiceOptions opts;
      opts.data_dir = out_dir;
      opts.static_dir = static_dir;
      opts.workers = workers;
      opts.train = tcfg;
      opts.seed = seed;
      Service service(opts);
      const int bound = service.bind(host, port);
      if (bound < 0) throw Error("cannot listen on " + host + ":" + std::to_string(port));
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "serving " << out_dir << " on http://" << host << ":" << bound << "\n";
      service.run();
      g_service = nullptr;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
