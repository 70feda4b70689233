// SPDX-License-Identifier: Apache-2.0
#include "genlog/service.hpp"

#include <condition_variable>
#include <cstdio>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include <httplib.h>

#include "genlog/error.hpp"
#include "genlog/pipeline.hpp"

namespace genlog {
namespace {

using nlohmann::json;

// Fixed number of threads draining a FIFO of tasks.
class WorkerPool {
 public:
  explicit WorkerPool(unsigned workers) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    for (unsigned w = 0; w < workers; ++w) threads_.emplace_back([this] { loop(); });
  }

  ~WorkerPool() {
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
      queue_.clear();
    }
    cv_.notify_all();
    threads_.clear();
  }

  void submit(std::function<void()> task) {
    {
      std::lock_guard lock(mu_);
      queue_.push_back(std::move(task));
    }
    cv_.notify_one();
  }

  void wait_idle() {
    std::unique_lock lock(mu_);
    idle_cv_.wait(lock, [&] { return queue_.empty() && busy_ == 0; });
  }

 private:
  void loop() {
    for (;;) {
      std::function<void()> task;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
        if (stopping_) return;
        task = std::move(queue_.front());
        queue_.pop_front();
        ++busy_;
      }
      task();
      {
        std::lock_guard lock(mu_);
        --busy_;
      }
      idle_cv_.notify_all();
    }
  }

  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::deque<std::function<void()>> queue_;
  std::size_t busy_ = 0;
  bool stopping_ = false;
  std::vector<std::jthread> threads_;
};

enum class CellState { untrained, ready, active };

const char* state_name(CellState s) {
  switch (s) {
    case CellState::untrained: return "untrained";
    case CellState::ready: return "ready";
    case CellState::active: return "active";
  }
  return "untrained";
}

struct Job {
  std::string id;
  Cell cell;
  std::string status = "queued";  // queued | running | done | failed
  std::vector<double> loss_history;
  std::int64_t stopped_epoch = 0;
  std::string error;
};

struct Run {
  std::string id;
  std::string status = "queued";
  std::int64_t count = 0;
  std::uint64_t seed = 0;
  std::vector<MetricId> metrics;
  json parts = json::array();
  json logs = json::array();
  std::string error;
};

std::string make_id(const char* prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%04zu", prefix, n);
  return buf;
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply(res, status, json{{"error", message}});
}

std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
  if (req.body.empty()) return json::object();
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) {
      reply_error(res, 400, "request body must be a JSON object");
      return std::nullopt;
    }
    return j;
  } catch (const json::parse_error& e) {
    reply_error(res, 400, std::string("malformed JSON: ") + e.what());
    return std::nullopt;
  }
}

json job_json(const Job& j) {
  return {{"id", j.id},
          {"metric", j.cell.first.str()},
          {"batch", j.cell.second.str()},
          {"status", j.status},
          {"loss_history", j.loss_history},
          {"stopped_epoch", j.stopped_epoch},
          {"error", j.error}};
}

json run_json(const Run& r) {
  json metrics = json::array();
  for (const auto& m : r.metrics) metrics.push_back(m.str());
  return {{"id", r.id},       {"status", r.status}, {"count", r.count}, {"seed", r.seed},
          {"metrics", metrics}, {"parts", r.parts}, {"error", r.error}};
}

}  // namespace

struct Service::Impl {
  ServiceOptions opts;
  Layout layout;
  httplib::Server server;

  std::mutex mu;  // guards everything below
  std::map<std::string, Job> jobs;
  std::map<std::string, Run> runs;
  std::set<Cell> busy_cells;
  std::set<Cell> active;
  std::size_t job_counter = 0;
  std::size_t run_counter = 0;
  // Last member: joined first on destruction, while the state above is alive.
  WorkerPool pool;

  explicit Impl(ServiceOptions o) : opts(std::move(o)), layout{opts.data_dir}, pool(opts.workers) {
    active = load_active_cells(layout);
    routes();
  }

  std::optional<CatalogIndex> catalog() const {
    if (!fs::exists(layout.index_file())) return std::nullopt;
    return load_catalog_index(layout);
  }

  // Caller holds `mu`.
  CellState state_of(const Cell& cell) const {
    if (!fs::exists(model_path(layout, cell.first, cell.second))) return CellState::untrained;
    return active.contains(cell) ? CellState::active : CellState::ready;
  }

  json grid(const CatalogIndex& idx) const {
    json metrics = json::array();
    for (const auto& m : idx.metrics) metrics.push_back(m.str());
    json batches = json::array();
    for (const auto& b : idx.batches) batches.push_back(b.str());
    json cells = json::array();
    for (const auto& m : idx.metrics)
      for (const auto& b : idx.batches)
        cells.push_back({{"metric", m.str()},
                         {"batch", b.str()},
                         {"state", state_name(state_of({m, b}))},
                         {"has_series", idx.has_cell(m, b)}});
    return {{"metrics", metrics}, {"batches", batches}, {"dt_ms", idx.dt_ms}, {"cells", cells}};
  }

  void routes() {
    server.Get("/api/catalog", [this](const httplib::Request&, httplib::Response& res) {
      const auto idx = catalog();
      if (!idx) return reply_error(res, 503, "catalog not ingested yet");
      std::lock_guard lock(mu);
      reply(res, 200, grid(*idx));
    });

    server.Post("/api/train", [this](const httplib::Request& req, httplib::Response& res) { post_train(req, res); });

    server.Get(R"(/api/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu);
      const auto it = jobs.find(req.matches[1]);
      if (it == jobs.end()) return reply_error(res, 404, "unknown job");
      reply(res, 200, job_json(it->second));
    });

    server.Post("/api/selection",
                [this](const httplib::Request& req, httplib::Response& res) { post_selection(req, res); });

    server.Post("/api/generate",
                [this](const httplib::Request& req, httplib::Response& res) { post_generate(req, res); });

    server.Get(R"(/api/runs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu);
      const auto it = runs.find(req.matches[1]);
      if (it == runs.end()) return reply_error(res, 404, "unknown run");
      reply(res, 200, run_json(it->second));
    });

    server.Get(R"(/api/runs/([^/]+)/envelope/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      if (!finished_run(req.matches[1], res)) return;
      const auto idx = catalog();
      if (!idx) return reply_error(res, 503, "catalog not ingested yet");
      const fs::path dir = layout.runs() / std::string(req.matches[1]);
      try {
        reply(res, 200, envelope_json(layout, *idx, dir / "generated", MetricId(req.matches[2])));
      } catch (const Error& e) {
        reply_error(res, 404, e.what());
      }
    });

    server.Get(R"(/api/runs/([^/]+)/logs)", [this](const httplib::Request& req, httplib::Response& res) {
      if (!finished_run(req.matches[1], res)) return;
      std::lock_guard lock(mu);
      reply(res, 200, json{{"run_id", std::string(req.matches[1])}, {"logs", runs.at(req.matches[1]).logs}});
    });

    server.Get(R"(/api/runs/([^/]+)/logs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      if (!finished_run(req.matches[1], res)) return;
      const std::string file = req.matches[2];
      const fs::path path = layout.runs() / std::string(req.matches[1]) / "out_logs" / file;
      if (file == "manifest.json" || !fs::exists(path)) return reply_error(res, 404, "unknown log file");
      res.set_content(read_file(path), file.ends_with(".xml") ? "application/xml" : "application/yaml");
    });

    if (!opts.static_dir.empty() && fs::is_directory(opts.static_dir)) {
      server.set_mount_point("/", opts.static_dir.string());
    } else {
      server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("<!doctype html><title>genlog</title><p>Dashboard bundle not installed. "
                        "The JSON API is available under /api/.</p>\n",
                        "text/html");
      });
    }
  }

  bool finished_run(const std::string& id, httplib::Response& res) {
    std::lock_guard lock(mu);
    const auto it = runs.find(id);
    if (it == runs.end()) {
      reply_error(res, 404, "unknown run");
      return false;
    }
    if (it->second.status != "done") {
      reply_error(res, 409, "run is " + it->second.status);
      return false;
    }
    return true;
  }

  void post_train(const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req, res);
    if (!body) return;
    if (!body->contains("metric") || !body->contains("batch") || !(*body)["metric"].is_string() ||
        !(*body)["batch"].is_string())
      return reply_error(res, 400, "metric and batch are required strings");
    const Cell cell{MetricId((*body)["metric"].get<std::string>()), BatchId((*body)["batch"].get<std::string>())};

    TrainConfig cfg = opts.train;
    if (body->contains("config")) {
      try {
        cfg = train_config_from_json((*body)["config"], cfg);
      } catch (const Error& e) {
        return reply_error(res, 400, e.what());
      }
    }
    const auto idx = catalog();
    if (!idx) return reply_error(res, 503, "catalog not ingested yet");
    if (!idx->has_cell(cell.first, cell.second)) return reply_error(res, 404, "unknown cell");

    std::string id;
    {
      std::lock_guard lock(mu);
      if (busy_cells.contains(cell)) return reply_error(res, 409, "a job for this cell is already running");
      busy_cells.insert(cell);
      id = make_id("job", ++job_counter);
      Job job;
      job.id = id;
      job.cell = cell;
      jobs.emplace(id, std::move(job));
    }
    pool.submit([this, id, cell, cfg, index = *idx] {
      {
        std::lock_guard lock(mu);
        jobs.at(id).status = "running";
      }
      try {
        const ModelRecord rec = train_cell(layout, index, cell.first, cell.second, cfg, opts.seed);
        std::lock_guard lock(mu);
        auto& job = jobs.at(id);
        job.loss_history = rec.loss_history;
        job.stopped_epoch = rec.stopped_epoch;
        job.status = "done";
        busy_cells.erase(cell);
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        auto& job = jobs.at(id);
        job.error = e.what();
        job.status = "failed";
        busy_cells.erase(cell);
      }
    });
    reply(res, 202, json{{"job_id", id}, {"status", "queued"}});
  }

  void post_selection(const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req, res);
    if (!body) return;
    const auto idx = catalog();
    if (!idx) return reply_error(res, 503, "catalog not ingested yet");
    if (!body->contains("cells") || !(*body)["cells"].is_array())
      return reply_error(res, 400, "'cells' must be a list of {metric, batch}");

    std::vector<Cell> toggles;
    for (const auto& c : (*body)["cells"]) {
      if (!c.is_object() || !c.contains("metric") || !c.contains("batch") || !c["metric"].is_string() ||
          !c["batch"].is_string())
        return reply_error(res, 400, "each cell needs string metric and batch");
      toggles.emplace_back(MetricId(c["metric"].get<std::string>()), BatchId(c["batch"].get<std::string>()));
    }

    std::lock_guard lock(mu);
    for (const auto& cell : toggles) {
      const bool known = std::find(idx->metrics.begin(), idx->metrics.end(), cell.first) != idx->metrics.end() &&
                         std::find(idx->batches.begin(), idx->batches.end(), cell.second) != idx->batches.end();
      if (!known) return reply_error(res, 404, "unknown cell " + cell.first.str() + "/" + cell.second.str());
      if (state_of(cell) == CellState::untrained)
        return reply_error(res, 400, "cell " + cell.first.str() + "/" + cell.second.str() + " is not trained");
    }
    for (const auto& cell : toggles)
      if (!active.erase(cell)) active.insert(cell);
    save_active_cells(layout, active);
    reply(res, 200, grid(*idx));
  }

  void post_generate(const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req, res);
    if (!body) return;
    std::int64_t count = 1;
    std::uint64_t seed = opts.seed;
    std::vector<MetricId> metrics;
    try {
      if (body->contains("count")) count = (*body)["count"].get<std::int64_t>();
      if (body->contains("seed")) seed = (*body)["seed"].get<std::uint64_t>();
      if (body->contains("metrics"))
        for (const auto& m : (*body)["metrics"]) metrics.emplace_back(m.get<std::string>());
    } catch (const json::exception& e) {
      return reply_error(res, 400, std::string("bad generate request: ") + e.what());
    }
    if (count < 1) return reply_error(res, 400, "count must be at least 1");
    const auto idx = catalog();
    if (!idx) return reply_error(res, 503, "catalog not ingested yet");

    std::set<Cell> cells;
    std::string id;
    {
      std::lock_guard lock(mu);
      for (const auto& cell : active) {
        if (state_of(cell) != CellState::active) continue;
        if (metrics.empty() || std::find(metrics.begin(), metrics.end(), cell.first) != metrics.end())
          cells.insert(cell);
      }
      if (cells.empty()) return reply_error(res, 409, "no active cells selected");
      for (const auto& m : metrics)
        if (std::none_of(cells.begin(), cells.end(), [&](const Cell& c) { return c.first == m; }))
          return reply_error(res, 409, "metric '" + m.str() + "' has no active cell");
      id = make_id("run", ++run_counter);
      Run run;
      run.id = id;
      run.count = count;
      run.seed = seed;
      for (const auto& c : cells)
        if (run.metrics.empty() || run.metrics.back() != c.first) run.metrics.push_back(c.first);
      runs.emplace(id, std::move(run));
    }

    pool.submit([this, id, cells, count, seed, index = *idx] {
      {
        std::lock_guard lock(mu);
        runs.at(id).status = "running";
      }
      try {
        const fs::path dir = layout.runs() / id;
        const GenerateSummary gen =
            run_generate(layout, selection_from_cells(index, cells), count, seed, dir / "generated");
        const RemapSummary remap = run_remap(layout, dir / "generated", dir / "out_logs");
        run_validate(layout, dir / "generated", dir / "reports");

        json parts = json::array();
        for (std::size_t p = 0; p < gen.parts.size(); ++p) {
          json series = json::array();
          for (const auto& [metric, g] : gen.parts[p])
            series.push_back({{"metric", metric.str()},
                              {"model_batch", g.provenance.model_batch.str()},
                              {"input_batch", g.provenance.input_batch.str()},
                              {"input_log", g.provenance.input_log}});
          parts.push_back({{"part", p}, {"series", series}});
        }
        json logs = json::array();
        for (const auto& l : remap.logs)
          logs.push_back({{"id", l.id}, {"file", l.file}, {"template", l.template_id}, {"ok", l.report.ok()}});

        std::lock_guard lock(mu);
        auto& run = runs.at(id);
        run.parts = std::move(parts);
        run.logs = std::move(logs);
        if (!remap.failures.empty()) run.error = remap.failures.front();
        run.status = "done";
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        auto& run = runs.at(id);
        run.error = e.what();
        run.status = "failed";
      }
    });
    reply(res, 202, json{{"run_id", id}, {"status", "queued"}});
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

void Service::wait_idle() { impl_->pool.wait_idle(); }

}  // namespace genlog
