// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "genlog/train.hpp"

namespace genlog {

struct ServiceOptions {
  std::filesystem::path data_dir;
  /// Static dashboard bundle served at `/`; a placeholder page when empty.
  std::filesystem::path static_dir;
  /// Training worker threads; 0 selects the available parallelism.
  unsigned workers = 0;
  TrainConfig train;
  std::uint64_t seed = 0;
};

/// JSON/HTTP front end over an output directory:
///
///   GET  /api/catalog
///   POST /api/train                  {metric, batch, config?}
///   GET  /api/jobs/{id}
///   POST /api/selection              {cells: [{metric, batch}]}
///   POST /api/generate               {count, seed, metrics?}
///   GET  /api/runs/{id}
///   GET  /api/runs/{id}/envelope/{metric}
///   GET  /api/runs/{id}/logs
class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds the listening socket; port 0 picks a free port. Returns the port
  /// or -1 on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Requires a successful bind().
  void run();
  void stop();
  /// Blocks until queued training and generation work has drained.
  void wait_idle();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace genlog
