#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "cbrowse/ingestion.hpp"
#include "cbrowse/snapshot.hpp"

namespace httplib {
class Server;
}

namespace cbrowse {

using SnapshotPtr = std::shared_ptr<const Snapshot>;

// The served snapshot. Readers take a reference once per request, so a
// publish never affects a request already in flight.
class SnapshotStore {
 public:
  SnapshotPtr current() const {
    std::lock_guard lock(mutex_);
    return current_;
  }
  void publish(SnapshotPtr snapshot) {
    std::lock_guard lock(mutex_);
    current_ = std::move(snapshot);
  }

 private:
  mutable std::mutex mutex_;
  SnapshotPtr current_;
};

struct Response {
  int status = 200;
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
};

// Builds (and persists) a new snapshot. Throws on failure.
using RefreshFn = std::function<SnapshotPtr()>;

// /v1 handlers, independent of the HTTP transport.
class Api {
 public:
  explicit Api(SnapshotStore& store, RefreshFn refresh = {}) : store_(store), refresh_(std::move(refresh)) {}

  // GET /v1/tree
  Response tree() const;
  // GET /v1/nodes/{id}/articles. A non-empty `expected_snapshot` that is not
  // the served one answers 404, since node ids are snapshot-scoped.
  Response node_articles(std::string_view node_id, std::string_view expected_snapshot = {}) const;
  // POST /v1/refresh. 409 while another refresh runs.
  Response refresh();
  // GET /v1/health
  Response health() const;

  bool refreshing() const noexcept { return busy_.load(); }

 private:
  SnapshotStore& store_;
  RefreshFn refresh_;
  std::atomic<bool> busy_{false};
};

Response error_response(int status, std::string_view error, std::string_view detail);

// ingest -> snapshot_build -> persist_snapshot into `dir`. Throws when every
// source fails.
RefreshFn make_refresh(std::vector<SourceConfig> sources, std::filesystem::path dir, SnapshotOptions options = {},
                       FetchOptions fetch = {});

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 0;                    // 0: any free port
  std::filesystem::path static_dir;  // optional UI assets mounted at /
};

// Serves an Api over HTTP on a background thread until stop() or destruction.
class Server {
 public:
  // Throws StartupError when the port cannot be bound.
  Server(Api& api, const ServerOptions& options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  int port() const noexcept { return port_; }
  void stop();
  // Blocks until the server stops.
  void wait();

 private:
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
  int port_ = 0;
};

// Loads `latest` from `dir` into the store when present. Returns whether a
// snapshot was loaded.
bool load_into(SnapshotStore& store, const std::filesystem::path& dir);

}  // namespace cbrowse
