#include "cbrowse/service.hpp"

#include <chrono>

#include "httplib.h"
#include "json.hpp"

#include "cbrowse/error.hpp"

namespace cbrowse {

namespace {

using nlohmann::ordered_json;

Response json_response(int status, const ordered_json& body) {
  return {status, body.dump(), {}};
}

ordered_json stats_json(const SnapshotStats& stats) {
  return {{"article_count", stats.article_count},
          {"dropped_count", stats.dropped_count},
          {"concept_count", stats.concept_count},
          {"build_ms", stats.build_ms}};
}

Timestamp now_seconds() {
  return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

// Clears the busy flag on every exit path.
struct BusyGuard {
  std::atomic<bool>& flag;
  ~BusyGuard() { flag.store(false); }
};

}  // namespace

Response error_response(int status, std::string_view error, std::string_view detail) {
  return json_response(status, ordered_json{{"error", error}, {"detail", detail}});
}

Response Api::tree() const {
  auto snap = store_.current();
  ordered_json body;
  if (!snap) {
    body["snapshot_id"] = nullptr;
    body["created_at"] = nullptr;
    body["stats"] = nullptr;
    body["tree"] = ConceptTree().to_json();
    return json_response(200, body);
  }
  body["snapshot_id"] = snap->id;
  body["created_at"] = format_rfc3339(snap->created_at);
  body["stats"] = stats_json(snap->stats);
  body["tree"] = snap->tree.to_json();
  auto r = json_response(200, body);
  r.headers.emplace_back("X-Snapshot-Id", snap->id);
  return r;
}

Response Api::node_articles(std::string_view node_id, std::string_view expected_snapshot) const {
  auto snap = store_.current();
  if (!snap) return error_response(404, "not_found", "no snapshot has been built yet");
  if (!expected_snapshot.empty() && expected_snapshot != snap->id) {
    return error_response(404, "not_found", "snapshot " + std::string(expected_snapshot) + " is no longer served");
  }
  const TreeNode* node = snap->tree.find(node_id);
  if (!node) return error_response(404, "not_found", "unknown node " + std::string(node_id));
  ordered_json list = ordered_json::array();
  for (const auto& aid : node->article_ids) {
    const Article* a = snap->article(aid);
    if (!a) return error_response(500, "inconsistent_snapshot", "article " + aid + " is missing");
    list.push_back({{"title", a->title}, {"description", a->description}, {"url", a->url}, {"source", a->source}});
  }
  auto r = json_response(200, list);
  r.headers.emplace_back("X-Snapshot-Id", snap->id);
  return r;
}

Response Api::refresh() {
  if (!refresh_) return error_response(503, "unavailable", "no sources are configured for refresh");
  bool expected = false;
  if (!busy_.compare_exchange_strong(expected, true)) {
    return error_response(409, "busy", "a build is already running");
  }
  BusyGuard guard{busy_};
  SnapshotPtr snap;
  try {
    snap = refresh_();
  } catch (const std::exception& e) {
    return error_response(502, "refresh_failed", e.what());
  }
  store_.publish(snap);
  return json_response(200, ordered_json{{"snapshot_id", snap->id}, {"stats", stats_json(snap->stats)}});
}

Response Api::health() const {
  auto snap = store_.current();
  ordered_json body{{"status", "ok"}};
  body["snapshot_id"] = snap ? ordered_json(snap->id) : ordered_json(nullptr);
  return json_response(200, body);
}

RefreshFn make_refresh(std::vector<SourceConfig> sources, std::filesystem::path dir, SnapshotOptions options,
                       FetchOptions fetch) {
  return [sources = std::move(sources), dir = std::move(dir), options, fetch]() -> SnapshotPtr {
    const auto now = now_seconds();
    auto result = ingest(sources, now, fetch);
    if (!sources.empty() && result.failed_sources() == sources.size()) {
      std::string reasons;
      for (const auto& r : result.reports) reasons += (reasons.empty() ? "" : "; ") + *r.error;
      throw FetchError("all sources", reasons);
    }
    auto snap = std::make_shared<Snapshot>(snapshot_build(result.corpus, options, now));
    persist_snapshot(*snap, dir);
    return snap;
  };
}

bool load_into(SnapshotStore& store, const std::filesystem::path& dir) {
  auto snap = load_latest(dir);
  if (!snap) return false;
  store.publish(std::make_shared<const Snapshot>(std::move(*snap)));
  return true;
}

Server::Server(Api& api, const ServerOptions& options) : http_(std::make_unique<httplib::Server>()) {
  auto send = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    for (const auto& [k, v] : r.headers) res.set_header(k, v);
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.body, "application/json");
  };
  http_->Get("/v1/tree", [&api, send](const httplib::Request&, httplib::Response& res) { send(res, api.tree()); });
  http_->Get(R"(/v1/nodes/([^/]+)/articles)", [&api, send](const httplib::Request& req, httplib::Response& res) {
    send(res, api.node_articles(req.matches[1].str(), req.get_param_value("snapshot")));
  });
  http_->Post("/v1/refresh", [&api, send](const httplib::Request&, httplib::Response& res) { send(res, api.refresh()); });
  http_->Get("/v1/health", [&api, send](const httplib::Request&, httplib::Response& res) { send(res, api.health()); });
  http_->set_error_handler([send](const httplib::Request& req, httplib::Response& res) {
    if (res.status == 404 && req.path.rfind("/v1/", 0) == 0 && res.body.empty()) {
      send(res, error_response(404, "not_found", "no route for " + req.method + " " + req.path));
    }
  });
  if (!options.static_dir.empty() && !http_->set_mount_point("/", options.static_dir.string())) {
    throw StartupError("cannot serve static files from " + options.static_dir.string());
  }

  // The library default adds SO_REUSEPORT, which would let a second server
  // share a taken port instead of failing.
  http_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  if (options.port == 0) {
    port_ = http_->bind_to_any_port(options.host);
    if (port_ < 0) throw StartupError("cannot bind " + options.host);
  } else {
    if (!http_->bind_to_port(options.host, options.port)) {
      throw StartupError("cannot bind " + options.host + ":" + std::to_string(options.port));
    }
    port_ = options.port;
  }
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
}

Server::~Server() { stop(); }

void Server::stop() {
  if (http_) http_->stop();
  if (thread_.joinable()) thread_.join();
}

void Server::wait() {
  if (thread_.joinable()) thread_.join();
}

}  // namespace cbrowse
