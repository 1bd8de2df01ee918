#include <future>
#include <thread>

#include "doctest.h"
#include "helpers.hpp"

#include "cbrowse/error.hpp"
#include "cbrowse/service.hpp"

// After the project headers: <resolv.h> defines a `_res` macro that breaks Eigen.
#include "httplib.h"

using namespace cbrowse;
using cbrowse::testing::fixture;
using cbrowse::testing::TempDir;
using nlohmann::json;

namespace {

Timestamp at(long long secs) { return Timestamp(std::chrono::seconds(secs)); }

SnapshotPtr build(std::size_t articles, long long when) {
  auto corpus = load_corpus(fixture("corpus30.json"));
  corpus.resize(articles);
  return std::make_shared<const Snapshot>(snapshot_build(corpus, {}, at(when)));
}

std::string header(const Response& r, const std::string& name) {
  for (const auto& [k, v] : r.headers) {
    if (k == name) return v;
  }
  return {};
}

}  // namespace

TEST_CASE("empty state") {
  SnapshotStore store;
  Api api(store);
  auto tree = api.tree();
  CHECK(tree.status == 200);
  auto body = json::parse(tree.body);
  CHECK(body["snapshot_id"].is_null());
  CHECK(body["tree"]["nodes"].empty());
  CHECK(body["tree"]["root"].is_null());

  auto health = json::parse(api.health().body);
  CHECK(health["status"] == "ok");
  CHECK(health["snapshot_id"].is_null());

  auto node = api.node_articles("n0");
  CHECK(node.status == 404);
  auto err = json::parse(node.body);
  CHECK(err["error"] == "not_found");
  CHECK(err.contains("detail"));

  auto refresh = api.refresh();
  CHECK(refresh.status == 503);
  CHECK(json::parse(refresh.body).contains("error"));
}

TEST_CASE("read endpoints over a snapshot") {
  SnapshotStore store;
  auto snap = build(30, 1508500000);
  store.publish(snap);
  Api api(store);

  auto tree = api.tree();
  auto body = json::parse(tree.body);
  CHECK(body["snapshot_id"] == snap->id);
  CHECK(body["stats"]["article_count"] == 30);
  CHECK(body["tree"] == json::parse(snap->tree.dump()));
  CHECK(header(tree, "X-Snapshot-Id") == snap->id);
  CHECK(api.tree().body == tree.body);

  for (const auto& node : snap->tree.nodes()) {
    auto r = api.node_articles(node.id);
    REQUIRE(r.status == 200);
    CHECK(r.body == api.node_articles(node.id).body);
    auto list = json::parse(r.body);
    REQUIRE(list.size() == node.article_ids.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Article* a = snap->article(node.article_ids[i]);
      REQUIRE(a);
      CHECK(list[i] == json{{"title", a->title}, {"description", a->description}, {"url", a->url}, {"source", a->source}});
      CHECK(list[i].size() == 4);
    }
  }
  CHECK(api.node_articles("n999").status == 404);
  CHECK(api.node_articles("n0", snap->id).status == 200);
  auto stale = api.node_articles("n0", "20000101T000000Z-00000000");
  CHECK(stale.status == 404);
  CHECK(json::parse(stale.body)["error"] == "not_found");
  CHECK(json::parse(api.health().body)["snapshot_id"] == snap->id);
}

TEST_CASE("refresh publishes, reports busy and survives failures") {
  SnapshotStore store;
  auto next = build(30, 1508500000);
  std::promise<void> release;
  std::shared_future<void> gate = release.get_future().share();
  std::atomic<bool> entered{false};
  Api api(store, [&]() {
    entered = true;
    gate.wait();
    return next;
  });

  auto running = std::async(std::launch::async, [&] { return api.refresh(); });
  while (!entered) std::this_thread::yield();
  CHECK(api.refreshing());
  auto busy = api.refresh();
  CHECK(busy.status == 409);
  CHECK(json::parse(busy.body)["error"] == "busy");
  CHECK_FALSE(store.current());
  release.set_value();
  auto done = running.get();
  CHECK(done.status == 200);
  auto body = json::parse(done.body);
  CHECK(body["snapshot_id"] == next->id);
  CHECK(body["stats"]["article_count"] == 30);
  CHECK(store.current() == next);
  CHECK_FALSE(api.refreshing());

  Api failing(store, []() -> SnapshotPtr { throw FetchError("all sources", "down"); });
  auto r = failing.refresh();
  CHECK(r.status == 502);
  CHECK_FALSE(failing.refreshing());
  CHECK(store.current() == next);
}

TEST_CASE("readers never mix two snapshots") {
  SnapshotStore store;
  auto a = build(30, 1508500000);
  auto b = build(17, 1508600000);
  store.publish(a);
  Api api(store);
  std::atomic<bool> stop{false};
  std::atomic<int> mixed{0}, checked{0};

  std::vector<std::thread> readers;
  for (int t = 0; t < 4; ++t) {
    readers.emplace_back([&] {
      while (!stop) {
        auto tree = api.tree();
        auto id = header(tree, "X-Snapshot-Id");
        auto nodes = json::parse(tree.body)["tree"]["nodes"];
        auto node = nodes.back();
        auto r = api.node_articles(node["id"].get<std::string>(), id);
        if (r.status == 200) {
          if (header(r, "X-Snapshot-Id") != id || json::parse(r.body).size() != node["count"].get<std::size_t>()) ++mixed;
        } else if (r.status != 404) {
          ++mixed;
        }
        ++checked;
      }
    });
  }
  for (int i = 0; i < 2000; ++i) store.publish(i % 2 ? a : b);
  while (checked < 2000) std::this_thread::yield();
  stop = true;
  for (auto& t : readers) t.join();
  CHECK(mixed == 0);
}

TEST_CASE("make_refresh ingests fixtures and persists") {
  TempDir dir;
  SnapshotStore store;
  Api api(store, make_refresh(load_source_configs(fixture("sources.json")), dir.path()));
  auto r = api.refresh();
  REQUIRE(r.status == 200);
  auto id = json::parse(r.body)["snapshot_id"].get<std::string>();
  auto persisted = load_latest(dir.path());
  REQUIRE(persisted);
  CHECK(persisted->id == id);
  CHECK(*persisted == *store.current());
  CHECK(persisted->stats.article_count == 30);

  SnapshotStore reloaded;
  CHECK(load_into(reloaded, dir.path()));
  CHECK(reloaded.current()->id == id);

  SnapshotStore none;
  TempDir empty;
  CHECK_FALSE(load_into(none, empty.path()));

  auto all_bad = load_source_configs(fixture("sources.json"));
  for (auto& s : all_bad) s.endpoint = "/nonexistent/" + s.name + ".json";
  Api failing(store, make_refresh(all_bad, dir.path()));
  CHECK(failing.refresh().status == 502);
  CHECK(load_latest(dir.path())->id == id);
}

TEST_CASE("http transport") {
  SnapshotStore store;
  Api api(store, [] { return build(30, 1508500000); });
  Server server(api, {});
  REQUIRE(server.port() > 0);
  httplib::Client client("127.0.0.1", server.port());

  auto health = client.Get("/v1/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(json::parse(health->body)["snapshot_id"].is_null());
  CHECK(health->get_header_value("Content-Type") == "application/json");

  auto empty = client.Get("/v1/tree");
  REQUIRE(empty);
  CHECK(empty->status == 200);

  auto refresh = client.Post("/v1/refresh");
  REQUIRE(refresh);
  CHECK(refresh->status == 200);
  auto id = json::parse(refresh->body)["snapshot_id"].get<std::string>();

  auto tree = client.Get("/v1/tree");
  REQUIRE(tree);
  CHECK(tree->body == api.tree().body);
  CHECK(json::parse(tree->body)["snapshot_id"] == id);

  auto articles = client.Get("/v1/nodes/n0/articles");
  REQUIRE(articles);
  CHECK(articles->status == 200);
  CHECK(articles->body == api.node_articles("n0").body);
  CHECK(articles->get_header_value("X-Snapshot-Id") == id);

  auto scoped = client.Get("/v1/nodes/n0/articles?snapshot=" + id);
  REQUIRE(scoped);
  CHECK(scoped->status == 200);

  auto missing = client.Get("/v1/nodes/n999/articles");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(json::parse(missing->body)["error"] == "not_found");

  auto unknown = client.Get("/v1/nope");
  REQUIRE(unknown);
  CHECK(unknown->status == 404);
  CHECK(json::parse(unknown->body).contains("detail"));

  SUBCASE("port in use is a startup error") {
    ServerOptions taken;
    taken.port = server.port();
    CHECK_THROWS_AS(Server(api, taken), StartupError);
  }
  SUBCASE("missing static directory is a startup error") {
    ServerOptions assets;
    assets.static_dir = "/nonexistent/ui";
    CHECK_THROWS_AS(Server(api, assets), StartupError);
  }
}

TEST_CASE("static assets are served next to the api") {
  TempDir dir;
  cbrowse::testing::write_file(dir / "index.html", "<p>tree</p>");
  SnapshotStore store;
  Api api(store);
  ServerOptions options;
  options.static_dir = dir.path();
  Server server(api, options);
  httplib::Client client("127.0.0.1", server.port());
  auto page = client.Get("/index.html");
  REQUIRE(page);
  CHECK(page->body == "<p>tree</p>");
  auto health = client.Get("/v1/health");
  REQUIRE(health);
  CHECK(health->status == 200);
}
