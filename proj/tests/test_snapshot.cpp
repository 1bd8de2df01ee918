#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <random>
#include <regex>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "tree_checks.hpp"

#include "cbrowse/error.hpp"
#include "cbrowse/snapshot.hpp"
#include "cbrowse/text.hpp"

using namespace cbrowse;
using cbrowse::testing::fixture;
using cbrowse::testing::TempDir;
using cbrowse::testing::tree_violations;

namespace {

Timestamp at(long long secs) { return Timestamp(std::chrono::seconds(secs)); }

std::vector<Article> corpus30() { return load_corpus(fixture("corpus30.json")); }

// Runs `body` in a child process and returns its wait status.
template <class F>
int in_child(F body) {
  pid_t pid = ::fork();
  REQUIRE(pid >= 0);
  if (pid == 0) {
    body();
    ::_exit(0);
  }
  int status = 0;
  ::waitpid(pid, &status, 0);
  return status;
}

}  // namespace

TEST_CASE("snapshot of the 30-article fixture") {
  auto snap = snapshot_build(corpus30(), {}, at(1508500000));
  CHECK(snap.stats.article_count == 30);
  CHECK(snap.stats.dropped_count == 0);
  CHECK(snap.stats.concept_count >= snap.tree.nodes().size());
  CHECK_FALSE(snap.tree.empty());
  CHECK(tree_violations(snap, Stoplist::bundled()).empty());
  CHECK(std::regex_match(snap.id, std::regex(R"(20171020T114640Z-[0-9a-f]{8})")));

  auto again = snapshot_build(corpus30(), {}, at(1508500000));
  CHECK(again.tree.dump() == snap.tree.dump());
  CHECK(again.id == snap.id);

  SnapshotOptions wide;
  wide.include_descriptions = true;
  auto described = snapshot_build(corpus30(), wide, at(1508500000));
  CHECK(tree_violations(described, Stoplist::bundled(), true).empty());
  CHECK(described.id != snap.id);

  for (std::size_t arity : {2, 4, 7}) {
    SnapshotOptions o;
    o.arity = arity;
    auto s = snapshot_build(corpus30(), o);
    CHECK(s.tree.arity() == arity);
    CHECK(s.tree.depth() == complete_heap_depth(s.tree.nodes().size(), arity));
    CHECK(tree_violations(s, Stoplist::bundled()).empty());
  }
}

TEST_CASE("pipeline tokens of the fixture vocabulary are stem fixed points, with known exceptions") {
  auto stop = Stoplist::bundled();
  std::set<std::string> vocabulary;
  for (const auto& a : corpus30()) {
    if (auto t = preprocess_title(a.title, stop, a.id)) vocabulary.insert(t->tokens.begin(), t->tokens.end());
    for (const auto& u : preprocess(a.description, stop, a.id)) vocabulary.insert(u.tokens.begin(), u.tokens.end());
  }
  CHECK(vocabulary.size() > 100);
  // Porter is not idempotent on stems ending in a consonant + "s" that step 1a
  // strips again ("impose" -> "impos" -> "impo").
  const std::set<std::string> known{"agre", "divis", "eas", "extens", "impos", "organis", "paus"};
  std::set<std::string> moved;
  for (const auto& token : vocabulary) {
    if (stem(token) != token) moved.insert(token);
  }
  CHECK(moved == known);
  for (const auto& token : vocabulary) {
    if (!known.count(token)) CHECK(stem(stem(token)) == stem(token));
  }
}

TEST_CASE("degenerate corpora") {
  auto empty = snapshot_build({}, {});
  CHECK(empty.tree.empty());
  CHECK(empty.stats.article_count == 0);
  CHECK(empty.stats.concept_count == 0);

  auto stop = load_corpus(fixture("corpus_stopwords.json"));
  auto s = snapshot_build(stop, {});
  CHECK(s.tree.empty());
  CHECK(s.stats.article_count == stop.size());
  CHECK(s.stats.dropped_count == stop.size());

  SnapshotOptions bad;
  bad.stoplist_path = "/nonexistent/stoplist.txt";
  CHECK_THROWS_AS(snapshot_build(corpus30(), bad), ConfigError);
  SnapshotOptions unary;
  unary.arity = 1;
  CHECK_THROWS_AS(snapshot_build(corpus30(), unary), InvalidArgument);
}

TEST_CASE("repeated articles are built once") {
  auto corpus = corpus30();
  auto doubled = corpus;
  doubled.insert(doubled.end(), corpus.begin(), corpus.end());
  auto s = snapshot_build(doubled, {}, at(1));
  CHECK(s.stats.article_count == 30);
  CHECK(s.tree == snapshot_build(corpus, {}, at(1)).tree);
}

TEST_CASE("custom stoplist changes the tree") {
  TempDir dir;
  cbrowse::testing::write_file(dir / "stop.txt", "# tiny\nthe\nin\nbush\n");
  SnapshotOptions o;
  o.stoplist_path = dir / "stop.txt";
  auto s = snapshot_build(corpus30(), o);
  for (const auto& n : s.tree.nodes()) CHECK(n.label != "bush");
  CHECK(tree_violations(s, Stoplist::from_file(dir / "stop.txt")).empty());
}

TEST_CASE("snapshot json round trip") {
  auto snap = snapshot_build(corpus30(), {}, at(1508500000));
  auto back = Snapshot::parse(snap.dump());
  CHECK(back == snap);
  CHECK(back.dump() == snap.dump());

  auto doc = nlohmann::json::parse(snap.dump());
  doc["tree"]["nodes"][0]["articles"].push_back("ffffffffffffffff");
  doc["tree"]["nodes"][0]["count"] = doc["tree"]["nodes"][0]["articles"].size();
  CHECK_THROWS_AS(Snapshot::from_json(doc), ConsistencyError);
  CHECK_THROWS_AS(Snapshot::parse("{"), ParseError);
}

TEST_CASE("persist and load") {
  TempDir dir;
  CHECK_FALSE(load_latest(dir.path()));

  auto first = snapshot_build(corpus30(), {}, at(1508500000));
  auto path = persist_snapshot(first, dir.path());
  CHECK(path == dir / ("snapshot-" + first.id + ".json"));
  CHECK(std::filesystem::exists(path));
  CHECK(std::filesystem::exists(dir / "latest"));
  CHECK(load_latest(dir.path()) == first);

  auto corpus = corpus30();
  corpus.pop_back();
  auto second = snapshot_build(corpus, {}, at(1508600000));
  persist_snapshot(second, dir.path());
  CHECK(load_latest(dir.path())->id == second.id);
  CHECK(std::filesystem::exists(path));
  CHECK_FALSE(std::filesystem::exists(dir / "latest.tmp"));

  CHECK_THROWS_AS(persist_snapshot(first, dir / "missing"), StorageError);

  cbrowse::testing::write_file(dir / "latest", "../../etc/passwd\n");
  CHECK_THROWS_AS(load_latest(dir.path()), StorageError);
  cbrowse::testing::write_file(dir / "latest", "20000101T000000Z-00000000\n");
  CHECK_THROWS_AS(load_latest(dir.path()), StorageError);
}

TEST_CASE("a failing write leaves latest on the previous snapshot") {
  TempDir dir;
  auto first = snapshot_build(corpus30(), {}, at(1508500000));
  persist_snapshot(first, dir.path());
  auto corpus = corpus30();
  corpus.resize(12);
  auto second = snapshot_build(corpus, {}, at(1508600000));

  for (auto stage : {PersistStage::SnapshotPartial, PersistStage::SnapshotWritten, PersistStage::SnapshotRenamed,
                     PersistStage::LatestWritten}) {
    auto hook = [stage](PersistStage s) {
      if (s == stage) throw StorageError("injected");
    };
    CHECK_THROWS_AS(persist_snapshot(second, dir.path(), hook), StorageError);
    CHECK(load_latest(dir.path())->id == first.id);
  }
  persist_snapshot(second, dir.path());
  CHECK(load_latest(dir.path())->id == second.id);
}

TEST_CASE("a process killed at any persistence stage leaves a loadable latest") {
  TempDir dir;
  auto first = snapshot_build(corpus30(), {}, at(1508500000));
  persist_snapshot(first, dir.path());
  auto corpus = corpus30();
  corpus.resize(20);
  auto second = snapshot_build(corpus, {}, at(1508600000));

  for (auto stage : {PersistStage::SnapshotPartial, PersistStage::SnapshotWritten, PersistStage::SnapshotRenamed,
                     PersistStage::LatestWritten}) {
    int status = in_child([&] {
      persist_snapshot(second, dir.path(), [stage](PersistStage s) {
        if (s == stage) ::kill(::getpid(), SIGKILL);
      });
    });
    REQUIRE(WIFSIGNALED(status));
    CHECK(WTERMSIG(status) == SIGKILL);
    auto loaded = load_latest(dir.path());
    REQUIRE(loaded);
    CHECK(loaded->id == first.id);
    CHECK(*loaded == first);
  }
}

TEST_CASE("SIGKILL at random moments during repeated persistence") {
  TempDir dir;
  std::vector<Snapshot> builds;
  auto corpus = corpus30();
  for (int i = 0; i < 4; ++i) {
    builds.push_back(snapshot_build(corpus, {}, at(1508500000 + i)));
    corpus.pop_back();
  }
  persist_snapshot(builds[0], dir.path());
  std::set<std::string> ids;
  for (const auto& b : builds) ids.insert(b.id);

  std::mt19937 rng(17);
  std::uniform_int_distribution<int> delay_us(0, 4000);
  for (int round = 0; round < 25; ++round) {
    pid_t pid = ::fork();
    REQUIRE(pid >= 0);
    if (pid == 0) {
      for (std::size_t i = 0;; i = (i + 1) % builds.size()) persist_snapshot(builds[i], dir.path());
    }
    ::usleep(static_cast<useconds_t>(delay_us(rng)));
    ::kill(pid, SIGKILL);
    int status = 0;
    ::waitpid(pid, &status, 0);
    auto loaded = load_latest(dir.path());
    REQUIRE(loaded);
    CHECK(ids.count(loaded->id) == 1);
  }
}
