#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cbrowse/article.hpp"
#include "cbrowse/concept_tree.hpp"

namespace cbrowse {

struct SnapshotOptions {
  std::size_t arity = kDefaultArity;
  bool include_descriptions = false;
  std::filesystem::path stoplist_path;  // empty: bundled list
};

struct SnapshotStats {
  std::size_t article_count = 0;
  std::size_t dropped_count = 0;   // articles that produced no sentence unit
  std::size_t concept_count = 0;   // optimal concepts before label merging
  std::int64_t build_ms = 0;

  friend bool operator==(const SnapshotStats&, const SnapshotStats&) = default;
};

// One immutable build. Shared as shared_ptr<const Snapshot>.
struct Snapshot {
  std::string id;
  Timestamp created_at{};
  std::vector<Article> corpus;
  ConceptTree tree;
  SnapshotStats stats;

  const Article* article(std::string_view article_id) const;

  nlohmann::ordered_json to_json() const;
  std::string dump() const;
  // Checks that every article id in the tree exists in the corpus.
  static Snapshot from_json(const nlohmann::json& doc);
  static Snapshot parse(std::string_view text);

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

// Runs the pipeline: title units (plus description sentences when enabled) ->
// index -> context -> optimal concepts -> labels -> merge -> tree. Articles
// with a repeated id keep their first occurrence. Throws ConfigError for an
// unreadable stoplist and InvalidArgument for arity < 2.
Snapshot snapshot_build(std::span<const Article> corpus, const SnapshotOptions& options = {},
                        Timestamp created_at = {});

// "YYYYMMDDTHHMMSSZ-" followed by 8 hex digits of the content digest.
std::string make_snapshot_id(Timestamp created_at, std::string_view content);

enum class PersistStage {
  SnapshotPartial,   // half the snapshot bytes written to the temp file
  SnapshotWritten,   // temp file complete and synced, not yet renamed
  SnapshotRenamed,
  LatestWritten,     // latest.tmp complete, not yet renamed
};

// Called at each stage; tests use it to crash or fail a write midway.
using PersistHook = std::function<void(PersistStage)>;

// Writes snapshot-<id>.json and then the `latest` pointer, each through a temp
// file, fsync and rename. Returns the snapshot file path. Throws StorageError.
std::filesystem::path persist_snapshot(const Snapshot& snapshot, const std::filesystem::path& dir,
                                       const PersistHook& hook = {});

// The snapshot `latest` names, or nullopt when there is none yet. Throws
// StorageError when `latest` names a missing or unreadable file.
std::optional<Snapshot> load_latest(const std::filesystem::path& dir);

}  // namespace cbrowse
