#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cbrowse/article.hpp"

namespace cbrowse {

enum class SourceMode { Live, Fixture };

// Dotted paths into one payload entry ("fields.trailText", "media.0.url").
struct FieldMap {
  std::string title;
  std::string description;
  std::string url;
};

struct SourceConfig {
  std::string name;
  std::string endpoint;          // URL in live mode, file path in fixture mode
  FieldMap field_map;
  std::string credential_ref;    // environment variable holding the API key
  SourceMode mode = SourceMode::Fixture;
  std::string items_path;        // dotted path to the entry array; empty = payload root
  std::string credential_header = "X-Api-Key";
};

struct FetchOptions {
  std::chrono::milliseconds timeout{10'000};
  int max_retries = 2;
  std::chrono::milliseconds backoff{250};  // doubled after each failed attempt
};

// Source config file: JSON array of objects with keys name, endpoint, mode
// ("live" | "fixture"), field_map {title, description, url}, credential_ref
// and the optional items_path / credential_header. Relative fixture paths are
// resolved against `base_dir`. Throws ConfigError.
std::vector<SourceConfig> parse_source_configs(std::string_view text, const std::filesystem::path& base_dir);
std::vector<SourceConfig> load_source_configs(const std::filesystem::path& path);

// Raw payload bytes. Fixture mode reads the file verbatim. Live mode sends a
// GET with the key from `credential_ref` in `credential_header`, retrying
// network failures. Throws ConfigError, TransientFetchError or SourceError.
std::string fetch_source(const SourceConfig& config, const FetchOptions& options = {});

struct DroppedEntry {
  std::size_t index = 0;
  std::string reason;
};

struct NormalizeResult {
  std::vector<Article> articles;
  std::vector<DroppedEntry> dropped;
};

// Maps every entry through the field map. Bad entries are dropped and
// recorded; only a malformed payload (ParseError) or a payload without an
// entry array (InvalidArgument) is fatal.
NormalizeResult normalize(std::string_view raw, const SourceConfig& config, Timestamp fetched_at);

// Concatenates in batch order and keeps the first article for each URL.
std::vector<Article> merge_sources(std::span<const std::vector<Article>> batches);

struct SourceReport {
  std::string source;
  std::size_t articles = 0;
  std::size_t dropped = 0;
  std::optional<std::string> error;
};

struct IngestResult {
  std::vector<Article> corpus;
  std::vector<SourceReport> reports;  // one per configured source, in config order

  std::size_t failed_sources() const;
};

// fetch + normalize per source (sources fetched concurrently), then merge.
// Per-source failures are reported, not thrown.
IngestResult ingest(std::span<const SourceConfig> sources, Timestamp fetched_at, const FetchOptions& options = {});

}  // namespace cbrowse
