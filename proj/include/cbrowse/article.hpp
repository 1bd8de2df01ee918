#pragma once

#include <chrono>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace cbrowse {

using Timestamp = std::chrono::sys_seconds;

// A news item in the unified schema. `id` is derived from (source, url).
struct Article {
  std::string id;
  std::string source;
  std::string title;
  std::string description;
  std::string url;
  Timestamp fetched_at{};

  friend bool operator==(const Article&, const Article&) = default;
};

// First 16 hex digits of SHA-256(source '\n' url).
std::string article_id(std::string_view source, std::string_view url);

// scheme "://" authority [path/query/fragment], no whitespace.
bool is_absolute_url(std::string_view url);

std::string format_rfc3339(Timestamp t);
// Accepts "YYYY-MM-DDTHH:MM:SS[.frac](Z|+HH:MM|-HH:MM)"; fractions are truncated.
Timestamp parse_rfc3339(std::string_view text);

// Builds an Article with its id, trimming fields and enforcing the invariants
// (non-empty title, absolute url). Throws InvalidArgument.
Article make_article(std::string source, std::string title, std::string description, std::string url,
                     Timestamp fetched_at);

// Corpus file: JSON array of {source, title, description, url, fetched_at}. A
// missing description reads as empty.
nlohmann::ordered_json article_to_json(const Article& article);
Article article_from_json(const nlohmann::json& doc);
std::string dump_corpus(std::span<const Article> corpus);
// Throws ParseError (with byte offset) for malformed JSON, InvalidArgument for bad records.
std::vector<Article> parse_corpus(std::string_view text);
std::vector<Article> load_corpus(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace cbrowse
