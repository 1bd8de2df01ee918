#include "cbrowse/ingestion.hpp"

#include <cstdlib>
#include <future>
#include <regex>
#include <thread>
#include <unordered_set>

#include "httplib.h"

#include "cbrowse/error.hpp"

namespace cbrowse {

namespace {

using nlohmann::json;

const json* resolve(const json& doc, std::string_view path) {
  const json* node = &doc;
  std::size_t start = 0;
  while (start <= path.size() && !path.empty()) {
    auto end = path.find('.', start);
    if (end == std::string_view::npos) end = path.size();
    std::string key(path.substr(start, end - start));
    if (node->is_object()) {
      auto it = node->find(key);
      if (it == node->end()) return nullptr;
      node = &*it;
    } else if (node->is_array() && !key.empty() &&
               key.find_first_not_of("0123456789") == std::string::npos) {
      auto i = std::stoul(key);
      if (i >= node->size()) return nullptr;
      node = &(*node)[i];
    } else {
      return nullptr;
    }
    start = end + 1;
    if (end == path.size()) break;
  }
  return node;
}

std::string field(const json& entry, const std::string& path, bool null_is_empty) {
  const json* v = resolve(entry, path);
  if (!v) throw InvalidArgument("missing field '" + path + "'");
  if (v->is_null() && null_is_empty) return {};
  if (!v->is_string()) throw InvalidArgument("field '" + path + "' is not a string");
  return v->get<std::string>();
}

SourceMode parse_mode(const std::string& mode) {
  if (mode == "live") return SourceMode::Live;
  if (mode == "fixture") return SourceMode::Fixture;
  throw ConfigError("unknown source mode '" + mode + "'");
}

std::string fetch_live(const SourceConfig& config, const FetchOptions& options) {
  if (config.credential_ref.empty()) throw ConfigError(config.name + ": live mode needs a credential_ref");
  const char* key = std::getenv(config.credential_ref.c_str());
  if (!key || !*key) {
    throw ConfigError(config.name + ": environment variable " + config.credential_ref + " is not set");
  }
  static const std::regex url_parts(R"(^(https?://[^/?#]+)([/?#].*)?$)");
  std::smatch m;
  if (!std::regex_match(config.endpoint, m, url_parts)) {
    throw ConfigError(config.name + ": endpoint '" + config.endpoint + "' is not an http(s) URL");
  }
  const std::string base = m[1].str();
  const std::string target = m[2].matched ? m[2].str() : "/";

  httplib::Client client(base);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers{{config.credential_header, key}, {"Accept", "application/json"}};

  std::string last_error;
  auto delay = options.backoff;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    auto res = client.Get(target, headers);
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) throw SourceError(config.name, res->status);
    return res->body;
  }
  throw TransientFetchError(config.name, "fetch failed after " + std::to_string(options.max_retries + 1) +
                                             " attempts: " + last_error);
}

}  // namespace

std::vector<SourceConfig> parse_source_configs(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed source config at byte " + std::to_string(ParseError::from_json_byte(e.byte)));
  }
  if (!doc.is_array()) throw ConfigError("source config must be a JSON array");
  std::vector<SourceConfig> out;
  std::unordered_set<std::string> names;
  try {
    for (const auto& entry : doc) {
      SourceConfig c;
      c.name = entry.at("name").get<std::string>();
      c.endpoint = entry.at("endpoint").get<std::string>();
      c.mode = parse_mode(entry.at("mode").get<std::string>());
      const auto& fm = entry.at("field_map");
      c.field_map = {fm.at("title").get<std::string>(), fm.at("description").get<std::string>(),
                     fm.at("url").get<std::string>()};
      c.credential_ref = entry.value("credential_ref", std::string{});
      c.items_path = entry.value("items_path", std::string{});
      c.credential_header = entry.value("credential_header", std::string("X-Api-Key"));
      if (c.name.empty()) throw ConfigError("source name is empty");
      if (!names.insert(c.name).second) throw ConfigError("duplicate source name '" + c.name + "'");
      if (c.field_map.title.empty() || c.field_map.description.empty() || c.field_map.url.empty()) {
        throw ConfigError(c.name + ": field_map must map title, description and url");
      }
      if (entry.contains("api_key") || entry.contains("key")) {
        throw ConfigError(c.name + ": credentials belong in the environment, not the config file");
      }
      if (c.mode == SourceMode::Fixture && std::filesystem::path(c.endpoint).is_relative()) {
        c.endpoint = (base_dir / c.endpoint).lexically_normal().string();
      }
      out.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid source config: ") + e.what());
  }
  return out;
}

std::vector<SourceConfig> load_source_configs(const std::filesystem::path& path) {
  return parse_source_configs(read_text_file(path), path.parent_path());
}

std::string fetch_source(const SourceConfig& config, const FetchOptions& options) {
  if (config.mode == SourceMode::Live) return fetch_live(config, options);
  try {
    return read_text_file(config.endpoint);
  } catch (const ConfigError&) {
    throw ConfigError(config.name + ": fixture '" + config.endpoint + "' is not readable");
  }
}

NormalizeResult normalize(std::string_view raw, const SourceConfig& config, Timestamp fetched_at) {
  json doc;
  try {
    doc = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ParseError(ParseError::from_json_byte(e.byte), config.name + ": malformed payload");
  }
  const json* items = config.items_path.empty() ? &doc : resolve(doc, config.items_path);
  if (!items || !items->is_array()) {
    throw InvalidArgument(config.name + ": payload has no entry array at '" + config.items_path + "'");
  }
  NormalizeResult out;
  for (std::size_t i = 0; i < items->size(); ++i) {
    const auto& entry = (*items)[i];
    try {
      out.articles.push_back(make_article(config.name, field(entry, config.field_map.title, false),
                                          field(entry, config.field_map.description, true),
                                          field(entry, config.field_map.url, false), fetched_at));
    } catch (const InvalidArgument& e) {
      out.dropped.push_back({i, e.what()});
    }
  }
  return out;
}

std::vector<Article> merge_sources(std::span<const std::vector<Article>> batches) {
  std::vector<Article> out;
  std::unordered_set<std::string> urls;
  for (const auto& batch : batches) {
    for (const auto& a : batch) {
      if (urls.insert(a.url).second) out.push_back(a);
    }
  }
  return out;
}

std::size_t IngestResult::failed_sources() const {
  std::size_t n = 0;
  for (const auto& r : reports) n += r.error.has_value();
  return n;
}

IngestResult ingest(std::span<const SourceConfig> sources, Timestamp fetched_at, const FetchOptions& options) {
  std::vector<std::future<std::string>> payloads;
  payloads.reserve(sources.size());
  for (const auto& s : sources) {
    payloads.push_back(std::async(std::launch::async, [&s, &options] { return fetch_source(s, options); }));
  }

  IngestResult out;
  std::vector<std::vector<Article>> batches;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    SourceReport report{sources[i].name, 0, 0, std::nullopt};
    try {
      auto normalized = normalize(payloads[i].get(), sources[i], fetched_at);
      report.articles = normalized.articles.size();
      report.dropped = normalized.dropped.size();
      batches.push_back(std::move(normalized.articles));
    } catch (const Error& e) {
      report.error = e.what();
    }
    out.reports.push_back(std::move(report));
  }
  out.corpus = merge_sources(batches);
  return out;
}

}  // namespace cbrowse
