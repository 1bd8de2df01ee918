#include "cbrowse/article.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <regex>
#include <sstream>

#include "cbrowse/digest.hpp"
#include "cbrowse/error.hpp"

namespace cbrowse {

namespace {

std::string trimmed(std::string s) {
  auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string::npos) return {};
  auto last = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string article_id(std::string_view source, std::string_view url) {
  std::string key(source);
  key += '\n';
  key += url;
  return sha256_hex(key).substr(0, 16);
}

bool is_absolute_url(std::string_view url) {
  static const std::regex pattern(R"(^[A-Za-z][A-Za-z0-9+.\-]*://[^\s/?#]+([/?#][^\s]*)?$)");
  return std::regex_match(url.begin(), url.end(), pattern);
}

std::string format_rfc3339(Timestamp t) {
  std::time_t raw = std::chrono::system_clock::to_time_t(t);
  std::tm parts{};
  gmtime_r(&raw, &parts);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &parts);
  return buf;
}

Timestamp parse_rfc3339(std::string_view text) {
  static const std::regex pattern(
      R"(^(\d{4})-(\d{2})-(\d{2})[Tt ](\d{2}):(\d{2}):(\d{2})(\.\d+)?([Zz]|([+-])(\d{2}):(\d{2}))$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(text.begin(), text.end(), m, pattern)) {
    throw InvalidArgument("not an RFC 3339 timestamp: '" + std::string(text) + "'");
  }
  auto num = [&](int i) { return std::stoi(m[i].str()); };
  std::chrono::year_month_day date{std::chrono::year{num(1)}, std::chrono::month{static_cast<unsigned>(num(2))},
                                   std::chrono::day{static_cast<unsigned>(num(3))}};
  if (!date.ok() || num(4) > 23 || num(5) > 59 || num(6) > 60) {
    throw InvalidArgument("timestamp out of range: '" + std::string(text) + "'");
  }
  auto t = std::chrono::sys_days{date} + std::chrono::hours{num(4)} + std::chrono::minutes{num(5)} +
           std::chrono::seconds{num(6)};
  if (m[9].matched) {
    auto offset = std::chrono::hours{num(10)} + std::chrono::minutes{num(11)};
    t = m[9].str() == "+" ? t - offset : t + offset;
  }
  return std::chrono::time_point_cast<std::chrono::seconds>(t);
}

Article make_article(std::string source, std::string title, std::string description, std::string url,
                     Timestamp fetched_at) {
  Article a;
  a.source = trimmed(std::move(source));
  a.title = trimmed(std::move(title));
  a.description = trimmed(std::move(description));
  a.url = trimmed(std::move(url));
  a.fetched_at = fetched_at;
  if (a.source.empty()) throw InvalidArgument("article source is empty");
  if (a.title.empty()) throw InvalidArgument("article title is empty");
  if (!is_absolute_url(a.url)) throw InvalidArgument("article url '" + a.url + "' is not absolute");
  a.id = article_id(a.source, a.url);
  return a;
}

nlohmann::ordered_json article_to_json(const Article& article) {
  nlohmann::ordered_json doc;
  doc["source"] = article.source;
  doc["title"] = article.title;
  doc["description"] = article.description;
  doc["url"] = article.url;
  doc["fetched_at"] = format_rfc3339(article.fetched_at);
  return doc;
}

Article article_from_json(const nlohmann::json& doc) {
  try {
    return make_article(doc.at("source").get<std::string>(), doc.at("title").get<std::string>(),
                        doc.value("description", std::string{}), doc.at("url").get<std::string>(),
                        parse_rfc3339(doc.at("fetched_at").get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("invalid article record: ") + e.what());
  }
}

std::string dump_corpus(std::span<const Article> corpus) {
  auto doc = nlohmann::ordered_json::array();
  for (const auto& a : corpus) doc.push_back(article_to_json(a));
  return doc.dump(2) + "\n";
}

std::vector<Article> parse_corpus(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(ParseError::from_json_byte(e.byte), "malformed corpus JSON");
  }
  if (!doc.is_array()) throw InvalidArgument("corpus must be a JSON array of articles");
  std::vector<Article> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    try {
      out.push_back(article_from_json(doc[i]));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("corpus entry " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Article> load_corpus(const std::filesystem::path& path) { return parse_corpus(read_text_file(path)); }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace cbrowse
