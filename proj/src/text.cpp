#include "cbrowse/text.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "cbrowse/digest.hpp"
#include "cbrowse/error.hpp"
#include "cbrowse/porter.hpp"

namespace cbrowse {

namespace detail {
extern const std::string_view kBundledStoplist;
}

namespace {

constexpr std::size_t kMinTokenLength = 2;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

// Position just past a blank line starting at the '\n' at `pos`, or npos.
std::size_t blank_line_end(std::string_view text, std::size_t pos) {
  for (std::size_t i = pos + 1; i < text.size(); ++i) {
    if (text[i] == '\n') return i + 1;
    if (!is_space(text[i])) return std::string_view::npos;
  }
  return std::string_view::npos;
}

}  // namespace

Stoplist Stoplist::bundled() {
  static const Stoplist list = parse(detail::kBundledStoplist);
  return list;
}

Stoplist Stoplist::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read stoplist " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

Stoplist Stoplist::parse(std::string_view text) {
  Stoplist out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = trim(text.substr(start, end - start));
    if (!line.empty() && line.front() != '#') {
      std::string word(line);
      for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      out.words_.insert(std::move(word));
    }
    start = end + 1;
  }
  if (out.words_.empty()) throw ConfigError("stoplist contains no words");
  out.checksum_ = sha256_hex(text);
  return out;
}

std::vector<std::string> tokenize_sentences(std::string_view text) {
  std::vector<std::string> out;
  auto flush = [&](std::size_t from, std::size_t to) {
    auto s = trim(text.substr(from, to - from));
    if (!s.empty()) out.emplace_back(s);
  };
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.' || c == '!' || c == '?' || c == ';') {
      flush(start, i);
      start = i + 1;
    } else if (c == '\n') {
      if (auto next = blank_line_end(text, i); next != std::string_view::npos) {
        flush(start, i);
        start = next;
        i = next - 1;
      }
    }
  }
  if (start < text.size()) flush(start, text.size());
  return out;
}

std::vector<std::string> tokenize_words(std::string_view sentence) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (current.size() >= kMinTokenLength) out.push_back(current);
    current.clear();
  };
  for (char ch : sentence) {
    auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      current += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch;
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::vector<std::string> remove_stopwords(std::span<const std::string> tokens, const Stoplist& stoplist) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (!stoplist.contains(t)) out.push_back(t);
  }
  return out;
}

std::string stem(std::string_view token) { return porter_stem(token); }

namespace {

std::vector<std::string> process_sentence(std::string_view sentence, const Stoplist& stoplist) {
  auto words = remove_stopwords(tokenize_words(sentence), stoplist);
  std::vector<std::string> out;
  out.reserve(words.size());
  for (const auto& w : words) {
    auto s = stem(w);
    // A stem can fall under the length floor ("ies" -> "i") or land on a
    // stopword ("beings" -> "be").
    if (s.size() >= kMinTokenLength && !stoplist.contains(s)) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::vector<SentenceUnit> preprocess(std::string_view text, const Stoplist& stoplist, std::string_view article_id) {
  std::vector<SentenceUnit> out;
  auto sentences = tokenize_sentences(text);
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    auto tokens = process_sentence(sentences[i], stoplist);
    if (tokens.empty()) continue;
    std::string id = article_id.empty() ? std::to_string(i) : std::string(article_id) + "#" + std::to_string(i);
    out.push_back({std::move(id), std::string(article_id), std::move(sentences[i]), std::move(tokens)});
  }
  return out;
}

std::optional<SentenceUnit> preprocess_title(std::string_view title, const Stoplist& stoplist,
                                             std::string_view article_id) {
  SentenceUnit unit{std::string(article_id) + "#title", std::string(article_id), std::string(trim(title)), {}};
  for (const auto& sentence : tokenize_sentences(title)) {
    auto tokens = process_sentence(sentence, stoplist);
    unit.tokens.insert(unit.tokens.end(), tokens.begin(), tokens.end());
  }
  if (unit.tokens.empty()) return std::nullopt;
  return unit;
}

FormalContext build_context(std::span<const SentenceUnit> units) {
  std::vector<std::string> objects;
  std::vector<std::string> attributes;
  std::unordered_map<std::string, std::size_t> attribute_ids;
  std::vector<Element> pairs;
  for (std::size_t o = 0; o < units.size(); ++o) {
    objects.push_back(units[o].id);
    for (const auto& t : units[o].tokens) {
      auto [it, inserted] = attribute_ids.try_emplace(t, attributes.size());
      if (inserted) attributes.push_back(t);
      pairs.push_back({o, it->second});
    }
  }
  return FormalContext(std::move(objects), std::move(attributes), pairs);
}

}  // namespace cbrowse
