#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cbrowse/relation.hpp"

namespace cbrowse {

// Set of lowercase surface-form stopwords plus the SHA-256 of the text they were read from.
class Stoplist {
 public:
  // The list shipped in data/stoplist_en.txt, compiled into the library.
  static Stoplist bundled();
  // Throws ConfigError when the file cannot be read or holds no words.
  static Stoplist from_file(const std::filesystem::path& path);
  // One word per line, '#' comments, blank lines ignored. Throws ConfigError when empty.
  static Stoplist parse(std::string_view text);

  bool contains(std::string_view word) const { return words_.find(word) != words_.end(); }
  std::size_t size() const noexcept { return words_.size(); }
  const std::string& checksum() const noexcept { return checksum_; }
  const std::set<std::string, std::less<>>& words() const noexcept { return words_; }

 private:
  std::set<std::string, std::less<>> words_;
  std::string checksum_;
};

struct SentenceUnit {
  std::string id;
  std::string article_id;
  std::string raw;
  std::vector<std::string> tokens;  // stopword-free, stemmed, lowercase, length >= 2
};

// Splits on '.', '!', '?', ';' and blank lines; trims and drops empty segments.
std::vector<std::string> tokenize_sentences(std::string_view text);

// Splits on whitespace and non-alphanumeric ASCII, lowercases, drops tokens
// shorter than two bytes. Bytes >= 0x80 count as word characters.
std::vector<std::string> tokenize_words(std::string_view sentence);

std::vector<std::string> remove_stopwords(std::span<const std::string> tokens, const Stoplist& stoplist);

std::string stem(std::string_view token);

// tokenize_sentences -> tokenize_words -> remove_stopwords -> stem, dropping
// sentences left without tokens. Unit ids are "<article_id>#<sentence>" (or
// just the sentence number when article_id is empty).
std::vector<SentenceUnit> preprocess(std::string_view text, const Stoplist& stoplist,
                                     std::string_view article_id = {});

// A headline as a single unit: the tokens of all its sentence fragments in order.
std::optional<SentenceUnit> preprocess_title(std::string_view title, const Stoplist& stoplist,
                                             std::string_view article_id);

// Objects are unit ids, attributes are distinct tokens in first-appearance
// order, a pair is present when the token occurs in the unit at least once.
FormalContext build_context(std::span<const SentenceUnit> units);

}  // namespace cbrowse
