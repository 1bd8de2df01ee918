#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cbrowse/relation.hpp"

namespace cbrowse::testing {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(CBROWSE_FIXTURE_DIR) / name; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("cbrowse-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << bytes;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// K1: O1 {P1,P2}, O2 {P1,P2}, O3 {P2,P3}.
inline FormalContext k1() {
  std::vector<Element> pairs{{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 1}, {2, 2}};
  return FormalContext({"O1", "O2", "O3"}, {"P1", "P2", "P3"}, pairs);
}

inline FormalContext from_rows(const std::vector<std::vector<int>>& rows) {
  std::vector<std::string> objects, attributes;
  std::vector<Element> pairs;
  for (std::size_t o = 0; o < rows.size(); ++o) objects.push_back("o" + std::to_string(o + 1));
  const std::size_t m = rows.empty() ? 0 : rows.front().size();
  for (std::size_t a = 0; a < m; ++a) attributes.push_back("p" + std::to_string(a + 1));
  for (std::size_t o = 0; o < rows.size(); ++o) {
    for (std::size_t a = 0; a < m; ++a) {
      if (rows[o][a]) pairs.push_back({o, a});
    }
  }
  return FormalContext(objects, attributes, pairs);
}

// n x m context with each pair present with probability `density`. Attribute
// labels are shuffled so label order and index order disagree.
inline FormalContext random_context(std::mt19937& rng, std::size_t n, std::size_t m, double density) {
  std::bernoulli_distribution coin(density);
  std::vector<std::string> objects, attributes;
  for (std::size_t o = 0; o < n; ++o) objects.push_back("o" + std::to_string(o));
  for (std::size_t a = 0; a < m; ++a) attributes.push_back("k" + std::to_string(a));
  std::shuffle(attributes.begin(), attributes.end(), rng);
  std::vector<Element> pairs;
  for (std::size_t o = 0; o < n; ++o) {
    for (std::size_t a = 0; a < m; ++a) {
      if (coin(rng)) pairs.push_back({o, a});
    }
  }
  return FormalContext(objects, attributes, pairs);
}

}  // namespace cbrowse::testing
