#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/SparseCore>

#include "cbrowse/text.hpp"

namespace cbrowse {

// Term x document occurrence counts and relative term frequencies
// tf(i, j) = n(i, j) / sum_k n(k, j), one document per sentence unit.
//
// Also carries a corpus weight per term: its total occurrences divided by the
// total token count. This is the weight concept labels compare, since it is
// comparable across sentences where per-document tf is not.
class TermIndex {
 public:
  using CountMatrix = Eigen::SparseMatrix<double>;  // exact small integers stored as double

  TermIndex() = default;
  TermIndex(std::vector<std::string> documents, std::vector<std::string> terms, CountMatrix counts);

  const std::vector<std::string>& documents() const noexcept { return documents_; }
  const std::vector<std::string>& terms() const noexcept { return terms_; }

  const CountMatrix& counts() const noexcept { return counts_; }
  const CountMatrix& tf() const noexcept { return tf_; }
  const Eigen::VectorXd& corpus_weights() const noexcept { return corpus_weights_; }

  std::optional<std::size_t> term_index(std::string_view term) const;

  // Throws NotFound for unknown terms or documents.
  long count(std::string_view term, std::size_t document) const;
  double tf(std::string_view term, std::size_t document) const;
  double corpus_weight(std::string_view term) const;

 private:
  std::size_t require_term(std::string_view term) const;

  std::vector<std::string> documents_;
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t> term_ids_;
  CountMatrix counts_;
  CountMatrix tf_;
  Eigen::VectorXd corpus_weights_;
};

// Terms in first-appearance order. Throws InvalidArgument for a unit without tokens.
TermIndex build_index(std::span<const SentenceUnit> units);

}  // namespace cbrowse
