#include "cbrowse/term_index.hpp"

#include "cbrowse/error.hpp"

namespace cbrowse {

TermIndex::TermIndex(std::vector<std::string> documents, std::vector<std::string> terms, CountMatrix counts)
    : documents_(std::move(documents)), terms_(std::move(terms)), counts_(std::move(counts)) {
  if (counts_.rows() != static_cast<Eigen::Index>(terms_.size()) ||
      counts_.cols() != static_cast<Eigen::Index>(documents_.size())) {
    throw InvalidArgument("count matrix shape does not match terms x documents");
  }
  for (std::size_t i = 0; i < terms_.size(); ++i) term_ids_.emplace(terms_[i], i);
  counts_.makeCompressed();

  // Column sums -> tf = counts * diag(1 / colsum) over non-empty columns.
  Eigen::VectorXd column_totals = (Eigen::RowVectorXd::Ones(counts_.rows()) * counts_).transpose();
  Eigen::VectorXd inverse = column_totals.unaryExpr([](double t) { return t > 0 ? 1.0 / t : 0.0; });
  tf_ = counts_ * inverse.asDiagonal();

  const double total = column_totals.sum();
  Eigen::VectorXd row_totals = counts_ * Eigen::VectorXd::Ones(counts_.cols());
  corpus_weights_ = total > 0 ? Eigen::VectorXd(row_totals / total) : Eigen::VectorXd::Zero(counts_.rows());
}

std::optional<std::size_t> TermIndex::term_index(std::string_view term) const {
  auto it = term_ids_.find(std::string(term));
  if (it == term_ids_.end()) return std::nullopt;
  return it->second;
}

std::size_t TermIndex::require_term(std::string_view term) const {
  auto i = term_index(term);
  if (!i) throw NotFound("term '" + std::string(term) + "' is not indexed");
  return *i;
}

long TermIndex::count(std::string_view term, std::size_t document) const {
  if (document >= documents_.size()) throw NotFound("document " + std::to_string(document) + " is not indexed");
  return static_cast<long>(counts_.coeff(static_cast<Eigen::Index>(require_term(term)),
                                         static_cast<Eigen::Index>(document)));
}

double TermIndex::tf(std::string_view term, std::size_t document) const {
  if (document >= documents_.size()) throw NotFound("document " + std::to_string(document) + " is not indexed");
  return tf_.coeff(static_cast<Eigen::Index>(require_term(term)), static_cast<Eigen::Index>(document));
}

double TermIndex::corpus_weight(std::string_view term) const {
  return corpus_weights_(static_cast<Eigen::Index>(require_term(term)));
}

TermIndex build_index(std::span<const SentenceUnit> units) {
  std::vector<std::string> documents;
  std::vector<std::string> terms;
  std::unordered_map<std::string, Eigen::Index> ids;
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t j = 0; j < units.size(); ++j) {
    if (units[j].tokens.empty()) throw InvalidArgument("sentence unit '" + units[j].id + "' has no tokens");
    documents.push_back(units[j].id);
    for (const auto& t : units[j].tokens) {
      auto [it, inserted] = ids.try_emplace(t, static_cast<Eigen::Index>(terms.size()));
      if (inserted) terms.push_back(t);
      entries.emplace_back(it->second, static_cast<Eigen::Index>(j), 1.0);
    }
  }
  TermIndex::CountMatrix counts(static_cast<Eigen::Index>(terms.size()), static_cast<Eigen::Index>(units.size()));
  counts.setFromTriplets(entries.begin(), entries.end());  // duplicates are summed
  return TermIndex(std::move(documents), std::move(terms), std::move(counts));
}

}  // namespace cbrowse
