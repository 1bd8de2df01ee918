#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cbrowse/relation.hpp"
#include "cbrowse/term_index.hpp"
#include "cbrowse/text.hpp"

namespace cbrowse {

inline constexpr std::size_t kDefaultArity = 3;

struct LabeledConcept {
  Concept formal;
  std::string label;
  double weight = 0.0;                    // corpus weight of `label`
  std::vector<std::string> article_ids;   // sorted, unique, non-empty
  std::vector<std::string> keywords;      // intent keywords, sorted; unioned on merge
};

struct TreeNode {
  std::string id;
  std::string label;
  double weight = 0.0;
  std::vector<std::string> article_ids;  // sorted
  std::vector<std::string> children;     // in heap position order

  std::size_t count() const noexcept { return article_ids.size(); }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Keyword labels arranged as a complete arity-ary heap on weight. Node ids
// ("n0", "n1", ...) are heap positions, so they are only meaningful within
// one build.
class ConceptTree {
 public:
  ConceptTree() = default;
  ConceptTree(std::size_t arity, std::vector<TreeNode> nodes);

  std::size_t arity() const noexcept { return arity_; }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  bool empty() const noexcept { return nodes_.empty(); }
  std::optional<std::string> root() const;

  const TreeNode* find(std::string_view id) const;
  // Number of levels; 0 for an empty tree.
  std::size_t depth() const;

  nlohmann::ordered_json to_json() const;
  std::string dump() const;
  // Validates structure, counts, unique labels and the heap property.
  static ConceptTree from_json(const nlohmann::json& doc);
  static ConceptTree parse(std::string_view text);

  friend bool operator==(const ConceptTree&, const ConceptTree&) = default;

 private:
  std::size_t arity_ = kDefaultArity;
  std::vector<TreeNode> nodes_;
};

// Optimal-rectangle coverage of the sentence x keyword context.
std::vector<Concept> extract_optimal_concepts(const FormalContext& context);

// Picks the intent keyword with the largest corpus weight (ties: smallest
// keyword). `units` are the context's objects in order; they map the extent to
// article ids. Throws ConsistencyError when a keyword is not indexed.
LabeledConcept label_concept(const Concept& formal, const FormalContext& context, const TermIndex& index,
                             std::span<const SentenceUnit> units);

// One entry per label with unioned articles and keywords, ordered by
// descending weight then label.
std::vector<LabeledConcept> merge_duplicate_labels(std::vector<LabeledConcept> labeled);

// Sorted by descending weight (ties by label) and laid out level-order: the
// children of position i are arity*i+1 .. arity*i+arity. Throws
// InvalidArgument for arity < 2 or duplicate labels.
ConceptTree build_tree(std::span<const LabeledConcept> labeled, std::size_t arity);

// Throws NotFound for an unknown node id.
std::vector<std::string> articles_for_node(const ConceptTree& tree, std::string_view node_id);

// One "label (count)" line per node, two spaces of indent per level. An empty
// tree renders as "(empty)".
std::string render_text(const ConceptTree& tree);

// Smallest number of levels able to hold n nodes in a complete arity-ary heap.
std::size_t complete_heap_depth(std::size_t n, std::size_t arity);

}  // namespace cbrowse
