#include "cbrowse/concept_tree.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "cbrowse/error.hpp"

namespace cbrowse {

namespace {

bool heavier(double lw, const std::string& ll, double rw, const std::string& rl) {
  if (lw != rw) return lw > rw;
  return ll < rl;
}

template <typename T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

ConceptTree::ConceptTree(std::size_t arity, std::vector<TreeNode> nodes) : arity_(arity), nodes_(std::move(nodes)) {
  if (arity_ < 2) throw InvalidArgument("tree arity must be >= 2, got " + std::to_string(arity_));
  std::unordered_map<std::string_view, const TreeNode*> by_id;
  std::unordered_set<std::string_view> labels;
  for (const auto& n : nodes_) {
    if (!by_id.emplace(n.id, &n).second) throw InvalidArgument("duplicate node id '" + n.id + "'");
    if (!labels.insert(n.label).second) throw InvalidArgument("duplicate node label '" + n.label + "'");
    if (n.article_ids.empty()) throw InvalidArgument("node '" + n.id + "' has no articles");
    if (!std::is_sorted(n.article_ids.begin(), n.article_ids.end())) {
      throw InvalidArgument("node '" + n.id + "' articles are not sorted");
    }
  }
  std::unordered_set<std::string_view> reached;
  for (const auto& n : nodes_) {
    if (n.children.size() > arity_) throw InvalidArgument("node '" + n.id + "' exceeds the tree arity");
    for (const auto& c : n.children) {
      auto it = by_id.find(c);
      if (it == by_id.end()) throw InvalidArgument("node '" + n.id + "' has unknown child '" + c + "'");
      if (it->second->weight > n.weight) throw InvalidArgument("heap order violated at '" + n.id + "' -> '" + c + "'");
      if (!reached.insert(c).second || c == nodes_.front().id) {
        throw InvalidArgument("node '" + c + "' has more than one parent");
      }
    }
  }
  if (!nodes_.empty() && reached.size() + 1 != nodes_.size()) throw InvalidArgument("tree is not connected");
}

std::optional<std::string> ConceptTree::root() const {
  if (nodes_.empty()) return std::nullopt;
  return nodes_.front().id;
}

const TreeNode* ConceptTree::find(std::string_view id) const {
  auto it = std::find_if(nodes_.begin(), nodes_.end(), [&](const TreeNode& n) { return n.id == id; });
  return it == nodes_.end() ? nullptr : &*it;
}

std::size_t ConceptTree::depth() const {
  if (nodes_.empty()) return 0;
  std::size_t levels = 0;
  std::vector<const TreeNode*> frontier{&nodes_.front()};
  while (!frontier.empty()) {
    ++levels;
    std::vector<const TreeNode*> next;
    for (const auto* n : frontier) {
      for (const auto& c : n->children) next.push_back(find(c));
    }
    frontier = std::move(next);
  }
  return levels;
}

nlohmann::ordered_json ConceptTree::to_json() const {
  nlohmann::ordered_json doc;
  doc["arity"] = arity_;
  doc["root"] = nodes_.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(nodes_.front().id);
  doc["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : nodes_) {
    nlohmann::ordered_json node;
    node["id"] = n.id;
    node["label"] = n.label;
    node["weight"] = n.weight;
    node["count"] = n.count();
    node["articles"] = n.article_ids;
    node["children"] = n.children;
    doc["nodes"].push_back(std::move(node));
  }
  return doc;
}

std::string ConceptTree::dump() const { return to_json().dump(2) + "\n"; }

ConceptTree ConceptTree::from_json(const nlohmann::json& doc) {
  try {
    std::vector<TreeNode> nodes;
    for (const auto& n : doc.at("nodes")) {
      TreeNode node{n.at("id").get<std::string>(), n.at("label").get<std::string>(), n.at("weight").get<double>(),
                    n.at("articles").get<std::vector<std::string>>(), n.at("children").get<std::vector<std::string>>()};
      if (n.at("count").get<std::size_t>() != node.count()) {
        throw InvalidArgument("node '" + node.id + "' count does not match its articles");
      }
      nodes.push_back(std::move(node));
    }
    const auto& root = doc.at("root");
    if (nodes.empty() != root.is_null() || (!nodes.empty() && root.get<std::string>() != nodes.front().id)) {
      throw InvalidArgument("tree root must be the first node");
    }
    return ConceptTree(doc.at("arity").get<std::size_t>(), std::move(nodes));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("invalid tree document: ") + e.what());
  }
}

ConceptTree ConceptTree::parse(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(ParseError::from_json_byte(e.byte), "malformed tree JSON");
  }
  return from_json(doc);
}

std::vector<Concept> extract_optimal_concepts(const FormalContext& context) {
  return coverage_elements(context).rectangles;
}

LabeledConcept label_concept(const Concept& formal, const FormalContext& context, const TermIndex& index,
                             std::span<const SentenceUnit> units) {
  if (units.size() != context.object_count()) {
    throw ConsistencyError("sentence units do not match the context objects");
  }
  LabeledConcept out;
  out.formal = formal;
  bool first = true;
  for (auto a : formal.intent()) {
    const auto& keyword = context.attributes().at(a);
    auto term = index.term_index(keyword);
    if (!term) throw ConsistencyError("keyword '" + keyword + "' is missing from the term index");
    double w = index.corpus_weights()(static_cast<Eigen::Index>(*term));
    if (first || heavier(w, keyword, out.weight, out.label)) {
      out.weight = w;
      out.label = keyword;
      first = false;
    }
    out.keywords.push_back(keyword);
  }
  if (first) throw ConsistencyError("concept has an empty intent");
  for (auto o : formal.extent()) out.article_ids.push_back(units[o].article_id);
  sort_unique(out.article_ids);
  sort_unique(out.keywords);
  if (out.article_ids.empty()) throw ConsistencyError("concept '" + out.label + "' maps to no article");
  return out;
}

std::vector<LabeledConcept> merge_duplicate_labels(std::vector<LabeledConcept> labeled) {
  std::vector<LabeledConcept> out;
  std::unordered_map<std::string, std::size_t> slot;
  for (auto& lc : labeled) {
    auto [it, inserted] = slot.try_emplace(lc.label, out.size());
    if (inserted) {
      out.push_back(std::move(lc));
      continue;
    }
    auto& into = out[it->second];
    into.article_ids.insert(into.article_ids.end(), lc.article_ids.begin(), lc.article_ids.end());
    into.keywords.insert(into.keywords.end(), lc.keywords.begin(), lc.keywords.end());
    sort_unique(into.article_ids);
    sort_unique(into.keywords);
  }
  std::stable_sort(out.begin(), out.end(), [](const LabeledConcept& a, const LabeledConcept& b) {
    return heavier(a.weight, a.label, b.weight, b.label);
  });
  return out;
}

ConceptTree build_tree(std::span<const LabeledConcept> labeled, std::size_t arity) {
  if (arity < 2) throw InvalidArgument("tree arity must be >= 2, got " + std::to_string(arity));
  std::vector<const LabeledConcept*> order;
  std::set<std::string_view> labels;
  for (const auto& lc : labeled) {
    if (!labels.insert(lc.label).second) throw InvalidArgument("duplicate label '" + lc.label + "'");
    order.push_back(&lc);
  }
  std::sort(order.begin(), order.end(), [](const LabeledConcept* a, const LabeledConcept* b) {
    return heavier(a->weight, a->label, b->weight, b->label);
  });

  std::vector<TreeNode> nodes(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    nodes[i].id = "n" + std::to_string(i);
    nodes[i].label = order[i]->label;
    nodes[i].weight = order[i]->weight;
    nodes[i].article_ids = order[i]->article_ids;
    sort_unique(nodes[i].article_ids);
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t c = arity * i + 1; c <= arity * i + arity && c < nodes.size(); ++c) {
      nodes[i].children.push_back(nodes[c].id);
    }
  }
  return ConceptTree(arity, std::move(nodes));
}

std::vector<std::string> articles_for_node(const ConceptTree& tree, std::string_view node_id) {
  const auto* node = tree.find(node_id);
  if (!node) throw NotFound("unknown node '" + std::string(node_id) + "'");
  return node->article_ids;
}

std::string render_text(const ConceptTree& tree) {
  if (tree.empty()) return "(empty)\n";
  std::string out;
  auto visit = [&](auto&& self, const TreeNode& n, std::size_t level) -> void {
    out.append(2 * level, ' ');
    out += n.label + " (" + std::to_string(n.count()) + ")\n";
    for (const auto& c : n.children) self(self, *tree.find(c), level + 1);
  };
  visit(visit, tree.nodes().front(), 0);
  return out;
}

std::size_t complete_heap_depth(std::size_t n, std::size_t arity) {
  std::size_t levels = 0;
  std::size_t capacity = 0;
  std::size_t width = 1;
  while (capacity < n) {
    capacity += width;
    width *= arity;
    ++levels;
  }
  return levels;
}

}  // namespace cbrowse
