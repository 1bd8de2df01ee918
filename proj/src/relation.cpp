#include "cbrowse/relation.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

#include "cbrowse/error.hpp"

namespace cbrowse {

namespace {

constexpr std::size_t kSubsetClosureMaxObjects = 20;

void require_unique(const std::vector<std::string>& names, const char* kind) {
  std::unordered_set<std::string_view> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) {
      throw InvalidArgument(std::string("duplicate ") + kind + " identifier '" + n + "'");
    }
  }
}

void check_indices(std::span<const std::size_t> indices, std::size_t bound, const char* kind) {
  for (auto i : indices) {
    if (i >= bound) {
      throw InvalidArgument(std::string(kind) + " index " + std::to_string(i) + " out of range (size " +
                            std::to_string(bound) + ")");
    }
  }
}

// Attributes of `universe` shared by every object in `extent`.
Bits intent_of(const FormalContext& ctx, const Bits& extent, const Bits& universe) {
  Bits out = universe;
  for (auto o = extent.find_first(); o != Bits::npos; o = extent.find_next(o)) out &= ctx.row(o);
  return out;
}

// Objects of `universe` owning every attribute in `intent`.
Bits extent_of(const FormalContext& ctx, const Bits& intent, const Bits& universe) {
  Bits out = universe;
  for (auto a = intent.find_first(); a != Bits::npos; a = intent.find_next(a)) out &= ctx.column(a);
  return out;
}

Concept make_concept(const Bits& extent, const Bits& intent) {
  Concept c;
  c.rectangle.extent = to_indices(extent);
  c.rectangle.intent = to_indices(intent);
  c.rectangle.gain = gain(static_cast<std::int64_t>(c.rectangle.extent.size()),
                          static_cast<std::int64_t>(c.rectangle.intent.size()));
  return c;
}

// Close-by-One over the subcontext objects(universe) x attributes(attr_universe).
// Emits every concept of the subcontext with a non-empty extent; the visitor
// returns false to stop.
class CloseByOne {
 public:
  using Visitor = std::function<bool(const Bits& extent, const Bits& intent)>;

  CloseByOne(const FormalContext& ctx, Bits objects, Bits attributes)
      : ctx_(ctx), objects_(std::move(objects)), attributes_(std::move(attributes)) {}

  void run(const Visitor& visit) {
    if (objects_.none()) return;
    stopped_ = false;
    descend(objects_, intent_of(ctx_, objects_, attributes_), 0, visit);
  }

 private:
  void descend(const Bits& extent, const Bits& intent, std::size_t start, const Visitor& visit) {
    if (!visit(extent, intent)) {
      stopped_ = true;
      return;
    }
    for (auto j = attributes_.find_first(); j != Bits::npos && !stopped_; j = attributes_.find_next(j)) {
      if (j < start || intent.test(j)) continue;
      Bits next_extent = extent & ctx_.column(j);
      if (next_extent.none()) continue;
      Bits next_intent = intent_of(ctx_, next_extent, attributes_);
      if (!same_prefix(intent, next_intent, j)) continue;
      descend(next_extent, next_intent, j + 1, visit);
    }
  }

  // Canonicity test: the closure may not add any attribute before j.
  static bool same_prefix(const Bits& before, const Bits& after, std::size_t j) {
    for (auto a = after.find_first(); a != Bits::npos && a < j; a = after.find_next(a)) {
      if (!before.test(a)) return false;
    }
    return true;
  }

  const FormalContext& ctx_;
  Bits objects_;
  Bits attributes_;
  bool stopped_ = false;
};

bool label_sequence_less(const FormalContext& ctx, const IndexSet& lhs, const IndexSet& rhs) {
  const auto& names = ctx.attributes();
  return std::lexicographical_compare(lhs.begin(), lhs.end(), rhs.begin(), rhs.end(),
                                      [&](std::size_t a, std::size_t b) { return names[a] < names[b]; });
}

std::vector<Concept> enumerate_by_subset_closure(const FormalContext& ctx, std::size_t limit) {
  const std::size_t n = ctx.object_count();
  const Bits all_objects = Bits(n).set();
  const Bits all_attributes = Bits(ctx.attribute_count()).set();
  std::map<Bits, Bits> closed;  // extent -> intent

  // Depth-first over object subsets so each intent is one AND away from its parent's.
  std::function<void(std::size_t, const Bits&)> visit = [&](std::size_t next, const Bits& intent) {
    Bits extent = extent_of(ctx, intent, all_objects);
    if (extent.any() && intent.any()) {
      if (closed.emplace(extent, intent).second && closed.size() > limit) {
        throw CapacityError(limit, "formal context has more concepts than allowed");
      }
    }
    for (std::size_t o = next; o < n; ++o) visit(o + 1, intent & ctx.row(o));
  };
  visit(0, all_attributes);

  std::vector<Concept> out;
  out.reserve(closed.size());
  for (const auto& [extent, intent] : closed) out.push_back(make_concept(extent, intent));
  return out;
}

std::vector<Concept> enumerate_by_close_by_one(const FormalContext& ctx, std::size_t limit) {
  std::vector<Concept> out;
  CloseByOne cbo(ctx, Bits(ctx.object_count()).set(), Bits(ctx.attribute_count()).set());
  cbo.run([&](const Bits& extent, const Bits& intent) {
    if (intent.none()) return true;
    if (out.size() == limit) throw CapacityError(limit, "formal context has more concepts than allowed");
    out.push_back(make_concept(extent, intent));
    return true;
  });
  return out;
}

}  // namespace

FormalContext::FormalContext(std::vector<std::string> objects, std::vector<std::string> attributes,
                             std::span<const Element> incidence)
    : objects_(std::move(objects)), attributes_(std::move(attributes)) {
  require_unique(objects_, "object");
  require_unique(attributes_, "attribute");
  rows_.assign(objects_.size(), Bits(attributes_.size()));
  columns_.assign(attributes_.size(), Bits(objects_.size()));
  for (const auto& e : incidence) {
    if (e.object >= objects_.size() || e.attribute >= attributes_.size()) {
      throw InvalidArgument("incidence pair (" + std::to_string(e.object) + ", " + std::to_string(e.attribute) +
                            ") out of range");
    }
    if (!rows_[e.object].test(e.attribute)) {
      rows_[e.object].set(e.attribute);
      columns_[e.attribute].set(e.object);
      ++pair_count_;
    }
  }
}

bool FormalContext::has(std::size_t object, std::size_t attribute) const {
  if (object >= objects_.size() || attribute >= attributes_.size()) {
    throw InvalidArgument("element (" + std::to_string(object) + ", " + std::to_string(attribute) +
                          ") out of range");
  }
  return rows_[object].test(attribute);
}

std::vector<Element> FormalContext::incidence() const {
  std::vector<Element> out;
  out.reserve(pair_count_);
  for (std::size_t o = 0; o < rows_.size(); ++o) {
    for (auto a = rows_[o].find_first(); a != Bits::npos; a = rows_[o].find_next(a)) out.push_back({o, a});
  }
  return out;
}

std::optional<std::size_t> FormalContext::object_index(std::string_view name) const {
  auto it = std::find(objects_.begin(), objects_.end(), name);
  if (it == objects_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - objects_.begin());
}

std::optional<std::size_t> FormalContext::attribute_index(std::string_view name) const {
  auto it = std::find(attributes_.begin(), attributes_.end(), name);
  if (it == attributes_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - attributes_.begin());
}

Bits to_bits(std::span<const std::size_t> indices, std::size_t width) {
  Bits out(width);
  for (auto i : indices) out.set(i);
  return out;
}

IndexSet to_indices(const Bits& bits) {
  IndexSet out;
  out.reserve(bits.count());
  for (auto i = bits.find_first(); i != Bits::npos; i = bits.find_next(i)) out.push_back(i);
  return out;
}

IndexSet derive_intent(const FormalContext& context, std::span<const std::size_t> objects) {
  check_indices(objects, context.object_count(), "object");
  Bits extent = to_bits(objects, context.object_count());
  return to_indices(intent_of(context, extent, Bits(context.attribute_count()).set()));
}

IndexSet derive_extent(const FormalContext& context, std::span<const std::size_t> attributes) {
  check_indices(attributes, context.attribute_count(), "attribute");
  Bits intent = to_bits(attributes, context.attribute_count());
  return to_indices(extent_of(context, intent, Bits(context.object_count()).set()));
}

std::int64_t gain(std::int64_t extent_size, std::int64_t intent_size) {
  if (extent_size < 1 || intent_size < 1) {
    throw InvalidArgument("rectangle sides must be >= 1, got " + std::to_string(extent_size) + " x " +
                          std::to_string(intent_size));
  }
  return extent_size * intent_size - (extent_size + intent_size);
}

Rectangle make_rectangle(const FormalContext& context, IndexSet extent, IndexSet intent) {
  std::sort(extent.begin(), extent.end());
  extent.erase(std::unique(extent.begin(), extent.end()), extent.end());
  std::sort(intent.begin(), intent.end());
  intent.erase(std::unique(intent.begin(), intent.end()), intent.end());
  if (extent.empty() || intent.empty()) throw InvalidArgument("rectangle sides must be non-empty");
  for (auto o : extent) {
    for (auto a : intent) {
      if (!context.has(o, a)) {
        throw InvalidArgument("pair (" + std::to_string(o) + ", " + std::to_string(a) + ") is not in the relation");
      }
    }
  }
  Rectangle r{std::move(extent), std::move(intent), 0};
  r.gain = gain(static_cast<std::int64_t>(r.extent.size()), static_cast<std::int64_t>(r.intent.size()));
  return r;
}

bool is_concept(const FormalContext& context, const Rectangle& rectangle) {
  return derive_intent(context, rectangle.extent) == rectangle.intent &&
         derive_extent(context, rectangle.intent) == rectangle.extent;
}

bool preferred(const FormalContext& context, const Rectangle& lhs, const Rectangle& rhs) {
  if (lhs.gain != rhs.gain) return lhs.gain > rhs.gain;
  if (lhs.extent.size() != rhs.extent.size()) return lhs.extent.size() > rhs.extent.size();
  return label_sequence_less(context, lhs.intent, rhs.intent);
}

std::vector<Concept> enumerate_concepts(const FormalContext& context, std::size_t limit) {
  if (context.object_count() == 0 || context.attribute_count() == 0) {
    throw InvalidArgument("context needs at least one object and one attribute");
  }
  if (limit == 0) throw InvalidArgument("concept limit must be positive");

  auto out = context.object_count() <= kSubsetClosureMaxObjects ? enumerate_by_subset_closure(context, limit)
                                                                 : enumerate_by_close_by_one(context, limit);
  std::sort(out.begin(), out.end(), [&](const Concept& a, const Concept& b) {
    if (a.extent().size() != b.extent().size()) return a.extent().size() > b.extent().size();
    return label_sequence_less(context, a.intent(), b.intent());
  });
  return out;
}

Concept optimal_rectangle(const FormalContext& context, Element element) {
  if (!context.has(element)) {
    throw InvalidArgument("element (" + std::to_string(element.object) + ", " + std::to_string(element.attribute) +
                          ") is not in the relation");
  }
  // The concepts containing (a, b) are exactly the concepts of the subcontext
  // column(b) x row(a): every object there owns b and every attribute there is
  // owned by a, so a and b survive every closure.
  std::optional<Concept> best;
  CloseByOne cbo(context, context.column(element.attribute), context.row(element.object));
  cbo.run([&](const Bits& extent, const Bits& intent) {
    Concept candidate = make_concept(extent, intent);
    if (!best || preferred(context, candidate.rectangle, best->rectangle)) best = std::move(candidate);
    return true;
  });
  if (!best) throw ConsistencyError("no concept contains an element of the relation");
  return *best;
}

// Greedy pass: scan pairs row-major; each uncovered pair contributes its
// optimal rectangle. Reduction pass: visit rectangles least-preferred first
// and drop any whose pairs are all covered by the rectangles still kept.
// Survivors keep their greedy order.
Coverage coverage_elements(const FormalContext& context) {
  Coverage out;
  out.covered = context.incidence();
  if (out.covered.empty()) return out;

  const std::size_t width = context.attribute_count();
  std::vector<int> hits(context.object_count() * width, 0);
  auto mark = [&](const Concept& c, int delta) {
    for (auto o : c.extent()) {
      for (auto a : c.intent()) hits[o * width + a] += delta;
    }
  };

  std::vector<Concept> greedy;
  for (const auto& e : out.covered) {
    if (hits[e.object * width + e.attribute] > 0) continue;
    greedy.push_back(optimal_rectangle(context, e));
    mark(greedy.back(), 1);
  }

  std::vector<std::size_t> order(greedy.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return preferred(context, greedy[b].rectangle, greedy[a].rectangle);
  });
  std::vector<bool> keep(greedy.size(), true);
  for (auto i : order) {
    const auto& c = greedy[i];
    bool redundant = true;
    for (auto o : c.extent()) {
      for (auto a : c.intent()) redundant = redundant && hits[o * width + a] > 1;
    }
    if (redundant) {
      keep[i] = false;
      mark(c, -1);
    }
  }
  for (std::size_t i = 0; i < greedy.size(); ++i) {
    if (keep[i]) out.rectangles.push_back(std::move(greedy[i]));
  }
  return out;
}

}  // namespace cbrowse
