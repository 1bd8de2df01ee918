#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace cbrowse {

using Bits = boost::dynamic_bitset<>;

// Sorted, duplicate-free list of object or attribute indices.
using IndexSet = std::vector<std::size_t>;

// One incidence pair (object-index, attribute-index).
struct Element {
  std::size_t object = 0;
  std::size_t attribute = 0;

  friend auto operator<=>(const Element&, const Element&) = default;
};

// Finite objects x attributes binary relation. Immutable once constructed.
//
// Rows and columns are stored as bitsets so the derivation operators reduce to
// word-wise AND over the selected rows (or columns).
class FormalContext {
 public:
  FormalContext() = default;

  // Throws InvalidArgument on duplicate identifiers or out-of-range pairs.
  // Repeated pairs are collapsed.
  FormalContext(std::vector<std::string> objects, std::vector<std::string> attributes,
                std::span<const Element> incidence);

  std::size_t object_count() const noexcept { return objects_.size(); }
  std::size_t attribute_count() const noexcept { return attributes_.size(); }
  std::size_t incidence_size() const noexcept { return pair_count_; }
  bool empty() const noexcept { return pair_count_ == 0; }

  const std::vector<std::string>& objects() const noexcept { return objects_; }
  const std::vector<std::string>& attributes() const noexcept { return attributes_; }

  // Throws InvalidArgument when out of range.
  bool has(std::size_t object, std::size_t attribute) const;
  bool has(Element e) const { return has(e.object, e.attribute); }

  const Bits& row(std::size_t object) const { return rows_.at(object); }
  const Bits& column(std::size_t attribute) const { return columns_.at(attribute); }

  // All pairs in row-major order (object order, then attribute order).
  std::vector<Element> incidence() const;

  std::optional<std::size_t> object_index(std::string_view name) const;
  std::optional<std::size_t> attribute_index(std::string_view name) const;

 private:
  std::vector<std::string> objects_;
  std::vector<std::string> attributes_;
  std::vector<Bits> rows_;     // one bitset over attributes per object
  std::vector<Bits> columns_;  // one bitset over objects per attribute
  std::size_t pair_count_ = 0;
};

// A non-empty extent x intent block contained in the relation.
struct Rectangle {
  IndexSet extent;
  IndexSet intent;
  std::int64_t gain = 0;

  friend bool operator==(const Rectangle&, const Rectangle&) = default;
};

// A closed rectangle: derive_intent(extent) == intent and derive_extent(intent) == extent.
struct Concept {
  Rectangle rectangle;
  bool closed = true;

  const IndexSet& extent() const noexcept { return rectangle.extent; }
  const IndexSet& intent() const noexcept { return rectangle.intent; }
  std::int64_t gain() const noexcept { return rectangle.gain; }

  friend bool operator==(const Concept&, const Concept&) = default;
};

struct Coverage {
  std::vector<Concept> rectangles;
  std::vector<Element> covered;  // sorted row-major
};

// Common attributes of the given objects. The empty set maps to every attribute.
IndexSet derive_intent(const FormalContext& context, std::span<const std::size_t> objects);

// Objects owning all given attributes. The empty set maps to every object.
IndexSet derive_extent(const FormalContext& context, std::span<const std::size_t> attributes);

// |A|*|B| - (|A| + |B|). Both sizes must be >= 1.
std::int64_t gain(std::int64_t extent_size, std::int64_t intent_size);

// Validates non-emptiness and containment, then fills in the gain.
Rectangle make_rectangle(const FormalContext& context, IndexSet extent, IndexSet intent);

bool is_concept(const FormalContext& context, const Rectangle& rectangle);

// Strict weak ordering used for every tie-break: higher gain first, then larger
// extent, then the lexicographically smaller sequence of intent labels (labels
// listed in attribute order).
bool preferred(const FormalContext& context, const Rectangle& lhs, const Rectangle& rhs);

// Every concept with non-empty extent and intent, sorted by descending extent
// size then by intent labels. Throws CapacityError past `limit` concepts.
std::vector<Concept> enumerate_concepts(const FormalContext& context, std::size_t limit);

// Maximum-gain concept containing `element` (ties per `preferred`).
Concept optimal_rectangle(const FormalContext& context, Element element);

// Covers the relation with optimal rectangles; see relation.cpp for the procedure.
Coverage coverage_elements(const FormalContext& context);

// Conversions between index lists and bitsets of a given width.
Bits to_bits(std::span<const std::size_t> indices, std::size_t width);
IndexSet to_indices(const Bits& bits);

}  // namespace cbrowse
