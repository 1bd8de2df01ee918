#pragma once

#include <cstddef>
#include <vector>

#include "cbrowse/relation.hpp"

// Exhaustive checkers for optimal_rectangle. They read the relation only
// through FormalContext::has and never call the derivation operators or the
// concept enumerators, so they stay independent of the code they check.
namespace cbrowse::oracle {

inline constexpr std::size_t kAllRectanglesMaxSide = 5;
inline constexpr std::size_t kAllConceptsMaxSide = 8;

enum class Mode { AllRectangles, AllConcepts };

struct Verdict {
  Element element;
  std::int64_t best_gain = 0;
  std::vector<Rectangle> maximal;  // max-gain candidates that are maximal by containment
  Rectangle expected;              // tie-break winner among `maximal`
  Concept actual;                  // what optimal_rectangle returned
  bool agree = false;
};

// Throws InvalidArgument naming the bound when the context is too large for `mode`.
void check_bounds(const FormalContext& context, Mode mode);

// Every rectangle A x B containing `element`, by brute force over subset pairs.
std::vector<Rectangle> all_rectangles(const FormalContext& context, Element element);

// Every closed rectangle containing `element`, by brute-force closure of object subsets.
std::vector<Rectangle> all_concepts(const FormalContext& context, Element element);

Verdict check_element(const FormalContext& context, Element element, Mode mode);
std::vector<Verdict> check_all(const FormalContext& context, Mode mode);

}  // namespace cbrowse::oracle
