#include "cbrowse/oracle.hpp"

#include <algorithm>
#include <string>

#include "cbrowse/error.hpp"

namespace cbrowse::oracle {

namespace {

IndexSet members(unsigned mask, std::size_t width) {
  IndexSet out;
  for (std::size_t i = 0; i < width; ++i) {
    if (mask & (1u << i)) out.push_back(i);
  }
  return out;
}

std::int64_t area_gain(std::size_t a, std::size_t b) {
  auto x = static_cast<std::int64_t>(a);
  auto y = static_cast<std::int64_t>(b);
  return x * y - (x + y);
}

bool block_in_relation(const FormalContext& ctx, const IndexSet& extent, const IndexSet& intent) {
  for (auto o : extent) {
    for (auto a : intent) {
      if (!ctx.has(o, a)) return false;
    }
  }
  return true;
}

bool contains(const IndexSet& outer, const IndexSet& inner) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

bool rank_before(const FormalContext& ctx, const Rectangle& x, const Rectangle& y) {
  if (x.gain != y.gain) return x.gain > y.gain;
  if (x.extent.size() != y.extent.size()) return x.extent.size() > y.extent.size();
  std::vector<std::string> xs, ys;
  for (auto a : x.intent) xs.push_back(ctx.attributes()[a]);
  for (auto a : y.intent) ys.push_back(ctx.attributes()[a]);
  return xs < ys;
}

}  // namespace

void check_bounds(const FormalContext& context, Mode mode) {
  const std::size_t bound = mode == Mode::AllRectangles ? kAllRectanglesMaxSide : kAllConceptsMaxSide;
  if (context.object_count() > bound || context.attribute_count() > bound) {
    throw InvalidArgument(std::string(mode == Mode::AllRectangles ? "all-rectangles" : "all-concepts") +
                          " oracle supports contexts up to " + std::to_string(bound) + "x" + std::to_string(bound) +
                          ", got " + std::to_string(context.object_count()) + "x" +
                          std::to_string(context.attribute_count()));
  }
}

std::vector<Rectangle> all_rectangles(const FormalContext& context, Element element) {
  check_bounds(context, Mode::AllRectangles);
  const auto n = context.object_count();
  const auto m = context.attribute_count();
  std::vector<Rectangle> out;
  for (unsigned om = 1; om < (1u << n); ++om) {
    if (!(om & (1u << element.object))) continue;
    auto extent = members(om, n);
    for (unsigned am = 1; am < (1u << m); ++am) {
      if (!(am & (1u << element.attribute))) continue;
      auto intent = members(am, m);
      if (!block_in_relation(context, extent, intent)) continue;
      out.push_back({extent, intent, area_gain(extent.size(), intent.size())});
    }
  }
  return out;
}

std::vector<Rectangle> all_concepts(const FormalContext& context, Element element) {
  check_bounds(context, Mode::AllConcepts);
  const auto n = context.object_count();
  const auto m = context.attribute_count();
  std::vector<Rectangle> out;
  for (unsigned om = 1; om < (1u << n); ++om) {
    auto extent = members(om, n);
    IndexSet intent;
    for (std::size_t a = 0; a < m; ++a) {
      bool shared = std::all_of(extent.begin(), extent.end(), [&](std::size_t o) { return context.has(o, a); });
      if (shared) intent.push_back(a);
    }
    if (intent.empty()) continue;
    IndexSet closure;
    for (std::size_t o = 0; o < n; ++o) {
      bool owns = std::all_of(intent.begin(), intent.end(), [&](std::size_t a) { return context.has(o, a); });
      if (owns) closure.push_back(o);
    }
    if (closure != extent) continue;
    if (!std::binary_search(extent.begin(), extent.end(), element.object)) continue;
    if (!std::binary_search(intent.begin(), intent.end(), element.attribute)) continue;
    out.push_back({extent, intent, area_gain(extent.size(), intent.size())});
  }
  return out;
}

Verdict check_element(const FormalContext& context, Element element, Mode mode) {
  check_bounds(context, mode);
  if (!context.has(element)) throw InvalidArgument("element is not in the relation");

  Verdict v;
  v.element = element;
  auto candidates = mode == Mode::AllRectangles ? all_rectangles(context, element) : all_concepts(context, element);
  v.best_gain = std::max_element(candidates.begin(), candidates.end(), [](const auto& x, const auto& y) {
                  return x.gain < y.gain;
                })->gain;

  std::vector<Rectangle> top;
  for (auto& r : candidates) {
    if (r.gain == v.best_gain) top.push_back(r);
  }
  for (const auto& r : top) {
    bool dominated = std::any_of(top.begin(), top.end(), [&](const Rectangle& o) {
      return o != r && contains(o.extent, r.extent) && contains(o.intent, r.intent);
    });
    if (!dominated) v.maximal.push_back(r);
  }
  v.expected = *std::min_element(v.maximal.begin(), v.maximal.end(),
                                 [&](const auto& x, const auto& y) { return rank_before(context, x, y); });
  v.actual = optimal_rectangle(context, element);
  v.agree = v.actual.rectangle == v.expected;
  return v;
}

std::vector<Verdict> check_all(const FormalContext& context, Mode mode) {
  check_bounds(context, mode);
  std::vector<Verdict> out;
  for (const auto& e : context.incidence()) out.push_back(check_element(context, e, mode));
  return out;
}

}  // namespace cbrowse::oracle
