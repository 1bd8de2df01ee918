#include <random>

#include "doctest.h"
#include "helpers.hpp"

#include "cbrowse/error.hpp"
#include "cbrowse/oracle.hpp"

using namespace cbrowse;
using cbrowse::testing::k1;
using cbrowse::testing::random_context;

TEST_CASE("oracle agrees on K1 in both modes") {
  auto ctx = k1();
  for (auto mode : {oracle::Mode::AllRectangles, oracle::Mode::AllConcepts}) {
    auto verdicts = oracle::check_all(ctx, mode);
    CHECK(verdicts.size() == 6);
    for (const auto& v : verdicts) CHECK(v.agree);
  }
  auto fc2 = oracle::check_element(ctx, {2, 2}, oracle::Mode::AllRectangles);
  CHECK(fc2.expected.extent == IndexSet{2});
  CHECK(fc2.expected.intent == IndexSet{1, 2});
  CHECK(fc2.best_gain == -1);
}

TEST_CASE("all-rectangles enumeration counts") {
  // Element (O1, P1) of K1 lies in {O1}x{P1}, {O1}x{P1,P2}, {O1,O2}x{P1}, {O1,O2}x{P1,P2}.
  CHECK(oracle::all_rectangles(k1(), {0, 0}).size() == 4);
  // (O3, P2): A in {O3} + any of O1,O2; B in {P2} or {P2,P3} (P3 only with O3 alone).
  CHECK(oracle::all_rectangles(k1(), {2, 1}).size() == 5);
  CHECK(oracle::all_concepts(k1(), {2, 1}).size() == 2);
}

TEST_CASE("oracle bounds") {
  std::mt19937 rng(1);
  auto six = random_context(rng, 6, 6, 0.5);
  CHECK_THROWS_AS(oracle::check_bounds(six, oracle::Mode::AllRectangles), InvalidArgument);
  CHECK_NOTHROW(oracle::check_bounds(six, oracle::Mode::AllConcepts));
  auto nine = random_context(rng, 9, 3, 0.5);
  try {
    oracle::check_bounds(nine, oracle::Mode::AllConcepts);
    FAIL("expected a bound error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("8x8") != std::string::npos);
  }
}

TEST_CASE("optimal_rectangle agrees with the oracles on random contexts") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> density(0.2, 0.9);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<std::size_t> small(1, 5);
    auto ctx = random_context(rng, small(rng), small(rng), density(rng));
    for (const auto& v : oracle::check_all(ctx, oracle::Mode::AllRectangles)) CHECK(v.agree);
  }
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<std::size_t> mid(1, 8);
    auto ctx = random_context(rng, mid(rng), mid(rng), density(rng));
    for (const auto& v : oracle::check_all(ctx, oracle::Mode::AllConcepts)) CHECK(v.agree);
  }
}
