#include <gtest/gtest.h>

#include <bit>
#include <random>

#include "invarion/cover.hpp"
#include "invarion/errors.hpp"

using namespace invarion;

namespace {

CoverInstance make(std::size_t n, const std::vector<std::vector<std::size_t>>& sets) {
  CoverInstance inst;
  inst.element_count = n;
  for (const auto& s : sets) {
    Bitset b(n);
    for (auto e : s) b.set(e);
    inst.coverage.push_back(b);
  }
  return inst;
}

// Smallest subset size by enumerating every subset of candidates.
std::size_t brute_force(const CoverInstance& inst) {
  const std::size_t m = inst.candidate_count();
  std::size_t best = m + 1;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<bool> hit(inst.element_count, false);
    for (std::size_t j = 0; j < m; ++j) {
      if (!(mask >> j & 1)) continue;
      for (std::size_t e = 0; e < inst.element_count; ++e) {
        if (inst.coverage[j].test(e)) hit[e] = true;
      }
    }
    if (std::all_of(hit.begin(), hit.end(), [](bool b) { return b; })) {
      best = std::min<std::size_t>(best, std::popcount(mask));
    }
  }
  return best;
}

bool covers(const CoverInstance& inst, const std::vector<std::size_t>& chosen) {
  Bitset u(inst.element_count);
  for (auto j : chosen) u |= inst.coverage[j];
  return u.all();
}

CoverInstance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t m, double p) {
  std::bernoulli_distribution coin(p);
  CoverInstance inst;
  inst.element_count = n;
  for (std::size_t j = 0; j < m; ++j) {
    Bitset b(n);
    for (std::size_t e = 0; e < n; ++e) {
      if (coin(rng)) b.set(e);
    }
    inst.coverage.push_back(b);
  }
  return inst;
}

}  // namespace

TEST(MinCover, SingleSetCoversAll) {
  const auto inst = make(3, {{0, 1}, {2}, {0, 1, 2}});
  const auto r = min_cover(inst, SolveMode::kExact);
  EXPECT_EQ(r.chosen, std::vector<std::size_t>{2});
  EXPECT_TRUE(r.optimal);
}

TEST(MinCover, TwoSetsNeeded) {
  const auto inst = make(4, {{0, 1}, {2, 3}, {0, 2}, {1, 3}});
  const auto r = min_cover(inst, SolveMode::kExact);
  EXPECT_EQ(r.chosen.size(), 2u);
  EXPECT_TRUE(covers(inst, r.chosen));
}

TEST(MinCover, ExactMatchesBruteForceOnRandomInstances) {
  std::mt19937_64 rng(2024);
  int solved = 0;
  while (solved < 40) {
    const auto inst = random_instance(rng, 20, 15, 0.2);
    if (!inst.uncovered().empty()) continue;
    const auto exact = min_cover(inst, SolveMode::kExact);
    const auto greedy = min_cover(inst, SolveMode::kGreedy);
    ASSERT_TRUE(covers(inst, exact.chosen));
    ASSERT_TRUE(covers(inst, greedy.chosen));
    EXPECT_EQ(exact.chosen.size(), brute_force(inst));
    EXPECT_GE(greedy.chosen.size(), exact.chosen.size());
    EXPECT_TRUE(std::is_sorted(exact.chosen.begin(), exact.chosen.end()));
    ++solved;
  }
}

TEST(MinCover, GreedyWithinLogarithmicFactor) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto inst = random_instance(rng, 60, 40, 0.1);
    if (!inst.uncovered().empty()) continue;
    const auto exact = min_cover(inst, SolveMode::kExact);
    const auto greedy = min_cover(inst, SolveMode::kGreedy);
    EXPECT_LE(double(greedy.chosen.size()), (std::log(60.0) + 1) * double(exact.chosen.size()));
  }
}

TEST(MinCover, InfeasibleReportsUncoveredElements) {
  const auto inst = make(4, {{0}, {1, 2}});
  try {
    min_cover(inst, SolveMode::kExact);
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.uncovered(), std::vector<std::size_t>{3});
  }
}

TEST(MinCover, TiesGoToLowestIndex) {
  const auto inst = make(2, {{0, 1}, {0, 1}, {0, 1}});
  EXPECT_EQ(min_cover(inst, SolveMode::kExact).chosen, std::vector<std::size_t>{0});
  EXPECT_EQ(min_cover(inst, SolveMode::kGreedy).chosen, std::vector<std::size_t>{0});
}

TEST(MinCover, NodeBudgetReturnsIncumbent) {
  std::mt19937_64 rng(9);
  auto inst = random_instance(rng, 120, 200, 0.05);
  if (!inst.uncovered().empty()) GTEST_SKIP();
  CoverOptions opts;
  opts.node_budget = 10;
  const auto r = min_cover(inst, SolveMode::kExact, opts);
  EXPECT_TRUE(covers(inst, r.chosen));
}

TEST(Selector, MapsEachElementToFirstCoveringWord) {
  const auto inst = make(4, {{0, 1}, {1, 2, 3}, {3}});
  const std::vector<std::size_t> chosen{0, 1};
  EXPECT_EQ(make_selector(inst, chosen), (std::vector<std::uint32_t>{0, 0, 1, 1}));
  EXPECT_THROW(make_selector(inst, {0}), InfeasibleError);
}
