#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>

#include "invarion/channel.hpp"
#include "invarion/errors.hpp"

using namespace invarion;

namespace {

Graph cycle(std::size_t n) {
  Graph g(n);
  for (std::size_t i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

std::size_t brute_force_mis(const Graph& g) {
  const std::size_t n = g.size();
  std::size_t best = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (size <= best) continue;
    bool independent = true;
    for (std::size_t a = 0; a < n && independent; ++a) {
      if (!(mask >> a & 1)) continue;
      for (std::size_t b = a + 1; b < n && independent; ++b) {
        if ((mask >> b & 1) && g.adjacent(a, b)) independent = false;
      }
    }
    if (independent) best = size;
  }
  return best;
}

Channel binary_z() {
  return Channel({"0", "1"}, {{0}, {0, 1}});
}

}  // namespace

TEST(Confusability, Examples) {
  EXPECT_EQ(confusability_graph(Channel::noiseless(4)).edge_count(), 0u);
  EXPECT_EQ(confusability_graph(Channel::all_confusable(4)).edge_count(), 6u);
  const auto z = confusability_graph(binary_z());
  EXPECT_EQ(z.edge_count(), 1u);
  EXPECT_TRUE(z.adjacent(0, 1));
  EXPECT_EQ(confusability_graph(Channel::pentagon()), cycle(5));
}

TEST(Channel, RejectsInvalidRelations) {
  EXPECT_THROW(Channel({"a", "b"}, {{0}, {}}), InputError);
  EXPECT_THROW(Channel({"a"}, {{1}}), InputError);
}

TEST(StrongProduct, Examples) {
  const Graph one(1);
  EXPECT_EQ(strong_product(cycle(5), one), cycle(5));
  EXPECT_EQ(strong_product(Graph(3), Graph(4)).edge_count(), 0u);
}

TEST(StrongProduct, PentagonSquareMatchesPairwiseRule) {
  const auto c5 = cycle(5);
  const auto p = strong_product(c5, c5);
  ASSERT_EQ(p.size(), 25u);
  for (std::size_t u = 0; u < 25; ++u) {
    for (std::size_t v = 0; v < 25; ++v) {
      const std::size_t a = u / 5, b = u % 5, c = v / 5, d = v % 5;
      const bool first = a == c || c5.adjacent(a, c);
      const bool second = b == d || c5.adjacent(b, d);
      EXPECT_EQ(p.adjacent(u, v), u != v && first && second) << u << "," << v;
    }
  }
}

TEST(StrongPower, EqualsBlockChannelGraph) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 2 + rng() % 4;
    std::vector<std::vector<Symbol>> rel(n);
    std::vector<std::string> names;
    for (std::size_t b = 0; b < n; ++b) {
      names.push_back(std::to_string(b));
      for (std::size_t o = 0; o < n; ++o) {
        if (o == b || rng() % 4 == 0) rel[b].push_back(Symbol(o));
      }
    }
    const Channel ch(names, rel);
    for (std::size_t k = 1; k <= 3; ++k) {
      EXPECT_EQ(confusability_graph(block_channel(ch, k)), strong_power(confusability_graph(ch), k));
    }
  }
}

TEST(MaxIndependentSet, Examples) {
  EXPECT_EQ(max_independent_set(Graph(6)).size, 6u);
  Graph k5(5);
  for (std::size_t a = 0; a < 5; ++a) {
    for (std::size_t b = a + 1; b < 5; ++b) k5.add_edge(a, b);
  }
  EXPECT_EQ(max_independent_set(k5).size, 1u);
  EXPECT_EQ(max_independent_set(cycle(5)).size, 2u);
  const auto sq = max_independent_set(strong_product(cycle(5), cycle(5)));
  EXPECT_EQ(sq.size, 5u);
  EXPECT_EQ(brute_force_mis(strong_product(cycle(5), cycle(5))), 5u);
}

TEST(MaxIndependentSet, MatchesBruteForceAndWitnessIsIndependent) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + rng() % 18;
    Graph g(n);
    const double p = 0.1 + 0.8 * double(rng() % 100) / 100.0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        if (double(rng() % 1000) / 1000.0 < p) g.add_edge(a, b);
      }
    }
    const auto mis = max_independent_set(g);
    EXPECT_EQ(mis.size, brute_force_mis(g));
    ASSERT_EQ(mis.witness.size(), mis.size);
    for (auto a : mis.witness) {
      for (auto b : mis.witness) EXPECT_FALSE(a != b && g.adjacent(a, b));
    }
  }
}

TEST(MaxIndependentSet, CapIsEnforced) {
  EXPECT_THROW(max_independent_set(Graph(kExactMisCap + 1)), InputError);
}

TEST(CliqueCover, CoversEveryVertexWithCliques) {
  const auto g = strong_product(cycle(5), cycle(5));
  const auto cover = greedy_clique_cover(g);
  std::vector<int> seen(g.size(), 0);
  for (const auto& c : cover) {
    for (auto a : c) {
      ++seen[a];
      for (auto b : c) EXPECT_TRUE(a == b || g.adjacent(a, b));
    }
  }
  for (int s : seen) EXPECT_EQ(s, 1);
  EXPECT_GE(cover.size(), max_independent_set(g).size);
}

TEST(Capacity, Examples) {
  const auto noiseless = zero_error_capacity_bounds(Channel::noiseless(2), 3);
  EXPECT_EQ(noiseless.lower, 1.0);
  EXPECT_EQ(noiseless.upper, 1.0);
  const auto none = zero_error_capacity_bounds(Channel::all_confusable(3), 3);
  EXPECT_EQ(none.lower, 0.0);
  EXPECT_EQ(none.upper, 0.0);
  const auto pent = zero_error_capacity_bounds(Channel::pentagon(), 2);
  EXPECT_NEAR(pent.lower, 0.5 * std::log2(5.0), 1e-12);
  EXPECT_LE(pent.lower, pent.upper);
}

TEST(Capacity, LowerBoundNonDecreasingInBlockLength) {
  double prev = 0;
  for (std::size_t k = 1; k <= 2; ++k) {
    const auto b = zero_error_capacity_bounds(Channel::pentagon(), k);
    EXPECT_GE(b.lower, prev);
    prev = b.lower;
  }
}

TEST(Capacity, StopsAtCapWithDiagnostic) {
  const auto b = zero_error_capacity_bounds(Channel::pentagon(), 4);
  EXPECT_EQ(b.per_k.size(), 2u);
  EXPECT_FALSE(b.diagnostics.empty());
}

TEST(Codebook, Examples) {
  const auto nb = build_codebook(Channel::noiseless(2), 3, 8);
  EXPECT_EQ(nb.size(), 8u);
  EXPECT_TRUE(verify_codebook(Channel::noiseless(2), nb));
  const auto p1 = build_codebook(Channel::pentagon(), 1, 2);
  EXPECT_TRUE(verify_codebook(Channel::pentagon(), p1));
  EXPECT_FALSE(confusability_graph(Channel::pentagon()).adjacent(p1.words[0][0], p1.words[1][0]));
  try {
    build_codebook(Channel::pentagon(), 1, 3);
    FAIL();
  } catch (const CapacityError& e) {
    EXPECT_EQ(e.required(), 3u);
    EXPECT_EQ(e.available(), 2u);
  }
}

TEST(Codebook, PentagonBlockTwoHoldsFiveWords) {
  const auto cb = build_codebook(Channel::pentagon(), 2, 5);
  EXPECT_TRUE(verify_codebook(Channel::pentagon(), cb));
  EXPECT_EQ(certified_codebook_size(Channel::pentagon(), 2), 5u);
}

TEST(Codebook, LongBlocksUseProductConstruction) {
  // Pairs {0,1} and {2,3} confusable: 2 distinguishable symbols per use.
  const Channel ch({"a", "b", "c", "d"}, {{0, 1}, {0, 1}, {2, 3}, {2, 3}});
  EXPECT_EQ(certified_codebook_size(ch, 6), 64u);
  const auto cb = build_codebook(ch, 6, 51);
  EXPECT_TRUE(verify_codebook(ch, cb));
}

TEST(Decode, RecoversIndexUnderEveryOutput) {
  const auto ch = Channel::pentagon();
  const auto cb = build_codebook(ch, 2, 5);
  for (std::size_t w = 0; w < cb.size(); ++w) {
    for (auto o1 : ch.outputs(cb.words[w][0])) {
      for (auto o2 : ch.outputs(cb.words[w][1])) {
        const std::vector<Symbol> rx{o1, o2};
        EXPECT_EQ(decode(ch, cb, rx), std::optional<std::size_t>(w));
      }
    }
  }
}

TEST(Resolutions, CountAndEnumeration) {
  EXPECT_EQ(resolution_count(Channel::pentagon()), 32u);
  const auto all = enumerate_resolutions(Channel::pentagon());
  ASSERT_EQ(all.size(), 32u);
  for (const auto& r : all) {
    for (Symbol b = 0; b < 5; ++b) EXPECT_TRUE(Channel::pentagon().can_output(b, r[b]));
  }
  EXPECT_THROW(enumerate_resolutions(Channel::pentagon(), 10), InputError);
  std::mt19937_64 rng(1);
  const auto r = random_resolution(Channel::pentagon(), rng);
  for (Symbol b = 0; b < 5; ++b) EXPECT_TRUE(Channel::pentagon().can_output(b, r[b]));
}
