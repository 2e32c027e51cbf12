#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "invarion/closed_loop.hpp"
#include "invarion/errors.hpp"
#include "invarion/frontier.hpp"
#include "invarion/span_solver.hpp"

using namespace invarion;

namespace {

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

// Spacing 1/8 on [-1/2, 1/2] and controls in steps of 1/8: the loop never
// leaves the lattice, so the grid certificate carries over to the real state.
SystemDef doubling() {
  return SystemDef::linear(scalar(2), scalar(1), ControlAlphabet::uniform(-1, 1, 17));
}

GridRegion unit_box() { return GridRegion::box({-0.5}, {0.5}, 9); }

SystemDef doubling_pair() {
  auto c = SystemDef::linear(scalar(2), scalar(1), ControlAlphabet::uniform(-1, 1, 9));
  return SystemDef::product({c, c});
}

GridRegion unit_square() { return GridRegion::box({-0.5, -0.5}, {0.5, 0.5}, 5); }

std::vector<State> grid_states(const GridRegion& q) {
  const auto g = discretize(q);
  std::vector<State> out;
  for (std::size_t e = 0; e < g.size(); ++e) out.emplace_back(g.point(e).begin(), g.point(e).end());
  return out;
}

// Symbols {2j, 2j+1} confusable: n/2 distinguishable symbols per use.
Channel paired(Symbol n) {
  std::vector<std::vector<Symbol>> rel;
  std::vector<std::string> names;
  for (Symbol b = 0; b < n; ++b) {
    names.push_back(std::to_string(b));
    rel.push_back({b & ~1u, b | 1u});
  }
  return Channel(names, rel);
}

}  // namespace

TEST(BuildStrategy, SingleWordOverOneSymbolChannel) {
  const auto zero = SystemDef::linear(scalar(0), scalar(0), ControlAlphabet::uniform(-1, 1, 3));
  const auto q = GridRegion::box({-1}, {1}, 11);
  const auto sol = r_inv(zero, q, 3).solution;
  ASSERT_EQ(sol.cardinality(), 1u);
  const auto s = build_strategy(sol, Channel::noiseless(1), q);
  EXPECT_EQ(achieved_rates(s).front(), 0.0);
  const auto t = simulate(zero, q, s, Adversary::seeded_random(1), 30, State{0.8});
  EXPECT_TRUE(t.ok);
  EXPECT_EQ(t.states.back()[0], 0.0);
}

TEST(BuildStrategy, TooManyWordsForPentagonInOneUse) {
  SpanningSolution sol;
  sol.tau = 1;
  for (ControlIndex u = 0; u < 3; ++u) sol.words.push_back(constant_word(u, 1));
  sol.selector.assign(discretize(unit_box()).size(), 0);
  try {
    build_strategy(sol, Channel::pentagon(), unit_box());
    FAIL();
  } catch (const CapacityError& e) {
    EXPECT_EQ(e.required(), 3u);
    EXPECT_EQ(e.available(), 2u);
  }
}

TEST(BuildStrategy, ForcedCodebookLimitBelowCardinality) {
  const auto sol = r_inv(doubling(), unit_box(), 2).solution;
  ASSERT_GE(sol.cardinality(), 2u);
  EXPECT_THROW(build_strategy(sol, Channel::noiseless(4), unit_box(), sol.cardinality() - 1),
               CapacityError);
  EXPECT_NO_THROW(build_strategy(sol, Channel::noiseless(4), unit_box(), sol.cardinality()));
}

TEST(BuildStrategy, RejectsMarginBelowSnappingError) {
  const auto sol = r_inv(doubling(), unit_box(), 1).solution;
  EXPECT_THROW(build_strategy(sol, Channel::noiseless(8), unit_box().with_margin(0.01)),
               InputError);
}

TEST(Simulate, CertifiedStrategyIsSoundUnderEveryResolution) {
  const auto sys = doubling();
  const auto q = unit_box();
  const auto sol = r_inv(sys, q, 2).solution;
  const auto s = build_strategy(sol, paired(8), q);
  const auto x0 = grid_states(q);
  const auto adversaries = exhaustive_adversaries(s);
  EXPECT_EQ(adversaries.size(), resolution_count(paired(8)));
  for (const auto& adv : adversaries) {
    const auto scan = escape_scan(sys, q, s, adv, 60, x0);
    EXPECT_EQ(scan.scanned, x0.size());
    EXPECT_EQ(scan.escapes, 0u);
    const auto t = simulate(sys, q, s, adv, 60, x0[x0.size() / 3]);
    EXPECT_TRUE(t.ok);
    EXPECT_EQ(t.decode_mismatches, 0u);
    for (const auto& b : t.blocks) EXPECT_EQ(b.sent_index, b.decoded_index);
  }
}

TEST(Simulate, GreedyAndRandomAdversariesCannotBreakCertifiedStrategy) {
  const auto sys = doubling();
  const auto q = unit_box();
  const auto s = build_strategy(r_inv(sys, q, 2).solution, paired(8), q);
  for (const auto& x : grid_states(q)) {
    EXPECT_TRUE(simulate(sys, q, s, Adversary::greedy_escape(), 20, x).ok);
    EXPECT_TRUE(simulate(sys, q, s, Adversary::seeded_random(7), 20, x).ok);
  }
}

TEST(Simulate, HorizonRoundsUpToWholeBlocks) {
  const auto sys = doubling();
  const auto q = unit_box();
  const auto s = build_strategy(r_inv(sys, q, 2).solution, Channel::noiseless(4), q);
  const auto t = simulate(sys, q, s, Adversary::fixed({}), 5, State{0.25});
  EXPECT_EQ(t.steps, 6u);
  EXPECT_EQ(t.states.size(), 7u);
  EXPECT_EQ(t.blocks.size(), 3u);
}

TEST(Simulate, SeededRunsAreReproducible) {
  const auto sys = doubling();
  const auto q = unit_box();
  const auto s = build_strategy(r_inv(sys, q, 2).solution, paired(8), q);
  const auto a = simulate(sys, q, s, Adversary::seeded_random(11), 40, State{-0.25});
  const auto b = simulate(sys, q, s, Adversary::seeded_random(11), 40, State{-0.25});
  EXPECT_EQ(a.states, b.states);
  ASSERT_EQ(a.blocks.size(), b.blocks.size());
  for (std::size_t i = 0; i < a.blocks.size(); ++i) EXPECT_EQ(a.blocks[i].received, b.blocks[i].received);
}

TEST(Network, ProductWitnessIsSoundOverPerComponentChannels) {
  const auto sys = doubling_pair();
  const auto q = unit_square();
  const auto f = frontier(sys, q, 1, pivot_pools(sys, q, 1));
  ASSERT_FALSE(f.points.empty());
  const auto& w = f.points.front().witness;
  std::vector<Channel> channels;
  for (const auto& set : w) channels.push_back(Channel::noiseless(std::max<std::size_t>(set.size(), 1)));
  const auto s = build_network_strategy(sys, q, w, channels);
  ASSERT_TRUE(s.networked());
  const auto rates = achieved_rates(s);
  ASSERT_EQ(rates.size(), 2u);
  for (std::size_t c = 0; c < 2; ++c) EXPECT_LE(rates[c], std::log2(double(w[c].size())) + 1e-12);
  for (const auto& adv : exhaustive_adversaries(s)) {
    EXPECT_EQ(escape_scan(sys, q, s, adv, 30, grid_states(q)).escapes, 0u);
  }
}

TEST(Network, CapacityErrorNamesComponent) {
  const auto sys = doubling_pair();
  const auto q = unit_square();
  const auto f = frontier(sys, q, 1, pivot_pools(sys, q, 1));
  const auto& w = f.points.front().witness;
  std::size_t big = w[0].size() >= w[1].size() ? 0 : 1;
  ASSERT_GE(w[big].size(), 2u);
  std::vector<Channel> channels{Channel::noiseless(8), Channel::noiseless(8)};
  channels[big] = Channel::all_confusable(2);
  try {
    build_network_strategy(sys, q, w, channels);
    FAIL();
  } catch (const CapacityError& e) {
    EXPECT_NE(std::string(e.what()).find("component " + std::to_string(big)), std::string::npos);
  }
}

TEST(Network, BelowCapacityTheStateEscapes) {
  const auto sys = doubling_pair();
  const auto q = unit_square();
  const auto f = frontier(sys, q, 1, pivot_pools(sys, q, 1));
  const auto& w = f.points.front().witness;
  const std::vector<Channel> channels{Channel::all_confusable(2), Channel::all_confusable(2)};
  const auto s = build_rate_limited_strategy(sys, q, w, channels);
  EXPECT_TRUE(s.truncated);
  for (double r : achieved_rates(s)) EXPECT_EQ(r, 0.0);
  const auto scan = escape_scan(sys, q, s, Adversary::greedy_escape(), 200, grid_states(q));
  EXPECT_GT(scan.escapes, 0u);
  ASSERT_TRUE(scan.first_state.has_value());
  ASSERT_TRUE(scan.first_escape_step.has_value());
  EXPECT_LE(*scan.first_escape_step, 200u);
}

TEST(Transcript, VerdictMatchesFirstEscape) {
  const auto sys = doubling_pair();
  const auto q = unit_square();
  const auto f = frontier(sys, q, 1, pivot_pools(sys, q, 1));
  const std::vector<Channel> channels{Channel::all_confusable(2), Channel::all_confusable(2)};
  const auto s = build_rate_limited_strategy(sys, q, f.points.front().witness, channels);
  for (const auto& x : grid_states(q)) {
    const auto t = simulate(sys, q, s, Adversary::fixed({}), 50, x);
    EXPECT_EQ(t.ok, !t.first_escape.has_value());
    if (t.first_escape) {
      EXPECT_EQ(*t.first_escape, t.steps);
      EXPECT_FALSE(q.in_interior(t.states.back(), 0.0));
    }
  }
}

TEST(ExhaustiveAdversaries, ProductOfLinkCounts) {
  const auto sys = doubling_pair();
  const auto q = unit_square();
  const auto f = frontier(sys, q, 1, pivot_pools(sys, q, 1));
  const auto& w = f.points.front().witness;
  // A noisy channel on the smaller link keeps the product enumerable.
  const std::size_t noisy = w[0].size() <= w[1].size() ? 0 : 1;
  std::vector<Channel> channels{Channel::noiseless(std::max<std::size_t>(w[0].size(), 1)),
                                Channel::noiseless(std::max<std::size_t>(w[1].size(), 1))};
  channels[noisy] = paired(Symbol(2 * std::max<std::size_t>(w[noisy].size(), 1)));
  const auto s = build_network_strategy(sys, q, w, channels);
  EXPECT_EQ(exhaustive_adversaries(s).size(),
            resolution_count(channels[0]) * resolution_count(channels[1]));
  EXPECT_THROW(exhaustive_adversaries(s, 1), InputError);
}
