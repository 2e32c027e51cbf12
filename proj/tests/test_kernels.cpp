#include <gtest/gtest.h>

#include <cmath>

#include "invarion/kernels.hpp"
#include "invarion/span_solver.hpp"

using namespace invarion;

namespace {

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

// Two doubling maps on a coarse torus; dyadic controls keep states on the lattice.
struct SyncToy {
  SystemDef system = product({SystemDef::circle_multiplier(2, ControlAlphabet::uniform(-0.25, 0.25, 5)),
                              SystemDef::circle_multiplier(2, ControlAlphabet::uniform(-0.25, 0.25, 5))});
  GridRegion region = GridRegion::circle_band(0.2, 8, 0.05);
};

// Coupled disc region; both components stay on the 1/2 lattice.
struct DiscToy {
  SystemDef system = product({SystemDef::linear(scalar(2), scalar(1), ControlAlphabet::uniform(-1, 1, 5)),
                              SystemDef::linear(scalar(-1), scalar(1), ControlAlphabet::uniform(-0.5, 0.5, 3))});
  GridRegion region = GridRegion::ball({0, 0}, 1.0, 5, 0.1);
};

// Oracle: search every word of the other component, simulating the joint
// system without any snapping.
bool brute_force_feasible(const SystemDef& sys, const GridRegion& q, std::size_t i,
                          std::span<const double> x, const ControlWord& wi) {
  const std::size_t other = 1 - i;
  const auto m = sys.component(other).alphabet_size();
  const std::size_t tau = wi.horizon();
  std::uint64_t total = 1;
  for (std::size_t k = 0; k < tau; ++k) total *= m;
  for (std::uint64_t n = 0; n < total; ++n) {
    std::uint64_t r = n;
    ControlWord wo;
    wo.entries.resize(tau);
    for (std::size_t k = tau; k-- > 0;) {
      wo.entries[k] = static_cast<ControlIndex>(r % m);
      r /= m;
    }
    std::vector<ControlWord> parts(2);
    parts[i] = wi;
    parts[other] = wo;
    const auto traj = trajectory(sys, x, sys.joint_word(parts));
    bool ok = true;
    for (std::size_t k = 1; k <= tau && ok; ++k) ok = q.in_interior(traj[k]);
    if (ok) return true;
  }
  return false;
}

template <typename Toy>
void check_against_brute_force(const Toy& toy, std::size_t tau) {
  const auto grid = discretize(toy.region);
  for (std::size_t i = 0; i < 2; ++i) {
    SubsystemModel model(toy.system, toy.region, grid, i);
    const auto words = enumerate_words(toy.system.component(i).alphabet_size(), tau);
    for (std::size_t w = 0; w < words.size(); ++w) {
      const auto dp = model.feasible(words.word(w));
      for (std::size_t e = 0; e < grid.size(); ++e) {
        const bool oracle = brute_force_feasible(toy.system, toy.region, i, grid.point(e),
                                                 words.control_word(w));
        ASSERT_EQ(dp.test(e), oracle) << "component " << i << " word " << w << " element " << e;
        ASSERT_EQ(model.feasible_element(e, words.word(w)), oracle);
      }
    }
  }
}

}  // namespace

TEST(StaySet, ZeroMapKeepsEverything) {
  const auto s = SystemDef::linear(scalar(0), scalar(0), ControlAlphabet::from_values({{0.0}}));
  const auto q = GridRegion::box({-1}, {1}, 11);
  const auto g = discretize(q);
  const std::vector<ControlIndex> w{0, 0, 0, 0};
  EXPECT_TRUE(stay_set(s, q, g, w).all());
}

TEST(StaySet, WholeCircleKeepsEverything) {
  const auto s = SystemDef::circle_multiplier(2, ControlAlphabet::uniform(-1, 1, 9));
  const auto q = GridRegion::circle(32);
  const auto g = discretize(q);
  const std::vector<ControlIndex> w{3, 8, 0};
  EXPECT_TRUE(stay_set(s, q, g, w).all());
}

TEST(StaySet, ScalarDoublingMatchesInequalityScan) {
  const auto s = SystemDef::linear(scalar(2), scalar(1), ControlAlphabet::uniform(-1, 1, 33));
  const auto q = GridRegion::box({-0.5}, {0.5}, 201);
  const auto g = discretize(q);
  const std::vector<ControlIndex> w{16};  // u = 0
  const auto b = stay_set(s, q, g, w);
  const double eps = q.margin();
  for (std::size_t e = 0; e < g.size(); ++e) {
    const double y = 2 * g.point(e)[0];
    EXPECT_EQ(b.test(e), -0.5 + eps < y && y < 0.5 - eps) << g.point(e)[0];
  }
}

TEST(Kernels, ParallelStayCoverageMatchesReference) {
  const SyncToy toy;
  const auto g = discretize(toy.region);
  const auto pool = enumerate_words(toy.system.alphabet_size(), 2);
  const auto par = stay_coverage(toy.system, toy.region, g, pool);
  const auto ref = reference::stay_coverage(toy.system, toy.region, g, pool);
  EXPECT_EQ(par.coverage, ref.coverage);
}

TEST(Kernels, EarlyExitReportsLowestFullCandidate) {
  const auto s = SystemDef::linear(scalar(0.5), scalar(1), ControlAlphabet::uniform(-1, 1, 9));
  const auto q = GridRegion::box({-1}, {1}, 21);
  const auto g = discretize(q);
  const auto pool = enumerate_words(9, 3);
  KernelOptions o;
  o.stop_at_full = true;
  const auto par = stay_coverage(s, q, g, pool, o);
  const auto ref = reference::stay_coverage(s, q, g, pool, o);
  const auto all = reference::stay_coverage(s, q, g, pool);
  std::optional<std::size_t> first;
  for (std::size_t j = 0; j < all.coverage.size() && !first; ++j) {
    if (all.coverage[j].all()) first = j;
  }
  ASSERT_TRUE(first.has_value());
  EXPECT_EQ(par.full, first);
  EXPECT_EQ(ref.full, first);
}

TEST(Kernels, PairCoverageMatchesReferenceAndJointStaySets) {
  const SyncToy toy;
  const auto g = discretize(toy.region);
  const auto a = enumerate_words(5, 2), b = enumerate_words(5, 2);
  const auto par = pair_coverage(toy.system, toy.region, g, a, b);
  EXPECT_EQ(par, reference::pair_coverage(toy.system, toy.region, g, a, b));
  for (std::size_t i = 0; i < a.size(); i += 7) {
    for (std::size_t j = 0; j < b.size(); j += 5) {
      const std::vector<ControlWord> parts{a.control_word(i), b.control_word(j)};
      const auto joint = toy.system.joint_word(parts);
      EXPECT_EQ(par[i * b.size() + j], stay_set(toy.system, toy.region, g, joint.entries));
    }
  }
}

TEST(Subsystem, BackwardPassMatchesBruteForceOnTorus) { check_against_brute_force(SyncToy{}, 3); }

TEST(Subsystem, BackwardPassMatchesBruteForceOnDisc) { check_against_brute_force(DiscToy{}, 3); }

TEST(Subsystem, ParallelCoverageMatchesReference) {
  const DiscToy toy;
  const auto g = discretize(toy.region);
  SubsystemModel model(toy.system, toy.region, g, 0);
  const auto pool = enumerate_words(5, 3);
  EXPECT_EQ(subsystem_coverage(model, pool).coverage,
            reference::subsystem_coverage(model, pool).coverage);
}

TEST(Subsystem, ProductRegionDecouples) {
  // Q2 is controlled invariant, so feasibility only depends on component 0.
  const auto c1 = SystemDef::linear(scalar(2), scalar(1), ControlAlphabet::uniform(-1, 1, 9));
  const auto c2 = SystemDef::linear(scalar(0.5), scalar(1), ControlAlphabet::uniform(-1, 1, 9));
  const auto sys = product({c1, c2});
  const auto q = GridRegion::box({-0.5, -0.5}, {0.5, 0.5}, 9);
  const auto q1 = GridRegion::box({-0.5}, {0.5}, 9);
  const auto g = discretize(q);
  const auto g1 = discretize(q1);
  SubsystemModel model(sys, q, g, 0);
  const auto words = enumerate_words(9, 2);
  for (std::size_t w = 0; w < words.size(); ++w) {
    const auto joint = model.feasible(words.word(w));
    const auto own = stay_set(c1, q1, g1, words.word(w));
    for (std::size_t e = 0; e < g.size(); ++e) EXPECT_EQ(joint.test(e), own.test(e / 9));
  }
}

TEST(Subsystem, SyncZeroWordIsFeasibleEverywhere) {
  const auto c = SystemDef::circle_multiplier(2, ControlAlphabet::uniform(-1, 1, 33));
  const auto sys = product({c, c});
  const auto q = GridRegion::circle_band(0.1, 256);
  const auto g = discretize(q);
  const auto zero = constant_word(c.alphabet().rest_index(), 6);
  for (std::size_t e = 0; e < g.size(); e += 97) {
    EXPECT_TRUE(feasible_subsystem(sys, q, 1, g.point(e), zero));
  }
}
