#include <gtest/gtest.h>

#include <bit>
#include <cmath>

#include "invarion/errors.hpp"
#include "invarion/kernels.hpp"
#include "invarion/span_solver.hpp"

using namespace invarion;

namespace {

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

SystemDef doubling(std::size_t levels = 33) {
  return SystemDef::linear(scalar(2), scalar(1), ControlAlphabet::uniform(-1, 1, levels));
}

// Minimal cover size over all subsets of the 33 one-step words, with
// coverage from the direct inequality -1/2 + ε < 2x + u < 1/2 − ε.
std::size_t brute_force_one_step(const GridRegion& q) {
  const auto g = discretize(q);
  const double eps = q.margin();
  std::vector<std::vector<bool>> cov(33, std::vector<bool>(g.size()));
  for (std::size_t u = 0; u < 33; ++u) {
    const double v = -1.0 + u / 16.0;
    for (std::size_t e = 0; e < g.size(); ++e) {
      const double y = 2 * g.point(e)[0] + v;
      cov[u][e] = -0.5 + eps < y && y < 0.5 - eps;
    }
  }
  for (std::size_t k = 1; k <= 33; ++k) {
    // Enumerate k-subsets in lexicographic order.
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      bool all = true;
      for (std::size_t e = 0; e < g.size() && all; ++e) {
        bool hit = false;
        for (auto u : idx) hit = hit || cov[u][e];
        all = hit;
      }
      if (all) return k;
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == 33 - k + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return 0;
}

}  // namespace

TEST(RInv, ZeroMapNeedsOneWord) {
  const auto s = SystemDef::linear(scalar(0), scalar(0), ControlAlphabet::uniform(-1, 1, 3));
  const auto q = GridRegion::box({-1}, {1}, 11);
  for (std::size_t tau = 1; tau <= 4; ++tau) EXPECT_EQ(r_inv(s, q, tau).cardinality, 1u);
}

TEST(RInv, OneStepEqualsBruteForceCover) {
  for (std::size_t res : {21u, 101u, 201u}) {
    const auto q = GridRegion::box({-0.5}, {0.5}, res);
    EXPECT_EQ(r_inv(doubling(), q, 1).cardinality, brute_force_one_step(q)) << res;
  }
}

TEST(RInv, SolutionCoversEveryGridPoint) {
  const auto q = GridRegion::box({-0.5}, {0.5}, 101);
  const auto r = r_inv(doubling(), q, 3);
  EXPECT_TRUE(verify_spanning(doubling(), q, r.solution.words));
  const auto g = discretize(q);
  ASSERT_EQ(r.solution.selector.size(), g.size());
  for (std::size_t e = 0; e < g.size(); ++e) {
    const auto& w = r.solution.words[r.solution.selector[e]];
    const auto traj = trajectory(doubling(), g.point(e), w);
    for (std::size_t k = 1; k < traj.size(); ++k) EXPECT_TRUE(q.in_interior(traj[k]));
  }
}

TEST(RInv, RatesDecreaseTowardOneBit) {
  // Grid-scale rates approach log2|λ| = 1 from above as τ grows.
  const auto q = GridRegion::box({-0.5}, {0.5}, 201);
  double prev = 1e9;
  for (std::size_t tau = 1; tau <= 3; ++tau) {
    const auto r = r_inv(doubling(), q, tau).cardinality;
    const double rate = std::log2(double(r)) / double(tau);
    EXPECT_GE(rate, 0.9);
    EXPECT_LE(rate, prev);
    prev = rate;
  }
  EXPECT_LE(prev, 1.4);
}

TEST(RInv, InfeasibleGridIsReported) {
  const auto s = SystemDef::linear(scalar(3), scalar(1), ControlAlphabet::uniform(-0.1, 0.1, 3));
  const auto q = GridRegion::box({-1}, {1}, 11);
  try {
    r_inv(s, q, 1);
    FAIL();
  } catch (const InfeasibleError& e) {
    EXPECT_NE(std::string(e.what()).find("not controlled invariant"), std::string::npos);
  }
}

TEST(RInvSubsystem, ProductRegionEqualsComponentEntropy) {
  const auto c1 = doubling(9);
  const auto c2 = SystemDef::linear(scalar(1.5), scalar(1), ControlAlphabet::uniform(-1, 1, 9));
  const auto sys = product({c1, c2});
  const auto q = GridRegion::box({-0.5, -0.5}, {0.5, 0.5}, 9);
  for (std::size_t tau = 1; tau <= 3; ++tau) {
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_EQ(r_inv_subsystem(sys, q, tau, i).cardinality,
                r_inv(sys.component(i), project(q, i, 1), tau).cardinality)
          << "tau " << tau << " component " << i;
    }
  }
}

TEST(RInvSubsystem, SynchronizationNeedsOneWord) {
  const auto c = SystemDef::circle_multiplier(2, ControlAlphabet::uniform(-1, 1, 33));
  const auto sys = product({c, c});
  const auto q = GridRegion::circle_band(0.1, 256);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto r = r_inv_subsystem(sys, q, 4, i);
    EXPECT_EQ(r.cardinality, 1u);
    EXPECT_TRUE(verify_subsystem_spanning(sys, q, i, r.solution.words));
  }
}

TEST(RInvSubsystem, SandwichOnBoxRegion) {
  const auto c = doubling(9);
  const auto sys = product({c, c});
  const auto q = GridRegion::box({-0.5, -0.5}, {0.5, 0.5}, 5);
  for (std::size_t tau = 1; tau <= 2; ++tau) {
    const auto full = r_inv(sys, q, tau).cardinality;
    for (std::size_t i = 0; i < 2; ++i) {
      const auto sub = r_inv_subsystem(sys, q, tau, i).cardinality;
      EXPECT_LE(r_inv(c, project(q, i, 1), tau).cardinality, sub);
      EXPECT_LE(sub, full);
    }
  }
}

TEST(EntropyEstimate, Arithmetic) {
  const auto a = entropy_estimate({{1, 2}});
  EXPECT_EQ(a.best, 1.0);
  const auto b = entropy_estimate({{1, 4}, {2, 8}});
  EXPECT_EQ(b.per_tau, (std::vector<double>{2.0, 1.5}));
  EXPECT_EQ(b.best, 1.5);
}

TEST(Concatenate, AllPairsFirstMajor) {
  const auto c = concatenate_all({ControlWord({0}), ControlWord({1})},
                                 {ControlWord({2}), ControlWord({3})});
  EXPECT_EQ(c, (std::vector<ControlWord>{ControlWord({0, 2}), ControlWord({0, 3}),
                                         ControlWord({1, 2}), ControlWord({1, 3})}));
}

TEST(Subadditivity, ConcatenatedWitnessSpans) {
  const auto q = GridRegion::box({-0.5}, {0.5}, 101);
  const auto a = r_inv(doubling(), q, 2), b = r_inv(doubling(), q, 1);
  const auto cat = concatenate_all(a.solution.words, b.solution.words);
  EXPECT_TRUE(verify_spanning(doubling(), q, cat));
  EXPECT_LE(r_inv(doubling(), q, 3).cardinality, a.cardinality * b.cardinality);
}

TEST(SampledPool, SeedIsHonouredAndResultReproducible) {
  const auto q = GridRegion::box({-0.5}, {0.5}, 101);
  SolveOptions o;
  o.mode = SolveMode::kGreedy;
  o.pool.cap = 4000;
  o.pool.seed = 42;
  const auto a = r_inv(doubling(), q, 4, o), b = r_inv(doubling(), q, 4, o);
  EXPECT_FALSE(a.pool_exhaustive);
  EXPECT_EQ(a.solution.words, b.solution.words);
  EXPECT_EQ(a.solution.selector, b.solution.selector);
}
