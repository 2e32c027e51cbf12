#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "invarion/frontier.hpp"
#include "invarion/span_solver.hpp"

using namespace invarion;

namespace {

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

struct SyncToy {
  SystemDef system = product({SystemDef::circle_multiplier(2, ControlAlphabet::uniform(-0.25, 0.25, 5)),
                              SystemDef::circle_multiplier(2, ControlAlphabet::uniform(-0.25, 0.25, 5))});
  GridRegion region = GridRegion::circle_band(0.2, 8, 0.05);
};

// Oracle: rate vectors of every product S1×S2 ⊆ pool1×pool2 that keeps each
// grid point inside, Pareto-filtered.
std::set<std::vector<double>> brute_force_frontier(const SystemDef& sys, const GridRegion& q,
                                                   const WordPool& p1, const WordPool& p2) {
  const auto g = discretize(q);
  const std::size_t tau = p1.horizon();
  std::vector<std::vector<double>> all;
  for (std::uint64_t m1 = 1; m1 < (1ull << p1.size()); ++m1) {
    for (std::uint64_t m2 = 1; m2 < (1ull << p2.size()); ++m2) {
      bool spans = true;
      for (std::size_t e = 0; e < g.size() && spans; ++e) {
        bool kept = false;
        for (std::size_t a = 0; a < p1.size() && !kept; ++a) {
          if (!(m1 >> a & 1)) continue;
          for (std::size_t b = 0; b < p2.size() && !kept; ++b) {
            if (!(m2 >> b & 1)) continue;
            const std::vector<ControlWord> parts{p1.control_word(a), p2.control_word(b)};
            const auto traj = trajectory(sys, g.point(e), sys.joint_word(parts));
            bool in = true;
            for (std::size_t k = 1; k <= tau && in; ++k) in = q.in_interior(traj[k]);
            kept = in;
          }
        }
        spans = kept;
      }
      if (spans) {
        all.push_back({std::log2(double(std::popcount(m1))) / double(tau),
                       std::log2(double(std::popcount(m2))) / double(tau)});
      }
    }
  }
  std::set<std::vector<double>> out;
  for (const auto& p : all) {
    bool dominated = false;
    for (const auto& o : all) {
      dominated = dominated || (o[0] <= p[0] && o[1] <= p[1] && o != p);
    }
    if (!dominated) out.insert(p);
  }
  return out;
}

std::set<std::vector<double>> rates_of(const EntropyFrontier& f) {
  std::set<std::vector<double>> out;
  for (const auto& p : f.points) out.insert(p.rates);
  return out;
}

}  // namespace

TEST(Frontier, ExactMatchesBruteForceOnTinyInstance) {
  const SyncToy toy;
  for (std::size_t tau = 1; tau <= 2; ++tau) {
    const auto p = tau == 1 ? enumerate_words(5, 1) : enumerate_words(5, 2).prefix(10);
    FrontierOptions o;
    o.exact = true;
    const auto f = frontier(toy.system, toy.region, tau, {p, p}, o);
    EXPECT_TRUE(f.exact);
    EXPECT_EQ(rates_of(f), brute_force_frontier(toy.system, toy.region, p, p)) << "tau " << tau;
  }
}

TEST(Frontier, GreedyPointsAreDominatedByExactFrontier) {
  const SyncToy toy;
  const auto p = enumerate_words(5, 1);
  FrontierOptions exact;
  exact.exact = true;
  const auto fe = frontier(toy.system, toy.region, 1, {p, p}, exact);
  const auto fg = frontier(toy.system, toy.region, 1, {p, p});
  ASSERT_FALSE(fg.points.empty());
  for (const auto& g : fg.points) {
    bool covered = false;
    for (const auto& e : fe.points) {
      covered = covered || (e.rates[0] <= g.rates[0] + 1e-12 && e.rates[1] <= g.rates[1] + 1e-12);
    }
    EXPECT_TRUE(covered);
    EXPECT_TRUE(product_covers(toy.system, toy.region, g.witness));
  }
}

TEST(Frontier, ProductRegionGivesSingleComponentwiseMinimum) {
  const auto c1 = SystemDef::linear(scalar(2), scalar(1), ControlAlphabet::uniform(-1, 1, 9));
  const auto c2 = SystemDef::linear(scalar(1.5), scalar(1), ControlAlphabet::uniform(-1, 1, 9));
  const auto sys = product({c1, c2});
  const auto q = GridRegion::box({-0.5, -0.5}, {0.5, 0.5}, 5);
  for (std::size_t tau = 1; tau <= 2; ++tau) {
    const auto f = frontier(sys, q, tau, pivot_pools(sys, q, tau));
    ASSERT_EQ(f.points.size(), 1u) << "tau " << tau;
    const double r1 = double(r_inv(c1, project(q, 0, 1), tau).cardinality);
    const double r2 = double(r_inv(c2, project(q, 1, 1), tau).cardinality);
    EXPECT_DOUBLE_EQ(f.points[0].rates[0], std::log2(r1) / double(tau));
    EXPECT_DOUBLE_EQ(f.points[0].rates[1], std::log2(r2) / double(tau));
  }
}

TEST(Frontier, PointsArePareto) {
  const SyncToy toy;
  const auto f = frontier(toy.system, toy.region, 2, pivot_pools(toy.system, toy.region, 2));
  for (const auto& a : f.points) {
    for (const auto& b : f.points) {
      if (&a == &b) continue;
      EXPECT_FALSE(a.rates[0] <= b.rates[0] && a.rates[1] <= b.rates[1]);
    }
  }
}

TEST(Frontier, MoreThanTwoComponentsIsUpperBoundOnly) {
  const auto c = SystemDef::linear(scalar(2), scalar(1), ControlAlphabet::uniform(-1, 1, 9));
  const auto sys = product({c, c, c});
  const auto q = GridRegion::box({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}, 5);
  const auto f = frontier(sys, q, 1, pivot_pools(sys, q, 1));
  EXPECT_TRUE(f.upper_bound_only);
  for (const auto& p : f.points) EXPECT_TRUE(product_covers(sys, q, p.witness));
}

TEST(ParetoFilter, DropsDominatedAndDuplicatePoints) {
  std::vector<FrontierPoint> pts{{{1, 1}, {}}, {{0, 2}, {}}, {{1, 2}, {}}, {{0, 2}, {}}, {{2, 0}, {}}};
  const auto f = pareto_filter(pts);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0].rates, (std::vector<double>{0, 2}));
  EXPECT_EQ(f[1].rates, (std::vector<double>{1, 1}));
  EXPECT_EQ(f[2].rates, (std::vector<double>{2, 0}));
}

TEST(Midpoint, SelfConcatenationSquaresSizes) {
  const SyncToy toy;
  const auto f = frontier(toy.system, toy.region, 1, pivot_pools(toy.system, toy.region, 1));
  ASSERT_FALSE(f.points.empty());
  const auto& a = f.points.front();
  const auto m = concat_midpoint(toy.system, toy.region, a, a, 1);
  EXPECT_TRUE(m.verified);
  for (std::size_t c = 0; c < 2; ++c) {
    EXPECT_DOUBLE_EQ(m.point.rates[c], a.rates[c]);
    EXPECT_EQ(m.point.witness[c].size(), a.witness[c].size() * a.witness[c].size());
  }
}

TEST(Midpoint, RatesAreArithmeticMean) {
  const SyncToy toy;
  const auto f = frontier(toy.system, toy.region, 2, pivot_pools(toy.system, toy.region, 2));
  ASSERT_GE(f.points.size(), 2u);
  const auto& a = f.points.front();
  const auto& b = f.points.back();
  const auto m = concat_midpoint(toy.system, toy.region, a, b, 2);
  for (std::size_t c = 0; c < 2; ++c) {
    EXPECT_NEAR(m.point.rates[c], 0.5 * (a.rates[c] + b.rates[c]), 1e-12);
  }
  EXPECT_EQ(m.verified, product_covers(toy.system, toy.region, m.point.witness));
}
