#include <gtest/gtest.h>

#include <cmath>

#include "invarion/errors.hpp"
#include "invarion/region.hpp"

using namespace invarion;

namespace {

std::vector<State> points(const Grid& g) {
  std::vector<State> out;
  for (std::size_t e = 0; e < g.size(); ++e) out.emplace_back(g.point(e).begin(), g.point(e).end());
  return out;
}

// min_j |a − b + j|
double torus(double a, double b) {
  double best = 1e9;
  for (int j = -2; j <= 2; ++j) best = std::min(best, std::abs(a - b + j));
  return best;
}

}  // namespace

TEST(Discretize, IntervalWithThreePoints) {
  EXPECT_EQ(points(discretize(GridRegion::box({-1}, {1}, 3))), (std::vector<State>{{-1}, {0}, {1}}));
}

TEST(Discretize, SquareCornersInLexicographicOrder) {
  EXPECT_EQ(points(discretize(GridRegion::box({0, 0}, {1, 1}, 2))),
            (std::vector<State>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
}

TEST(Discretize, CircleBandMatchesBruteForceScan) {
  for (std::size_t r : {16u, 64u, 256u}) {
    std::size_t expected = 0;
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < r; ++j) {
        if (torus(double(i) / r, double(j) / r) <= 0.1) ++expected;
      }
    }
    EXPECT_EQ(discretize(GridRegion::circle_band(0.1, r)).size(), expected) << "r = " << r;
  }
}

TEST(Discretize, EmptyGridIsConfigError) {
  // A 2-point lattice on the bounding square of a disc holds only its corners.
  EXPECT_THROW(discretize(GridRegion::ball({0, 0}, 1.0, 2)), ConfigError);
}

TEST(Discretize, RejectsResolutionBelowTwo) {
  EXPECT_ANY_THROW(GridRegion::box({0}, {1}, 1));
}

TEST(Interior, BoxWithMargin) {
  const auto q = GridRegion::box({-1}, {1}, 21, 0.1);
  EXPECT_TRUE(q.in_interior(State{0.0}));
  EXPECT_FALSE(q.in_interior(State{0.95}));
  EXPECT_TRUE(q.in_interior(State{0.95}, 0.0));
  EXPECT_FALSE(q.in_interior(State{1.0}, 0.0));
}

TEST(Interior, CircleBandUsesTorusDistance) {
  const auto q = GridRegion::circle_band(0.1, 64, 0.0);
  EXPECT_TRUE(q.in_interior(State{0.05, 0.98}));  // d = 0.07
  EXPECT_FALSE(q.in_interior(State{0.05, 0.90}));
  EXPECT_NEAR(circle_distance(0.05, 0.98), 0.07, 1e-15);
}

TEST(Interior, GridPointsAreClosedMembers) {
  for (const auto& q : {GridRegion::box({-1, 0}, {1, 2}, 5), GridRegion::circle_band(0.1, 32),
                        GridRegion::ball({0, 0}, 1, 9)}) {
    const auto g = discretize(q);
    for (std::size_t e = 0; e < g.size(); ++e) EXPECT_TRUE(q.contains(g.point(e)));
  }
}

TEST(Interior, DefaultMarginIsOneCell) {
  EXPECT_DOUBLE_EQ(GridRegion::box({-0.5}, {0.5}, 201).margin(), 0.005);
  EXPECT_DOUBLE_EQ(GridRegion::circle_band(0.1, 256).margin(), 1.0 / 256);
}

TEST(Project, BoxProjectsToSubBox) {
  const auto p = project(GridRegion::box({-1, 0}, {1, 2}, 5), 0, 1);
  const auto* box = std::get_if<GridRegion::Box>(&p.shape());
  ASSERT_NE(box, nullptr);
  EXPECT_EQ(box->lower, std::vector<double>{-1});
  EXPECT_EQ(box->upper, std::vector<double>{1});
}

TEST(Project, BandProjectsToWholeCircle) {
  const auto p = project(GridRegion::circle_band(0.1, 64), 0, 1);
  EXPECT_TRUE(std::holds_alternative<GridRegion::Circle>(p.shape()));
  EXPECT_EQ(discretize(p).size(), 64u);
}

TEST(Project, PredicateProjectionContainsProjectedGridPoints) {
  const auto q = GridRegion::ball({0.3, -0.2}, 0.8, 13);
  const auto g = discretize(q);
  for (std::size_t axis = 0; axis < 2; ++axis) {
    const auto p = project(q, axis, 1);
    for (std::size_t e = 0; e < g.size(); ++e) EXPECT_TRUE(p.contains(State{g.point(e)[axis]}));
  }
}

TEST(Lookup, SnapsToNearestGridPoint) {
  const auto q = GridRegion::box({0}, {1}, 11);
  const auto g = discretize(q);
  GridLookup lookup(q, g);
  EXPECT_EQ(lookup.nearest(State{0.31}), std::optional<std::size_t>(3));
  EXPECT_EQ(lookup.nearest(State{2.0}), std::nullopt);
}

TEST(LinearImage, MembershipInPreimageCoordinates) {
  Eigen::MatrixXd M(2, 2);
  M << 2, 1, 0, 1;
  const auto q = GridRegion::linear_image(M, {0, 0}, {1, 1}, 3, 0.0);
  EXPECT_TRUE(q.contains(State{3, 1}));   // M(1,1)
  EXPECT_FALSE(q.contains(State{0, 1}));  // preimage (-0.5, 1)
  EXPECT_EQ(discretize(q).size(), 9u);
}
