#include <gtest/gtest.h>

#include <random>
#include <set>

#include "invarion/bitset.hpp"

using invarion::Bitset;

TEST(Bitset, SetTestCountAcrossWordBoundaries) {
  Bitset b(130);
  EXPECT_TRUE(b.none());
  for (std::size_t i : {0u, 63u, 64u, 127u, 129u}) b.set(i);
  EXPECT_EQ(b.count(), 5u);
  EXPECT_TRUE(b.test(64));
  EXPECT_FALSE(b.test(65));
  b.reset(64);
  EXPECT_EQ(b.indices(), (std::vector<std::size_t>{0, 63, 127, 129}));
  EXPECT_EQ(b.find_next(64), 127u);
  EXPECT_EQ(b.find_next(130), 130u);
}

TEST(Bitset, SetAllRespectsSize) {
  Bitset b(70, true);
  EXPECT_EQ(b.count(), 70u);
  EXPECT_TRUE(b.all());
  b.clear();
  EXPECT_TRUE(b.none());
  b.set_all();
  EXPECT_TRUE(b.all());
}

TEST(Bitset, OperationsMatchStdSet) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 200;
    Bitset a(n), b(n);
    std::set<std::size_t> sa, sb;
    for (std::size_t i = 0; i < n; ++i) {
      if (rng() % 3 == 0) { a.set(i); sa.insert(i); }
      if (rng() % 3 == 0) { b.set(i); sb.insert(i); }
    }
    std::set<std::size_t> uni = sa, inter, diff;
    uni.insert(sb.begin(), sb.end());
    for (auto i : sa) (sb.count(i) ? inter : diff).insert(i);

    Bitset u = a; u |= b;
    Bitset x = a; x &= b;
    Bitset d = a; d.subtract(b);
    EXPECT_EQ(u.count(), uni.size());
    EXPECT_EQ(x.count(), inter.size());
    EXPECT_EQ(d.count(), diff.size());
    EXPECT_EQ(a.count_excluding(b), diff.size());
    EXPECT_EQ(a.intersects(b), !inter.empty());
    EXPECT_EQ(a.is_subset_of(b), diff.empty());
    const auto idx = d.indices();
    EXPECT_EQ(std::set<std::size_t>(idx.begin(), idx.end()), diff);
  }
}

TEST(Bitset, EqualityComparesContents) {
  Bitset a(10), b(10);
  a.set(3);
  EXPECT_NE(a, b);
  b.set(3);
  EXPECT_EQ(a, b);
}
