#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "spdelab/rng.hpp"

using namespace spdelab;

TEST(Philox, KnownAnswerVectors) {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  EXPECT_EQ(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RngStream, PureFunctionOfIdentity) {
  RngStream a{42, 3, 17}, b{42, 3, 17};
  EXPECT_EQ(a.normals(5), b.normals(5));
  EXPECT_NE(a.normals(5), (RngStream{42, 4, 17}.normals(5)));
  EXPECT_NE(a.normals(5), (RngStream{42, 3, 18}.normals(5)));
  EXPECT_NE(a.normals(5), (RngStream{43, 3, 17}.normals(5)));
  EXPECT_NE(a.normals(5), a.normals(6));
}

TEST(RngStream, CountersDistinctAcrossModesReplicasSteps) {
  std::set<Philox4x32::Counter> seen;
  for (std::uint64_t rep = 0; rep < 8; ++rep)
    for (std::uint64_t step = 0; step < 8; ++step)
      for (std::uint64_t mode = 0; mode < 64; ++mode) seen.insert(RngStream{1, rep, step}.counter(mode));
  EXPECT_EQ(seen.size(), 8u * 8u * 64u);
  // High mode bits are folded into the replica word without colliding with mode 0.
  EXPECT_NE((RngStream{1, 0, 0}.counter(1ull << 32)), (RngStream{1, 0, 0}.counter(0)));
}

TEST(RngStream, UniformsInOpenUnitInterval) {
  for (std::uint64_t m = 0; m < 10000; ++m) {
    auto [u, v] = RngStream{7, 0, 0}.uniforms(m);
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(RngStream, NormalMoments) {
  const int n = 200000;
  double s = 0, s2 = 0, s4 = 0, cross = 0;
  for (int m = 0; m < n; ++m) {
    auto [a, b] = RngStream{0xC0FFEE, 1, 2}.normals(static_cast<std::uint64_t>(m));
    s += a + b;
    s2 += a * a + b * b;
    s4 += a * a * a * a + b * b * b * b;
    cross += a * b;
  }
  const double N = 2.0 * n;
  EXPECT_NEAR(s / N, 0.0, 5.0 / std::sqrt(N));
  EXPECT_NEAR(s2 / N, 1.0, 5.0 * std::sqrt(2.0 / N));
  EXPECT_NEAR(s4 / N, 3.0, 5.0 * std::sqrt(96.0 / N));
  EXPECT_NEAR(cross / n, 0.0, 5.0 / std::sqrt(n));
}
