// Copyright 2026 The declab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "declab/errors.hpp"
#include "declab/lattice_sets.hpp"

namespace {

using declab::FreqPoint;
using declab::PointSet;
using declab::Rational;
using namespace declab::lattice;

PointSet brute_sphere(int n, std::int64_t lambda) {
  const auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(lambda))) + 1;
  PointSet out;
  std::vector<std::int64_t> v(n, -r);
  while (true) {
    std::int64_t s = 0;
    for (auto c : v)
      s += c * c;
    if (s == lambda)
      out.push_back(FreqPoint::from_ints(v));
    int i = n - 1;
    while (i >= 0 && v[i] == r)
      v[i--] = -r;
    if (i < 0)
      break;
    ++v[i];
  }
  std::sort(out.begin(), out.end());
  return out;
}

TEST(ParaboloidLattice, SmallCases) {
  const PointSet p = paraboloid_lattice(2, 1);
  ASSERT_EQ(p.size(), 3u);
  std::set<FreqPoint> s(p.begin(), p.end());
  EXPECT_TRUE(s.count(FreqPoint::from_ints({-1, 1})));
  EXPECT_TRUE(s.count(FreqPoint::from_ints({0, 0})));
  EXPECT_TRUE(s.count(FreqPoint::from_ints({1, 1})));
  EXPECT_EQ(paraboloid_lattice(3, 1).size(), 9u);
  const PointSet q = paraboloid_lattice(3, 10);
  EXPECT_EQ(q.size(), 441u);
  for (const auto &x : q)
    EXPECT_EQ(x[2], x[0] * x[0] + x[1] * x[1]);
  EXPECT_THROW(paraboloid_lattice(1, 3), declab::PreconditionError);
}

TEST(ParaboloidLattice, CardinalityFormula) {
  for (int n = 2; n <= 4; ++n)
    for (std::int64_t N = 1; N <= 6; ++N)
      EXPECT_EQ(paraboloid_lattice(n, N).size(),
                static_cast<std::size_t>(std::pow(2 * N + 1, n - 1)));
}

TEST(SphereLattice, KnownCounts) {
  EXPECT_EQ(sphere_lattice(3, 1).size(), 6u);
  EXPECT_EQ(sphere_lattice(3, 2).size(), 12u);
  EXPECT_EQ(sphere_lattice(4, 4).size(), 24u);
  EXPECT_TRUE(sphere_lattice(3, 7).empty());
  EXPECT_TRUE(sphere_lattice(3, 15).empty());
}

TEST(SphereLattice, MatchesBruteForce) {
  for (int n = 3; n <= 4; ++n)
    for (std::int64_t l = 1; l <= 30; ++l)
      EXPECT_EQ(sphere_lattice(n, l), brute_sphere(n, l)) << n << " " << l;
}

TEST(SphereLattice, SignAndPermutationClosed) {
  const PointSet p = sphere_lattice(3, 50);
  std::set<FreqPoint> s(p.begin(), p.end());
  for (const auto &x : p) {
    FreqPoint y = x;
    y[0] = -y[0];
    EXPECT_TRUE(s.count(y));
    std::swap(y[1], y[2]);
    EXPECT_TRUE(s.count(y));
  }
}

TEST(AnnulusLattice, RadiusTwo) {
  const PointSet p = annulus_lattice(2.0);
  // (2 + 2^{-1/3})^2 = 7.80..., so the norms 4 and 5 qualify.
  std::set<FreqPoint> expect;
  for (std::int64_t x = -3; x <= 3; ++x)
    for (std::int64_t y = -3; y <= 3; ++y) {
      const auto q = x * x + y * y;
      if (q >= 4 && q <= 7)
        expect.insert(FreqPoint::from_ints({x, y}));
    }
  EXPECT_EQ(expect.size(), 12u);
  EXPECT_EQ(std::set<FreqPoint>(p.begin(), p.end()), expect);
}

TEST(AnnulusLattice, Membership) {
  for (double R : {2.0, 3.7, 10.0, 64.0, 100.0, 1000.0}) {
    const PointSet p = annulus_lattice(R);
    const long double hi = R + std::pow(static_cast<long double>(R), -1.0L / 3);
    for (const auto &x : p) {
      const long double q = x[0].to_long_double() * x[0].to_long_double() +
                            x[1].to_long_double() * x[1].to_long_double();
      EXPECT_GE(q, static_cast<long double>(R) * R);
      EXPECT_LE(std::sqrt(q), hi * (1 + 1e-15L));
    }
    // Nothing is missed: brute force in long double, away from the boundary.
    const auto r = static_cast<std::int64_t>(hi) + 1;
    std::size_t inner = 0;
    for (std::int64_t a = -r; a <= r; ++a)
      for (std::int64_t b = -r; b <= r; ++b) {
        const long double q = static_cast<long double>(a * a + b * b);
        if (q >= static_cast<long double>(R) * R && std::sqrt(q) <= hi * (1 - 1e-12L))
          ++inner;
      }
    EXPECT_GE(p.size(), inner);
    EXPECT_LE(p.size(), inner + 8);
  }
}

TEST(AnnulusLattice, CountOrderOfMagnitude) {
  const double expect = 2 * M_PI * std::pow(100.0, 2.0 / 3.0);
  const double got = static_cast<double>(annulus_lattice(100.0).size());
  EXPECT_GT(got, expect / 3);
  EXPECT_LT(got, expect * 3);
}

TEST(CapPartition, Counts) {
  const auto caps = cap_partition(2, Rational(1, 4));
  ASSERT_EQ(caps.size(), 5u);
  std::vector<Rational> centers;
  for (const auto &c : caps)
    centers.push_back(c.center[0]);
  EXPECT_EQ(centers, (std::vector<Rational>{Rational(-1, 2), Rational(-1, 4), 0, Rational(1, 4), Rational(1, 2)}));
  // n = 3, delta = 1/16: centers on (1/8) Z^2 in [-1/2,1/2]^2.
  EXPECT_EQ(cap_partition(3, Rational(1, 16)).size(), 81u);
  EXPECT_THROW(cap_partition(2, Rational(1, 8)), declab::PreconditionError);
  EXPECT_THROW(cap_partition(2, Rational(1, 3)), declab::PreconditionError);
}

TEST(CapPartition, RescaledLatticeCovered) {
  for (int n : {2, 3})
    for (std::int64_t N : {2, 4, 8}) {
      const PointSet pts = rescale_paraboloid_lattice(paraboloid_lattice(n, N), N);
      const auto caps = cap_partition(n, Rational(1, N * N));
      for (const auto &x : pts) {
        int hits = 0;
        for (const auto &c : caps)
          hits += c.contains(x);
        EXPECT_GE(hits, 1);
        EXPECT_LE(hits, 1 << (n - 1) * 2);
      }
    }
}

TEST(AssignToCaps, CoarseCapHoldsEverything) {
  const PointSet pts = rescale_paraboloid_lattice(paraboloid_lattice(2, 1), 1);
  Cap coarse;
  coarse.surface = Surface::paraboloid;
  coarse.n = 2;
  coarse.delta = Rational(1);
  coarse.center = FreqPoint({Rational(0), Rational(0)});
  const auto a = assign_to_caps(pts, {coarse});
  ASSERT_EQ(a.fibers.size(), 1u);
  EXPECT_EQ(a.fibers[0].size(), 3u);
  EXPECT_TRUE(a.uncovered.empty());
}

TEST(AssignToCaps, PartitionAndOrderIndependence) {
  const std::int64_t N = 8;
  PointSet pts = rescale_paraboloid_lattice(paraboloid_lattice(3, N), N);
  const auto caps = cap_partition(3, Rational(1, N * N));
  const auto a = assign_to_caps(pts, caps);
  std::size_t total = 0;
  std::vector<std::set<FreqPoint>> fib;
  for (const auto &f : a.fibers) {
    total += f.size();
    std::set<FreqPoint> s;
    for (auto i : f)
      s.insert(pts[i]);
    fib.push_back(s);
  }
  EXPECT_EQ(total, pts.size());
  EXPECT_TRUE(a.uncovered.empty());
  std::mt19937_64 rng(7);
  std::shuffle(pts.begin(), pts.end(), rng);
  const auto b = assign_to_caps(pts, caps);
  for (std::size_t c = 0; c < caps.size(); ++c) {
    std::set<FreqPoint> s;
    for (auto i : b.fibers[c])
      s.insert(pts[i]);
    EXPECT_EQ(s, fib[c]);
  }
}

TEST(AssignToCaps, TieGoesToSmallestCenter) {
  const auto caps = cap_partition(2, Rational(1, 4));
  // x = 1/8 lies on the boundary of the caps at 0 and 1/4.
  PointSet pts{FreqPoint({Rational(1, 8), Rational(1, 64)})};
  const auto a = assign_to_caps(pts, caps);
  EXPECT_EQ(a.fibers[2].size(), 1u);
  EXPECT_TRUE(a.fibers[3].empty());
  PointSet far{FreqPoint({Rational(0), Rational(5)})};
  EXPECT_EQ(assign_to_caps(far, caps).uncovered.size(), 1u);
}

TEST(AnnulusSectors, CountAndPartition) {
  EXPECT_NEAR(static_cast<double>(annulus_sector_count(64.0)), std::ceil(2 * M_PI * 16.0), 1.0);
  for (double R : {64.0, 100.0, 200.0}) {
    const auto fibers = annulus_sectors(R);
    const PointSet all = annulus_lattice(R);
    std::multiset<FreqPoint> seen;
    for (const auto &f : fibers)
      seen.insert(f.points.begin(), f.points.end());
    EXPECT_EQ(seen, std::multiset<FreqPoint>(all.begin(), all.end()));
    for (const auto &f : fibers) {
      if (f.points.empty())
        continue;
      const auto c = collinearity_check(f.points);
      EXPECT_TRUE(c.collinear) << R << " sector " << f.sector.index;
      EXPECT_TRUE(c.equidistant) << R << " sector " << f.sector.index;
    }
  }
}

TEST(Collinearity, Examples) {
  const auto a = collinearity_check({FreqPoint::from_ints({0, 0}), FreqPoint::from_ints({1, 2}),
                                     FreqPoint::from_ints({2, 4})});
  EXPECT_TRUE(a.collinear);
  EXPECT_TRUE(a.equidistant);
  ASSERT_TRUE(a.spacing.has_value());
  EXPECT_NEAR(*a.spacing, std::sqrt(5.0), 1e-15);
  EXPECT_EQ(*a.spacing_sq, Rational(5));
  const auto b = collinearity_check({FreqPoint::from_ints({0, 0}), FreqPoint::from_ints({1, 0}),
                                     FreqPoint::from_ints({0, 1})});
  EXPECT_FALSE(b.collinear);
  const auto c = collinearity_check({FreqPoint::from_ints({3, 3})});
  EXPECT_TRUE(c.collinear);
  EXPECT_FALSE(c.spacing.has_value());
  const auto d = collinearity_check({FreqPoint::from_ints({0, 0}), FreqPoint::from_ints({3, 0}),
                                     FreqPoint::from_ints({1, 0})});
  EXPECT_TRUE(d.collinear);
  EXPECT_FALSE(d.equidistant);
}

TEST(SeparatedNet, ParabolaRegression) {
  const double s = 1.0 / 32;
  const PointSet net = separated_net(Surface::paraboloid, 2, s, 1);
  EXPECT_GT(net.size(), 32u / 4);
  EXPECT_LT(net.size(), 32u * 4);
  EXPECT_EQ(net.size(), 33u);
  EXPECT_GE(min_pairwise_distance(net), s);
}

TEST(SeparatedNet, SeparationAndDeterminism) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const PointSet a = separated_net(Surface::paraboloid, 3, 0.125, seed);
    EXPECT_GE(min_pairwise_distance(a), 0.125);
    EXPECT_EQ(a, separated_net(Surface::paraboloid, 3, 0.125, seed));
    const PointSet b = separated_net(Surface::sphere, 3, 0.25, seed);
    EXPECT_GE(min_pairwise_distance(b), 0.25);
    for (const auto &x : b) {
      Rational r(0);
      for (const auto &c : x.coords)
        r += c * c;
      EXPECT_EQ(r, Rational(1));
    }
  }
  EXPECT_EQ(separated_net(Surface::paraboloid, 2, 0.99, 5).size(), 1u);
}

TEST(PointFile, RoundTrip) {
  PointSet pts = rescale_paraboloid_lattice(paraboloid_lattice(2, 3), 3);
  std::stringstream ss;
  write_points(ss, pts, Surface::paraboloid);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "n 2 surface paraboloid");
  const PointFile f = read_points(ss);
  EXPECT_EQ(f.n, 2);
  EXPECT_EQ(f.surface, Surface::paraboloid);
  EXPECT_EQ(f.points, pts);
}

} // namespace
