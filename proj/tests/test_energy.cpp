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

#include <cmath>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "declab/energy.hpp"
#include "declab/errors.hpp"
#include "declab/lattice_sets.hpp"

namespace {

using declab::BigInt;
using declab::FreqPoint;
using declab::PointSet;
using declab::Rational;
using namespace declab::energy;

// Enumerates all |L|^{2k} tuples.
std::int64_t brute_energy(const PointSet &pts, int k) {
  const std::size_t m = pts.size();
  std::vector<std::size_t> idx(2 * k, 0);
  std::int64_t count = 0;
  while (true) {
    FreqPoint a = pts[idx[0]], b = pts[idx[k]];
    for (int i = 1; i < k; ++i) {
      a = a + pts[idx[i]];
      b = b + pts[idx[k + i]];
    }
    count += (a == b);
    int i = 2 * k - 1;
    while (i >= 0 && idx[i] == m - 1)
      idx[i--] = 0;
    if (i < 0)
      break;
    ++idx[i];
  }
  return count;
}

std::int64_t brute_right_angles(const PointSet &p) {
  std::int64_t c = 0;
  for (std::size_t b = 0; b < p.size(); ++b)
    for (std::size_t a = 0; a < p.size(); ++a)
      for (std::size_t d = 0; d < p.size(); ++d) {
        if (a == b || d == b || a == d)
          continue;
        const Rational dot = (p[a][0] - p[b][0]) * (p[d][0] - p[b][0]) + (p[a][1] - p[b][1]) * (p[d][1] - p[b][1]);
        c += (dot == Rational(0));
      }
  return c;
}

PointSet random_set(std::size_t size, int hi, std::mt19937_64 &rng) {
  std::uniform_int_distribution<int> u(0, hi);
  std::set<FreqPoint> s;
  while (s.size() < size)
    s.insert(FreqPoint::from_ints({u(rng), u(rng)}));
  return {s.begin(), s.end()};
}

PointSet line(std::initializer_list<std::int64_t> v) {
  PointSet p;
  for (auto x : v)
    p.push_back(FreqPoint::from_ints({x}));
  return p;
}

TEST(AdditiveEnergy, SmallExamples) {
  EXPECT_EQ(additive_energy(line({5}), 2), 1);
  EXPECT_EQ(additive_energy(line({5}), 4), 1);
  EXPECT_EQ(additive_energy(line({0, 1}), 2), 6);
  EXPECT_EQ(additive_energy(line({0, 1, 2}), 2), 19);
  EXPECT_THROW(additive_energy(line({0, 1}), 1), declab::PreconditionError);
  EXPECT_THROW(additive_energy(line({0, 0}), 2), declab::PreconditionError);
}

TEST(AdditiveEnergy, MatchesBruteForce) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const PointSet p = random_set(7, 6, rng);
    EXPECT_EQ(additive_energy(p, 2), brute_energy(p, 2));
    EXPECT_EQ(additive_energy(p, 3), brute_energy(p, 3));
  }
  PointSet r{FreqPoint({Rational(1, 2), Rational(0)}), FreqPoint({Rational(1, 3), Rational(1)}),
             FreqPoint({Rational(0), Rational(5, 6)}), FreqPoint({Rational(5, 6), Rational(1, 6)})};
  EXPECT_EQ(additive_energy(r, 2), brute_energy(r, 2));
  EXPECT_EQ(additive_energy(r, 3), brute_energy(r, 3));
}

TEST(AdditiveEnergy, InvarianceAndTrivialBound) {
  std::mt19937_64 rng(3);
  const PointSet p = random_set(25, 12, rng);
  for (int k : {2, 3}) {
    const EnergyReport r = energy_report(p, k);
    EXPECT_GE(r.count, r.trivial_lower);
    PointSet moved, mapped;
    for (const auto &x : p) {
      moved.push_back(x + FreqPoint::from_ints({7, -3}));
      // Invertible linear map (x, y) -> (2x + y, x + y).
      mapped.push_back(FreqPoint({Rational(2) * x[0] + x[1], x[0] + x[1]}));
    }
    EXPECT_EQ(additive_energy(moved, k), r.count);
    EXPECT_EQ(additive_energy(mapped, k), r.count);
  }
}

TEST(AdditiveEnergy, BudgetGuard) {
  std::mt19937_64 rng(5);
  const PointSet p = random_set(100, 1000, rng);
  try {
    additive_energy(p, 4, 1e6);
    FAIL() << "expected BudgetExceeded";
  } catch (const declab::BudgetExceeded &e) {
    EXPECT_GT(e.estimated_bytes(), 1e6);
  }
}

TEST(Energy3, SweepPathAgrees) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 5; ++t) {
    const PointSet p = random_set(30, 15, rng);
    EXPECT_EQ(energy3(p), additive_energy(p, 3));
  }
}

TEST(TorusCrosscheck, Examples) {
  EXPECT_TRUE(energy_torus_crosscheck(line({5}), 2));
  EXPECT_TRUE(energy_torus_crosscheck(line({0, 1}), 2));
  EXPECT_TRUE(energy_torus_crosscheck(line({0, 1, 2}), 2));
  std::mt19937_64 rng(21);
  for (int t = 0; t < 5; ++t) {
    const PointSet p = random_set(15, 20, rng);
    EXPECT_TRUE(energy_torus_crosscheck(p, 2));
    EXPECT_TRUE(energy_torus_crosscheck(p, 3));
  }
  PointSet par;
  for (std::int64_t j = 0; j < 8; ++j)
    par.push_back(FreqPoint::from_ints({j, j * j}));
  EXPECT_TRUE(energy_torus_crosscheck(par, 3));
}

TEST(CircleStructure, HandExample) {
  auto lift = [](std::int64_t a, std::int64_t b) { return FreqPoint::from_ints({a, b, a * a + b * b}); };
  const CircleStructure s = quadruple_circle_structure({lift(0, 0), lift(2, 0), lift(1, 1), lift(1, -1)});
  EXPECT_EQ(s.center_x, Rational(1));
  EXPECT_EQ(s.center_y, Rational(0));
  EXPECT_EQ(s.radius_sq, Rational(1));
  EXPECT_TRUE(s.on_circle);
  EXPECT_TRUE(s.diametrically_opposite);
  const CircleStructure t = quadruple_circle_structure({lift(3, 4), lift(-1, 2), lift(3, 4), lift(-1, 2)});
  EXPECT_TRUE(t.on_circle);
  EXPECT_TRUE(t.diametrically_opposite);
  EXPECT_THROW(quadruple_circle_structure({lift(0, 0), lift(2, 0), lift(1, 1), lift(1, 0)}),
               declab::PreconditionError);
}

TEST(CircleStructure, HarvestedQuadruplesPass) {
  const PointSet p = random_paraboloid_sample(200, 20, 4);
  const auto quads = harvest_quadruples(p, 1u << 20);
  // Ordered nontrivial quadruples = E_2 - (2 m^2 - m).
  const BigInt m = p.size();
  EXPECT_EQ(BigInt(quads.size()), additive_energy(p, 2) - (2 * m * m - m));
  ASSERT_GT(quads.size(), 0u);
  for (const auto &q : quads) {
    const CircleStructure s = quadruple_circle_structure(q);
    ASSERT_TRUE(s.on_circle);
    ASSERT_TRUE(s.diametrically_opposite);
  }
}

TEST(RightAngles, Examples) {
  const PointSet tri{FreqPoint::from_ints({0, 0}), FreqPoint::from_ints({1, 0}), FreqPoint::from_ints({0, 1})};
  EXPECT_EQ(right_angle_count(tri).ordered, 2);
  EXPECT_EQ(right_angle_count(tri).unordered, 1);
  const PointSet sq{FreqPoint::from_ints({0, 0}), FreqPoint::from_ints({1, 0}), FreqPoint::from_ints({0, 1}),
                    FreqPoint::from_ints({1, 1})};
  EXPECT_EQ(right_angle_count(sq).ordered, 8);
  EXPECT_EQ(right_angle_count(sq).unordered, 4);
  PointSet col;
  for (int i = 0; i < 6; ++i)
    col.push_back(FreqPoint::from_ints({i, 2 * i}));
  EXPECT_EQ(right_angle_count(col).ordered, 0);
}

TEST(RightAngles, MatchesBruteForce) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 5; ++t) {
    const PointSet p = random_set(40, 8, rng);
    EXPECT_EQ(right_angle_count(p).ordered, brute_right_angles(p));
  }
  PointSet r{FreqPoint({Rational(1, 2), Rational(0)}), FreqPoint({Rational(0), Rational(1, 2)}),
             FreqPoint({Rational(0), Rational(0)}), FreqPoint({Rational(1, 3), Rational(1, 3)})};
  EXPECT_EQ(right_angle_count(r).ordered, brute_right_angles(r));
}

TEST(ExponentFit, Synthetic) {
  std::vector<std::pair<double, double>> sq, cube_log;
  for (int j = 4; j <= 11; ++j) {
    const double s = std::ldexp(1.0, j);
    sq.emplace_back(s, s * s);
    cube_log.emplace_back(s, s * s * s * std::log(s));
  }
  EXPECT_NEAR(exponent_fit(sq).slope, 2.0, 1e-9);
  const double sl = exponent_fit(cube_log).slope;
  EXPECT_GT(sl, 3.0);
  EXPECT_LT(sl, 3.35);
  auto out = sq;
  out[5].second *= 10;
  const FitResult f = exponent_fit(out);
  EXPECT_EQ(f.max_residual_index, 5u);
  EXPECT_GT(f.max_residual, 1.0);
  EXPECT_THROW(exponent_fit({{1, 1}, {2, 2}, {3, 3}}), declab::PreconditionError);
  EXPECT_THROW(exponent_fit({{1, 1}, {1, 2}, {1, 3}, {1, 4}}), declab::PreconditionError);
}

} // namespace
