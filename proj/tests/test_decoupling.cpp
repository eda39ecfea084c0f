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

#include <gtest/gtest.h>

#include "declab/decoupling.hpp"
#include "declab/errors.hpp"
#include "declab/lattice_sets.hpp"

namespace {

using declab::FreqPoint;
using declab::PointSet;
using declab::Rational;
using declab::expsum::Box;
using declab::expsum::cplx;
using declab::expsum::TrigPoly;
using namespace declab::decouple;
namespace lattice = declab::lattice;
using declab::lattice::Cap;

// int_T |sum_j w_j e(j x + j^2 y)|^6 by a map over all three-fold sums.
long double brute_sixth(std::int64_t L, std::int64_t H, const std::vector<int> &w) {
  std::map<std::pair<std::int64_t, std::int64_t>, long double> c3;
  for (std::int64_t a = L; a <= H; ++a)
    for (std::int64_t b = L; b <= H; ++b)
      for (std::int64_t c = L; c <= H; ++c)
        c3[{a + b + c, a * a + b * b + c * c}] += static_cast<long double>(w[a - L]) * w[b - L] * w[c - L];
  long double s = 0;
  for (const auto &kv : c3)
    s += kv.second * kv.second;
  return s;
}

std::vector<cplx> random_coeffs(std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> a(m);
  for (auto &z : a)
    z = cplx(g(rng), g(rng));
  return a;
}

TEST(Exponents, KnownValues) {
  EXPECT_DOUBLE_EQ(paraboloid_exponent(2, 6), 0.0);
  EXPECT_DOUBLE_EQ(paraboloid_exponent(2, 2), 0.0);
  EXPECT_NEAR(paraboloid_exponent(2, 10), 0.1, 1e-15);
  EXPECT_NEAR(paraboloid_exponent(3, 8), 0.25, 1e-15);
  EXPECT_DOUBLE_EQ(cone_exponent(3, 6), 0.0);
  EXPECT_THROW(paraboloid_exponent(1, 6), declab::PreconditionError);
}

TEST(Witness, UnitFamilyMatchesBruteSixthMoment) {
  for (std::int64_t N : {2, 4, 8}) {
    const auto w = lower_bound_witness(2, 6, Rational(1, N * N), 1, 0);
    const auto &a = w.families[0];
    ASSERT_EQ(a.family, "a");
    const long double e3 = brute_sixth(-N, N, std::vector<int>(2 * N + 1, 1));
    EXPECT_NEAR(a.lhs, std::pow(static_cast<double>(e3), 1.0 / 6), 1e-9 * a.lhs);
    // Rescaled points fall one per cap except the two at the left edge.
    const double rhs = std::sqrt(std::pow(20.0, 1.0 / 3) + 2.0 * N - 1);
    EXPECT_NEAR(a.rhs, rhs, 1e-9 * rhs) << N;
  }
}

TEST(Witness, SignFamilyMatchesBrute) {
  // Family (c) lhs is the sixth moment of some sign pattern; it can only
  // lie between the moment bounds attained by the brute oracle's extremes.
  const std::int64_t N = 4;
  const auto w = lower_bound_witness(2, 6, Rational(1, 16), 7, 4);
  ASSERT_EQ(w.families.size(), 3u);
  const double lhs = w.families[2].lhs;
  const double e3 = static_cast<double>(brute_sixth(-N, N, std::vector<int>(2 * N + 1, 1)));
  EXPECT_LE(lhs, std::pow(e3, 1.0 / 6) * (1 + 1e-12));
  EXPECT_GE(lhs, std::pow(static_cast<double>((2 * N + 1) * (2 * N + 1) * (2 * N + 1)), 1.0 / 6) * (1 - 1e-12));
  EXPECT_FALSE(w.c_skipped);
}

TEST(Witness, GenericPathAgreesWithKernelAtSmallN) {
  const std::int64_t N = 4;
  const PointSet pts = lattice::rescale_paraboloid_lattice(lattice::paraboloid_lattice(2, N), N);
  const TrigPoly f = TrigPoly::unit(pts);
  const auto caps = lattice::cap_partition(2, Rational(1, 16));
  const auto split = split_by_caps(f, caps);
  const auto r = ratio_for_pieces(f, split.pieces, 6, lattice_box(2, N), 1.0);
  const auto w = lower_bound_witness(2, 6, Rational(1, 16), 1, 0);
  EXPECT_EQ(r.route, Route::periodic);
  EXPECT_NEAR(r.ratio, w.families[0].ratio, 1e-9);
}

TEST(Witness, CentralCapIsOne) {
  for (std::int64_t N : {4, 16}) {
    const auto w = lower_bound_witness(2, 6, Rational(1, N * N), 3, 0);
    EXPECT_NEAR(w.families[1].ratio, 1.0, 1e-12);
  }
}

TEST(Witness, SignFamilyLimit) {
  EXPECT_EQ(sign_family_limit(2e9), 256);
  EXPECT_EQ(sign_family_limit(2e8), 64);
  const auto w = lower_bound_witness(2, 6, Rational(1, 1 << 18), 1, 1, 2e9); // N = 512
  EXPECT_TRUE(w.c_skipped);
  EXPECT_EQ(w.families.size(), 2u);
}

TEST(Decoupling, SingleCapQuadratureAtMostOne) {
  // Non-periodic box: lhs integrates over the box where the weight is 1.
  const auto caps = lattice::cap_partition(2, Rational(1, 16));
  const auto &cap = caps[4];
  PointSet pts;
  for (int j = -2; j <= 2; ++j) {
    const Rational x = cap.center[0] + Rational(j, 20);
    pts.push_back(FreqPoint({x, x * x}));
  }
  const TrigPoly f = TrigPoly::with_coefficients(pts, random_coeffs(pts.size(), 11));
  for (double p : {2.0, 4.0, 6.0}) {
    const auto r = ratio_for_pieces(f, {f}, p, Box::cube(2, 7.3, 0.4), 0.2);
    EXPECT_EQ(r.route, Route::quadrature);
    EXPECT_LE(r.ratio, 1.02) << p;
    EXPECT_GT(r.ratio, 0.05);
  }
}

TEST(Decoupling, PTwoRatiosBounded) {
  for (std::int64_t N : {4, 8, 16}) {
    const auto w = lower_bound_witness(2, 2, Rational(1, N * N), 5, 4);
    for (const auto &r : w.families)
      EXPECT_LE(r.ratio, 2.0) << N << ' ' << r.family;
  }
  // Random coefficients on a random subset, quadrature route.
  const PointSet pts = lattice::rescale_paraboloid_lattice(lattice::paraboloid_lattice(2, 8), 8);
  const TrigPoly f = TrigPoly::with_coefficients(pts, random_coeffs(pts.size(), 2));
  const auto r = decoupling_ratio(f, 2, Rational(1, 64), Box::cube(2, 30.5, 1.0), 0.5);
  EXPECT_EQ(r.route, Route::quadrature);
  EXPECT_LE(r.ratio, 2.0);
}

TEST(Decoupling, RejectsFrequencyOutsideCaps) {
  TrigPoly f(2);
  f.add(FreqPoint({Rational(0), Rational(1, 2)}), 1);
  EXPECT_THROW(decoupling_ratio(f, 6, Rational(1, 16), lattice_box(2, 4), 1.0), declab::PreconditionError);
}

TEST(Restriction, SinglePointIsOne) {
  const PointSet pts{FreqPoint({Rational(1, 4), Rational(1, 16)})};
  const auto r = discrete_restriction_ratio(pts, {cplx(0.3, -2)}, 8, 1.0 / 64, 64, 1.0);
  EXPECT_NEAR(r.ratio, 1.0, 1e-12);
  EXPECT_FALSE(r.subcritical);
}

TEST(Restriction, ParsevalAtPTwo) {
  const PointSet pts = lattice::separated_net(lattice::Surface::paraboloid, 2, 0.125, 4);
  const auto a = random_coeffs(pts.size(), 9);
  const auto r = discrete_restriction_ratio(pts, a, 2, 1.0 / 64, 640, 1.0);
  EXPECT_NEAR(r.ratio, 1.0, 0.1);
  EXPECT_TRUE(r.subcritical);
  EXPECT_DOUBLE_EQ(r.reference, 1.0);
}

TEST(Restriction, RejectsUnseparated) {
  const PointSet pts{FreqPoint({Rational(0), Rational(0)}), FreqPoint({Rational(1, 100), Rational(1, 10000)})};
  EXPECT_THROW(discrete_restriction_ratio(pts, {1, 1}, 6, 1.0 / 64, 64, 1.0), declab::PreconditionError);
}

Cap paraboloid_cap(Rational a, Rational b, Rational delta) {
  Cap c;
  c.n = 3;
  c.delta = delta;
  c.center = FreqPoint({a, b, a * a + b * b});
  return c;
}

TEST(Transversality, CentreNormalsOracle) {
  const Rational d(1, 1 << 20);
  const std::vector<Cap> caps{paraboloid_cap(0, 0, d), paraboloid_cap(Rational(1, 2), 0, d),
                              paraboloid_cap(0, Rational(1, 2), d)};
  // Normals (0,0,1), (-1,0,1)/sqrt2, (0,-1,1)/sqrt2: triple product 1/2.
  EXPECT_NEAR(transversality(caps, NormalSample::centers), 0.5, 1e-12);
  const double corners = transversality(caps);
  EXPECT_LE(corners, 0.5);
  EXPECT_GT(corners, 0.49);
  const std::vector<Cap> same{caps[0], caps[0], caps[1]};
  EXPECT_NEAR(transversality(same, NormalSample::centers), 0.0, 1e-15);
}

TEST(Rescale, MapsCapToParaboloid) {
  const auto caps = lattice::cap_partition(3, Rational(1, 16));
  const Cap &tau = caps[30];
  PointSet pts;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) {
      const Rational x = tau.center[0] + Rational(i, 20), y = tau.center[1] + Rational(j, 20);
      pts.push_back(FreqPoint({x, y, x * x + y * y}));
    }
  const TrigPoly f = TrigPoly::unit(pts);
  const TrigPoly g = parabolic_rescale(f, tau);
  ASSERT_EQ(g.size(), f.size());
  for (const auto &t : g.terms()) {
    EXPECT_EQ(t.xi[2], t.xi[0] * t.xi[0] + t.xi[1] * t.xi[1]);
    EXPECT_LE(std::fabs(t.xi[0].to_double()), 0.5 + 1e-15);
  }
  TrigPoly off(3);
  off.add(FreqPoint({Rational(1, 2), Rational(1, 2), Rational(1, 2)}), 1);
  EXPECT_THROW(parabolic_rescale(off, tau), declab::PreconditionError);
}

TEST(Multilinear, HolderBound) {
  const Rational d(1, 256);
  const std::vector<Cap> caps{paraboloid_cap(0, 0, d), paraboloid_cap(Rational(1, 2), 0, d),
                              paraboloid_cap(0, Rational(1, 2), d)};
  std::vector<TrigPoly> g;
  std::uint64_t seed = 1;
  for (const auto &c : caps) {
    PointSet pts;
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j) {
        const Rational x = c.center[0] + Rational(i, 40), y = c.center[1] + Rational(j, 40);
        if (c.contains(FreqPoint({x, y, x * x + y * y})))
          pts.push_back(FreqPoint({x, y, x * x + y * y}));
      }
    g.push_back(TrigPoly::with_coefficients(pts, random_coeffs(pts.size(), seed++)));
  }
  for (const Box &box : {Box::cube(3, 8, 0), Box::cube(3, 5.5, 0.3)}) {
    const auto r = multilinear_ratio(g, caps, 4, Rational(1, 64), box, 0.5, 0.1);
    EXPECT_GT(r.ratio, 0);
    EXPECT_LE(r.ratio, r.linear_geomean * (1 + 1e-9));
  }
  EXPECT_THROW(multilinear_ratio(g, caps, 4, Rational(1, 64), Box::cube(3, 8, 0), 0.5, 0.9),
               declab::PreconditionError);
}

TEST(Cone, SmallSlice) {
  const auto c = cone_unit_ratio(6, Rational(1, 64));
  EXPECT_EQ(c.sectors, 51u);
  EXPECT_EQ(c.points, lattice::cone_lattice(8).size());
  EXPECT_EQ(c.report.route, Route::periodic);
  EXPECT_GT(c.report.ratio, 0.5);
  EXPECT_LT(c.report.ratio, 2.0);
  PointSet bad{FreqPoint({Rational(3), Rational(4), Rational(6)})};
  EXPECT_THROW(cone_sector_ratio(bad, {1}, 6, Rational(1, 16)), declab::PreconditionError);
}

} // namespace
