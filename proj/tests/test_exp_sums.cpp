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
#include <complex>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "declab/errors.hpp"
#include "declab/exp_sums.hpp"
#include "declab/lattice_sets.hpp"

namespace {

using declab::BigInt;
using declab::FreqPoint;
using declab::IntPoints;
using declab::PointSet;
using declab::Rational;
using namespace declab::expsum;

// Direct sixth-moment oracle: count of x1+x2+x3 = y1+y2+y3 via a map of
// three-fold sums.
BigInt brute_e3(const PointSet &pts) {
  std::map<FreqPoint, std::int64_t> m;
  for (const auto &a : pts)
    for (const auto &b : pts)
      for (const auto &c : pts)
        ++m[a + b + c];
  BigInt s = 0;
  for (const auto &[k, v] : m)
    s += BigInt(v) * v;
  return s;
}

TrigPoly random_int_poly(int n, int terms, int range, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> c(-range, range);
  std::normal_distribution<double> g;
  TrigPoly f(n);
  std::set<FreqPoint> used;
  while (static_cast<int>(f.size()) < terms) {
    std::vector<std::int64_t> v(n);
    for (auto &x : v)
      x = c(rng);
    FreqPoint p = FreqPoint::from_ints(v);
    if (used.insert(p).second)
      f.add(p, {g(rng), g(rng)});
  }
  return f;
}

TEST(Evaluate, Basics) {
  TrigPoly one(2);
  one.add(FreqPoint::from_ints({0, 0}), 1.0);
  const std::vector<double> x{0.3, -1.7};
  EXPECT_NEAR(std::abs(evaluate(one, x) - cplx(1, 0)), 0, 1e-15);
  TrigPoly e(1);
  e.add(FreqPoint::from_ints({3}), 1.0);
  const std::vector<double> half{1.0 / 6.0};
  EXPECT_NEAR(std::abs(evaluate(e, half) - cplx(-1, 0)), 0, 1e-14);
  const TrigPoly f = random_int_poly(2, 30, 10, 3);
  for (int i = 0; i < 20; ++i) {
    const std::vector<double> y{0.1 * i, -0.37 * i};
    EXPECT_LE(std::abs(evaluate(f, y)), f.l1_norm() * (1 + 1e-12));
  }
}

TEST(TrigPoly, RejectsRepeatedFrequency) {
  TrigPoly f(2);
  f.add(FreqPoint::from_ints({1, 2}), 1.0);
  EXPECT_THROW(f.add(FreqPoint::from_ints({1, 2}), 2.0), declab::PreconditionError);
  EXPECT_THROW(f.add(FreqPoint::from_ints({1, 2, 3}), 2.0), declab::PreconditionError);
}

TEST(EvaluateGrid, ConstantAndNyquist) {
  TrigPoly one(2);
  one.add(FreqPoint::from_ints({0, 0}), 1.0);
  const Grid g = evaluate_grid(one, Box::cube(2, 1.0, 0.5), 0.125);
  for (const auto &v : g.values)
    EXPECT_NEAR(std::abs(v - cplx(1, 0)), 0, 1e-14);
  TrigPoly f(1);
  f.add(FreqPoint::from_ints({8}), 1.0);
  EXPECT_THROW(evaluate_grid(f, Box::cube(1, 1.0), 0.1), declab::PreconditionError);
  EXPECT_NO_THROW(evaluate_grid(f, Box::cube(1, 1.0), 1.0 / 16));
}

TEST(EvaluateGrid, FftMatchesDirect) {
  const TrigPoly f = random_int_poly(2, 20, 16, 11);
  const Box box = Box::cube(2, 1.0, 0.5);
  const double h = 1.0 / 64;
  const Grid a = evaluate_grid(f, box, h, GridPath::fft);
  const Grid b = evaluate_grid(f, box, h, GridPath::direct);
  ASSERT_EQ(a.values.size(), 64u * 64u);
  ASSERT_EQ(a.values.size(), b.values.size());
  double err = 0, scale = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    err = std::max(err, std::abs(a.values[i] - b.values[i]));
    scale = std::max(scale, std::abs(b.values[i]));
  }
  EXPECT_LT(err, 1e-10);
  EXPECT_LT(err / scale, 1e-10);
  // Spot checks against pointwise evaluation.
  for (std::size_t i : {0u, 77u, 4095u}) {
    const std::vector<double> x{a.lo[0] + a.step[0] * (i / 64), a.lo[1] + a.step[1] * (i % 64)};
    EXPECT_LT(std::abs(evaluate(f, x) - a.values[i]), 1e-10);
  }
}

TEST(EvaluateGrid, ParabolaChecksum) {
  const TrigPoly f = TrigPoly::unit(declab::lattice::paraboloid_lattice(2, 1));
  const Grid g = evaluate_grid(f, Box::cube(2, 1.0, 0.5), 1.0 / 16);
  ASSERT_EQ(g.values.size(), 256u);
  // f(x) = 1 + 2 cos(2 pi x1) e(x2); sum |f|^2 over the grid is 256 * 3.
  double s = 0, s4 = 0;
  for (const auto &v : g.values) {
    s += std::norm(v);
    s4 += std::norm(v) * std::norm(v);
  }
  EXPECT_NEAR(s, 768.0, 1e-9);
  // Mean |f|^4 on the torus equals E_2 of the three points, 15.
  EXPECT_NEAR(s4 / 256.0, 15.0, 1e-9);
}

TEST(LpNormBox, SingleTermIsOne) {
  TrigPoly f(2);
  f.add(FreqPoint({Rational(3, 7), Rational(-2)}), cplx(0, 1));
  for (double p : {1.0, 2.0, 3.5, 6.0})
    EXPECT_NEAR(lp_norm_box(f, p, Box::cube(2, 3.3, 0.2), 0.25), 1.0, 1e-12);
}

TEST(LpNormBox, TwoPointFourthMoment) {
  TrigPoly f(1);
  f.add(FreqPoint::from_ints({0}), 1.0);
  f.add(FreqPoint::from_ints({1}), 1.0);
  EXPECT_NEAR(lp_norm_box(f, 4, Box::cube(1, 1.0, 0.5), 0.5), std::pow(6.0, 0.25), 1e-12);
  // Non-periodic box: trapezoid path still converges to the same value for a
  // long box.
  const double v = lp_norm_box(f, 4, Box::cube(1, 1000.5, 0.0), 0.05);
  EXPECT_NEAR(v, std::pow(6.0, 0.25), 2e-3);
}

TEST(LpNormBox, RefinementAndTranslation) {
  TrigPoly f(2);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int i = 0; i < 12; ++i)
    f.add(FreqPoint({Rational(i, 16), Rational(i * i, 256)}), {g(rng), g(rng)});
  const Box box = Box::cube(2, 23.0, 0.0);
  const double h = nyquist_spacing(f);
  const double a = lp_norm_box(f, 4, box, h), b = lp_norm_box(f, 4, box, h / 2);
  EXPECT_LT(std::fabs(a - b) / b, 0.005);
  // Translating the box and modulating f leave the norm unchanged.
  Box moved = box;
  moved.center = {7.25, -3.5};
  TrigPoly m(2);
  for (const auto &t : f.terms())
    m.add(t.xi + FreqPoint({Rational(1, 4), Rational(1, 8)}), t.a);
  const double c = lp_norm_box(m, 4, moved, nyquist_spacing(m) / 2);
  EXPECT_LT(std::fabs(c - b) / b, 0.005);
}

TEST(TorusMoment, ParsevalAndEnergy) {
  const TrigPoly f = random_int_poly(2, 25, 5, 9);
  const TorusMoment m = lp_norm_torus_even(f, 2);
  EXPECT_FALSE(m.exact);
  EXPECT_NEAR(static_cast<double>(m.approx), std::pow(f.l2_norm(), 2), 1e-10);
  TrigPoly u(1);
  for (int j = 0; j < 3; ++j)
    u.add(FreqPoint::from_ints({j}), 1.0);
  const TorusMoment e = lp_norm_torus_even(u, 4);
  EXPECT_TRUE(e.exact);
  EXPECT_EQ(e.value, 19);
  for (std::int64_t mm : {1, 2, 5, 9}) {
    TrigPoly v(1);
    for (std::int64_t j = 0; j < mm; ++j)
      v.add(FreqPoint::from_ints({j}), 1.0);
    EXPECT_EQ(lp_norm_torus_even(v, 4).value, (2 * mm * mm * mm + mm) / 3);
  }
  TrigPoly w(1);
  w.add(FreqPoint::from_ints({0}), cplx(2, -1));
  w.add(FreqPoint::from_ints({4}), cplx(0, 3));
  EXPECT_EQ(lp_norm_torus_even(w, 2).value, 14);
  TrigPoly r(1);
  r.add(FreqPoint({Rational(1, 2)}), 1.0);
  EXPECT_THROW(lp_norm_torus_even(r, 4), declab::PreconditionError);
  EXPECT_THROW(lp_norm_torus_even(w, 3), declab::PreconditionError);
}

TEST(TorusMoment, AgreesWithQuadrature) {
  const TrigPoly f = random_int_poly(2, 15, 4, 21);
  const double q = lp_norm_box(f, 6, Box::cube(2, 1.0, 0.5), 1.0 / 8);
  const TorusMoment m = lp_norm_torus_even(f, 6);
  EXPECT_NEAR(q, m.root, 1e-9 * m.root);
}

TEST(Weighted, IndicatorLimit) {
  TrigPoly f(2);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int i = 0; i < 6; ++i)
    f.add(FreqPoint({Rational(i, 8), Rational(i * i, 64)}), {g(rng), g(rng)});
  const Box box = Box::cube(2, 16.0, 0.0);
  Weight w = Weight::for_box(box, 400);
  const double h = nyquist_spacing(f) / 2;
  const double a = weighted_lp_norm(f, 4, w, h);
  const double b = lp_norm_box(f, 4, box, h) * std::pow(box.volume(), 0.25);
  EXPECT_NEAR(a / b, 1.0, 0.02);
  // Larger m gives a smaller value.
  double prev = weighted_lp_norm(f, 4, Weight::for_box(box, 10), h);
  for (int m : {20, 40, 80}) {
    const double v = weighted_lp_norm(f, 4, Weight::for_box(box, m), h);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Weighted, SingleTermMass) {
  TrigPoly f(2);
  f.add(FreqPoint({Rational(1, 3), Rational(1, 5)}), 1.0);
  const Box box{{0.0, 1.0}, {4.0, 6.0}};
  const Weight w = Weight::for_box(box, 20);
  // One-dimensional oracle: int over [-4s, 4s] of (1 + dist/R)^{-m}
  // = s + 2 R/(m-1) (1 - (1 + 3.5 s/R)^{1-m}).
  double mass = 1;
  for (double s : box.side)
    mass *= s + 2 * w.R / (w.m - 1) * (1 - std::pow(1 + 3.5 * s / w.R, 1 - w.m));
  const double h = 0.01;
  EXPECT_NEAR(weight_mass(w, h) / mass, 1.0, 1e-4);
  for (double p : {2.0, 4.0, 6.0})
    EXPECT_NEAR(weighted_lp_norm(f, p, w, h), std::pow(mass, 1 / p), 1e-4 * std::pow(mass, 1 / p));
}

TEST(Moment6, SweepMatchesBruteForce) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 6; ++trial) {
    std::uniform_int_distribution<int> c(-6, 9);
    std::set<FreqPoint> s;
    while (s.size() < 20)
      s.insert(FreqPoint::from_ints({c(rng), c(rng)}));
    PointSet pts(s.begin(), s.end());
    EXPECT_EQ(moment6_sweep(declab::to_int_points(pts)), brute_e3(pts));
  }
  // Symmetric set exercises the mirrored path.
  const PointSet para = declab::lattice::paraboloid_lattice(2, 6);
  EXPECT_EQ(moment6_sweep(declab::to_int_points(para)), brute_e3(para));
  const PointSet cube = declab::lattice::paraboloid_lattice(3, 2);
  EXPECT_EQ(moment6_sweep(declab::to_int_points(cube)), brute_e3(cube));
  // One-dimensional sets.
  PointSet line;
  for (int j = 0; j < 7; ++j)
    line.push_back(FreqPoint::from_ints({j * j % 11}));
  std::sort(line.begin(), line.end());
  line.erase(std::unique(line.begin(), line.end()), line.end());
  EXPECT_EQ(moment6_sweep(declab::to_int_points(line)), brute_e3(line));
}

TEST(Moment6, WeightedMatchesTorusMoment) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> c(-5, 5), w(-3, 3);
  std::set<FreqPoint> s;
  while (s.size() < 18)
    s.insert(FreqPoint::from_ints({c(rng), c(rng)}));
  PointSet pts(s.begin(), s.end());
  std::vector<std::int64_t> wt;
  TrigPoly f(2);
  for (const auto &p : pts) {
    wt.push_back(w(rng));
    f.add(p, static_cast<double>(wt.back()));
  }
  EXPECT_EQ(moment6_sweep(declab::to_int_points(pts), wt), lp_norm_torus_even(f, 6).value);
}

TEST(Moment6, ParabolaKernel) {
  for (std::int64_t N : {1, 2, 3, 5, 8, 13}) {
    const PointSet p = declab::lattice::paraboloid_lattice(2, N);
    EXPECT_EQ(parabola_moment6(-N, N), brute_e3(p)) << N;
  }
  PointSet q;
  for (std::int64_t j = 3; j <= 11; ++j)
    q.push_back(FreqPoint::from_ints({j, j * j}));
  EXPECT_EQ(parabola_moment6(3, 11), brute_e3(q));
  const PointSet big = declab::lattice::paraboloid_lattice(2, 40);
  EXPECT_EQ(parabola_moment6(-40, 40), moment6_sweep(declab::to_int_points(big)));
}

} // namespace
