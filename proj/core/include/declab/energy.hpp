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

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "declab/bigint.hpp"
#include "declab/rational.hpp"

namespace declab::energy {

struct EnergyReport {
  int k = 0;
  BigInt count;
  std::size_t size = 0;
  BigInt trivial_lower; // |Lambda|^k
};

inline constexpr double kDefaultSumBudget = 1e8;

// E_k: ordered 2k-tuples with lambda_1 + .. + lambda_k = lambda_{k+1} + ..
// + lambda_{2k}. Multiplicities of k-fold sums are built by repeated
// convolution on exact coordinates (rationals are scaled to a common
// denominator per axis). Throws BudgetExceeded when the number of k-fold
// sums that may need storing exceeds the budget.
BigInt additive_energy(const PointSet &points, int k, double sum_budget = kDefaultSumBudget);
EnergyReport energy_report(const PointSet &points, int k, double sum_budget = kDefaultSumBudget);

// E_3 through the column sweep kernel for integer sets; falls back to
// additive_energy otherwise.
BigInt energy3(const PointSet &points);

// Compares additive_energy with the torus moment of the unit-coefficient
// sum. Returns true or throws CrosscheckFailure.
bool energy_torus_crosscheck(const PointSet &points, int k);

// Points (a, b, a^2 + b^2) on P^2.
struct Quadruple {
  FreqPoint p1, p2, p3, p4; // p1 + p2 = p3 + p4
};

struct CircleStructure {
  Rational center_x, center_y; // (A/2, B/2)
  Rational radius_sq;          // (2C - A^2 - B^2)/4
  bool on_circle = false;      // all four projections lie on the circle
  bool diametrically_opposite = false; // p1,p2 and p3,p4 antipodal
};

// Throws PreconditionError unless the four points lie on P^2 and satisfy
// p1 + p2 = p3 + p4.
CircleStructure quadruple_circle_structure(const Quadruple &q);

// All ordered quadruples (i, j, k, l) with p_i + p_j = p_k + p_l and
// {i, j} != {k, l}, visited in a deterministic order, at most `limit`.
std::vector<Quadruple> harvest_quadruples(const PointSet &points, std::size_t limit);

// Seeded sample of `count` distinct points (a, b, a^2 + b^2) with
// |a|, |b| <= half_side.
PointSet random_paraboloid_sample(std::size_t count, std::int64_t half_side, std::uint64_t seed);

struct RightAngles {
  BigInt ordered;   // triples (P1, P2, P3), vertex P2, P1 != P3
  BigInt unordered; // ordered / 2
};

// Exact right-angle count. Per vertex, directions are reduced to primitive
// integer vectors, so the cost is O(N^2) hash operations; `budget` bounds
// N^2.
RightAngles right_angle_count(const PointSet &points, double budget = 1e9);

struct FitResult {
  double slope = 0;
  double intercept = 0;
  double max_residual = 0;
  std::size_t max_residual_index = 0;
  std::size_t points = 0;
};

// Least squares of log c against log s. Needs >= 4 rows, increasing sizes,
// positive counts.
FitResult exponent_fit(const std::vector<std::pair<double, double>> &sweep);

} // namespace declab::energy
