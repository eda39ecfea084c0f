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

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "declab/bigint.hpp"
#include "declab/rational.hpp"

namespace declab::expsum {

using cplx = std::complex<double>;

struct Term {
  FreqPoint xi;
  cplx a;
};

// f(x) = sum_xi a_xi e(xi . x) with pairwise distinct frequencies.
class TrigPoly {
public:
  explicit TrigPoly(int n = 0) : n_(n) {}
  TrigPoly(int n, std::vector<Term> terms);

  static TrigPoly unit(const PointSet &points);
  static TrigPoly with_coefficients(const PointSet &points, const std::vector<cplx> &coeffs);

  // Throws PreconditionError on a repeated frequency or wrong dimension.
  void add(FreqPoint xi, cplx a);

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  const std::vector<Term> &terms() const noexcept { return terms_; }

  double l2_norm() const;
  double l1_norm() const;
  double max_abs_frequency() const; // max over terms of |xi|_inf
  bool integer_frequencies() const;
  // Coefficients with integral real and imaginary parts (|.| < 2^53).
  bool gaussian_integer_coefficients() const;

private:
  int n_;
  std::vector<Term> terms_;
  std::unordered_map<FreqPoint, std::size_t, FreqPointHash> index_;
};

struct Box {
  std::vector<double> center;
  std::vector<double> side;

  static Box cube(int n, double side, double center = 0.0);
  int n() const noexcept { return static_cast<int>(side.size()); }
  double volume() const;
};

// Product weight prod_i (1 + dist_i / R)^{-m}, dist_i the distance of x_i to
// the box's i-th side interval. It equals 1 on the box and sits below
// (1 + dist(x, B)/R)^{-m}. Integration is truncated to the box dilated 8x
// about its centre.
struct Weight {
  std::vector<double> center;
  std::vector<double> side;
  double R = 1.0;
  int m = 20;

  static Weight for_box(const Box &box, int m = 0); // m = 0 selects 10 n
  double axis_factor(int axis, double x) const;
  double operator()(std::span<const double> x) const;
  Box window() const;
};

cplx evaluate(const TrigPoly &f, std::span<const double> x);

// h <= 1/(2 max |xi|_inf); a zero-frequency-only f returns 1.
double nyquist_spacing(const TrigPoly &f);

enum class HPolicy { nyquist, half, quarter };
HPolicy parse_h_policy(std::string_view s);
std::string_view h_policy_name(HPolicy p);
double policy_spacing(const TrigPoly &f, HPolicy p);

struct Grid {
  std::vector<std::size_t> shape;
  std::vector<double> lo;
  std::vector<double> step;
  bool periodic = false; // true: lo + j step, j < shape; false: endpoints included
  std::vector<cplx> values; // row-major, last axis fastest
};

enum class GridPath { automatic, direct, fft };

// Regular grid on the box. The FFT path needs integer frequencies, a unit
// period-cell box (every side 1) and 1/h integral.
Grid evaluate_grid(const TrigPoly &f, const Box &box, double h, GridPath path = GridPath::automatic);

// Normalized average (|B|^{-1} int_B |f|^p)^{1/p}. Boxes whose sides are
// whole multiples of the frequency period use the periodic rectangle rule;
// other boxes use the tensor trapezoid rule.
double lp_norm_box(const TrigPoly &f, double p, const Box &box, double h);

// Mean of |f|^p over the unit torus for integer frequencies, from an FFT
// grid with at least ceil(p) * span + 1 points per axis (exact for even p).
double torus_mean_power(const TrigPoly &f, double p, std::size_t min_points = 1);

// f(j_1/M_1, .., j_n/M_n) for integer frequencies, row-major.
std::vector<cplx> periodic_samples(const TrigPoly &f, const std::vector<std::size_t> &M);
// Smallest 7-smooth integer >= m.
std::size_t fft_friendly_size(std::size_t m);

struct TorusMoment {
  bool exact = false;
  BigInt value;       // int_{T^n} |f|^{2k}, when exact
  long double approx = 0; // same quantity in floating point (always set)
  double root = 0;    // (int |f|^{2k})^{1/(2k)}
};

// Exact for Gaussian-integer coefficients; p must be an even integer 2k.
TorusMoment lp_norm_torus_even(const TrigPoly &f, int p);

// (int |f|^p w)^{1/p}, unnormalized, over the weight's truncation window.
double weighted_lp_norm(const TrigPoly &f, double p, const Weight &w, double h);
// int w over the truncation window by the same quadrature.
double weight_mass(const Weight &w, double h);

// Sum over s of |c_3(s)|^2 with c_3 the three-fold weighted convolution on
// Z^d: the sixth torus moment of sum_j w_j e(lambda_j . x). Column sweep
// over the first coordinate; cost ~ |supp c_2| |Lambda|.
BigInt moment6_sweep(const IntPoints &points, const std::vector<std::int64_t> &weights = {});

// Same quantity for unit weights on {(j, j^2) : L <= j <= H}, by grouping
// difference vectors (p, q) = (x1 - x2, x2 - x3) on the value of
// p^2 + q^2 + (p + q)^2 = 3 sum x_i^2 - (sum x_i)^2.
BigInt parabola_moment6(std::int64_t L, std::int64_t H);

} // namespace declab::expsum
