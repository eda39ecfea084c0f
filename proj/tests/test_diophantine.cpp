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

#include <gtest/gtest.h>

#include "declab/diophantine.hpp"
#include "declab/errors.hpp"
#include "declab/exp_sums.hpp"

namespace {

using declab::BigInt;
using declab::Rational;
using namespace declab::dioph;

// Six nested loops over (N, 2N]; the window bound is recomputed here from
// the definition in long double and compared with exact integers.
std::int64_t brute(System sys, std::int64_t N, int k, const Rational &C) {
  const int e = sys == System::linear ? k - 2 : k - 1;
  const auto T = static_cast<__int128>(std::floor(C.to_long_double() * std::pow(static_cast<long double>(N), e) + 1e-9L));
  std::vector<__int128> pk(2 * N + 1);
  for (std::int64_t n = 0; n <= 2 * N; ++n) {
    __int128 v = 1;
    for (int i = 0; i < k; ++i)
      v *= n;
    pk[n] = v;
  }
  std::int64_t count = 0;
  const std::int64_t lo = N + 1, hi = 2 * N;
  for (std::int64_t a = lo; a <= hi; ++a)
    for (std::int64_t b = lo; b <= hi; ++b)
      for (std::int64_t c = lo; c <= hi; ++c)
        for (std::int64_t d = lo; d <= hi; ++d)
          for (std::int64_t f = lo; f <= hi; ++f)
            for (std::int64_t g = lo; g <= hi; ++g) {
              const bool eq = sys == System::linear ? a + b + c == d + f + g
                                                    : a * a + b * b + c * c == d * d + f * f + g * g;
              if (!eq)
                continue;
              __int128 diff = pk[a] + pk[b] + pk[c] - pk[d] - pk[f] - pk[g];
              if (diff < 0)
                diff = -diff;
              count += diff <= T;
            }
  return count;
}

TEST(Diophantine, MatchesBruteForceAtEight) {
  for (System sys : {System::linear, System::quadratic})
    for (int k = 2; k <= 5; ++k)
      for (const Rational C : {Rational(0), Rational(1), Rational(10), Rational(1, 2)}) {
        const BigInt got = count_perturbed(sys, 8, k, C);
        EXPECT_EQ(got, brute(sys, 8, k, C)) << static_cast<int>(sys) << " k=" << k << " C=" << C;
      }
}

TEST(Diophantine, MatchesBruteForceAtSixteen) {
  EXPECT_EQ(count_perturbed_linear(16, 3, Rational(1)), brute(System::linear, 16, 3, Rational(1)));
  EXPECT_EQ(count_perturbed_quadratic(16, 4, Rational(1)), brute(System::quadratic, 16, 4, Rational(1)));
}

TEST(Diophantine, DiagonalAndMonotone) {
  for (std::int64_t N : {1, 2, 5, 9}) {
    const BigInt n = N;
    EXPECT_EQ(diagonal_count(N), 6 * n * n * n - 9 * n * n + 4 * n);
    EXPECT_GE(diagonal_count(N), n * n * n);
  }
  for (System sys : {System::linear, System::quadratic})
    for (int k : {3, 4}) {
      BigInt prev = 0;
      for (const Rational C : {Rational(0), Rational(1), Rational(2), Rational(4), Rational(8)}) {
        const BigInt c = count_perturbed(sys, 12, k, C);
        EXPECT_GE(c, prev);
        EXPECT_GE(c, diagonal_count(12));
        prev = c;
      }
    }
}

TEST(Diophantine, LinearKTwoIsParabolaMoment) {
  // With k = 2 and C < 1 the linear system asks for equal sums and equal
  // sums of squares: the sixth moment of the parabola over (N, 2N].
  for (std::int64_t N : {3, 10, 24})
    EXPECT_EQ(count_perturbed_linear(N, 2, Rational(1, 2)), declab::expsum::parabola_moment6(N + 1, 2 * N));
}

TEST(Diophantine, WindowBound) {
  EXPECT_EQ(window_bound(System::linear, 8, 3, Rational(1)), 8);
  EXPECT_EQ(window_bound(System::linear, 8, 2, Rational(10)), 10);
  EXPECT_EQ(window_bound(System::quadratic, 8, 4, Rational(3, 2)), 768);
  EXPECT_EQ(window_bound(System::linear, 7, 3, Rational(1, 2)), 3);
  EXPECT_THROW(count_perturbed_linear(0, 3, Rational(1)), declab::PreconditionError);
  EXPECT_THROW(count_perturbed_linear(8, 1, Rational(1)), declab::PreconditionError);
}

TEST(Diophantine, SweepReport) {
  const auto r = diophantine_sweep(System::linear, 3, Rational(1), {4, 8, 16, 32, 64});
  EXPECT_EQ(r.rows.size(), 5u);
  EXPECT_EQ(r.fit_rows, 5u);
  EXPECT_GT(r.fit.slope, 2.8);
  EXPECT_LT(r.fit.slope, 3.3);
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(in_theorem(System::quadratic, 3));
  EXPECT_TRUE(in_theorem(System::quadratic, 4));
}

} // namespace
