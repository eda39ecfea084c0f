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

#include "declab/diophantine.hpp"

#include <algorithm>
#include <cmath>

#include "declab/errors.hpp"
#include "int_math.hpp"

namespace declab::dioph {

namespace {

void check_args(std::int64_t N, int k, const Rational &C) {
  if (N < 1)
    throw PreconditionError("N must be positive");
  if (k < 2)
    throw PreconditionError("k must be at least 2");
  if (C < Rational(0))
    throw PreconditionError("C must be nonnegative");
  // Power sums of three values up to 2N must fit 126 bits.
  if (static_cast<double>(k) * std::log2(2.0 * static_cast<double>(N)) > 120)
    throw BudgetExceeded("power sums exceed 128-bit range", 0);
  if (static_cast<double>(N) > 4096)
    throw BudgetExceeded("N too large for the group sweep", std::pow(static_cast<double>(N), 2) * 48.0);
}

std::vector<i128> powers(std::int64_t N, int k) {
  std::vector<i128> p(static_cast<std::size_t>(2 * N + 1), 0);
  for (std::int64_t n = N + 1; n <= 2 * N; ++n) {
    i128 v = 1;
    for (int i = 0; i < k; ++i)
      v = checked_mul(v, n);
    p[static_cast<std::size_t>(n)] = v;
  }
  return p;
}

// Ordered pairs (u, v) of the sorted values with |u - v| <= T.
u128 close_pairs(std::vector<i128> &vals, i128 T) {
  std::sort(vals.begin(), vals.end());
  u128 total = 0;
  std::size_t lo = 0, hi = 0;
  const std::size_t m = vals.size();
  for (std::size_t i = 0; i < m; ++i) {
    while (vals[lo] < vals[i] - T)
      ++lo;
    if (hi < i)
      hi = i;
    while (hi + 1 < m && vals[hi + 1] <= vals[i] + T)
      ++hi;
    total += static_cast<u128>(hi - lo + 1);
  }
  return total;
}

} // namespace

std::int64_t window_bound(System sys, std::int64_t N, int k, const Rational &C) {
  const int e = sys == System::linear ? k - 2 : k - 1;
  const i128 pw = detail::ipow(N, e);
  const i128 num = checked_mul(static_cast<i128>(C.num()), pw);
  const i128 q = num / C.den();
  if (q > static_cast<i128>(INT64_MAX))
    throw OverflowError("window bound exceeds 64 bits");
  return static_cast<std::int64_t>(q);
}

BigInt count_perturbed_linear(std::int64_t N, int k, const Rational &C) {
  check_args(N, k, C);
  const i128 T = window_bound(System::linear, N, k, C);
  const std::vector<i128> pk = powers(N, k);
  u128 total = 0;
  std::vector<i128> vals;
  for (std::int64_t s = 3 * (N + 1); s <= 6 * N; ++s) {
    vals.clear();
    for (std::int64_t a = N + 1; a <= 2 * N; ++a) {
      // b and c = s - a - b both inside (N, 2N].
      const std::int64_t blo = std::max(N + 1, s - a - 2 * N);
      const std::int64_t bhi = std::min(2 * N, s - a - (N + 1));
      for (std::int64_t b = blo; b <= bhi; ++b)
        vals.push_back(pk[a] + pk[b] + pk[s - a - b]);
    }
    total = checked_add(total, close_pairs(vals, T));
  }
  return to_big(total);
}

BigInt count_perturbed_quadratic(std::int64_t N, int k, const Rational &C) {
  check_args(N, k, C);
  const i128 T = window_bound(System::quadratic, N, k, C);
  const std::vector<i128> pk = powers(N, k);
  const std::int64_t Qlo = 3 * (N + 1) * (N + 1), Qhi = 12 * N * N;
  const double density = std::pow(static_cast<double>(N), 3) / static_cast<double>(Qhi - Qlo + 1);
  const auto W = std::max<std::int64_t>(1, static_cast<std::int64_t>(8.0e6 / std::max(density, 1e-9)));
  u128 total = 0;
  std::vector<std::uint32_t> qidx, count;
  std::vector<i128> vals, sorted;
  for (std::int64_t Q0 = Qlo; Q0 <= Qhi; Q0 += W) {
    const std::int64_t Q1 = std::min(Qhi + 1, Q0 + W);
    const auto Wn = static_cast<std::size_t>(Q1 - Q0);
    qidx.clear();
    vals.clear();
    for (std::int64_t a = N + 1; a <= 2 * N; ++a)
      for (std::int64_t b = N + 1; b <= 2 * N; ++b) {
        const std::int64_t r = a * a + b * b;
        const std::int64_t clo = std::max(N + 1, detail::ceil_sqrt(Q0 - r));
        const std::int64_t chi = Q1 - 1 - r < 0 ? N : std::min(2 * N, detail::isqrt(Q1 - 1 - r));
        for (std::int64_t c = clo; c <= chi; ++c) {
          qidx.push_back(static_cast<std::uint32_t>(r + c * c - Q0));
          vals.push_back(pk[a] + pk[b] + pk[c]);
        }
      }
    count.assign(Wn + 1, 0);
    for (auto q : qidx)
      ++count[q + 1];
    for (std::size_t i = 0; i < Wn; ++i)
      count[i + 1] += count[i];
    sorted.resize(vals.size());
    {
      std::vector<std::uint32_t> pos(count.begin(), count.end() - 1);
      for (std::size_t i = 0; i < vals.size(); ++i)
        sorted[pos[qidx[i]]++] = vals[i];
    }
    std::vector<i128> grp;
    for (std::size_t q = 0; q < Wn; ++q) {
      if (count[q + 1] == count[q])
        continue;
      grp.assign(sorted.begin() + count[q], sorted.begin() + count[q + 1]);
      total = checked_add(total, close_pairs(grp, T));
    }
  }
  return to_big(total);
}

BigInt count_perturbed(System sys, std::int64_t N, int k, const Rational &C) {
  return sys == System::linear ? count_perturbed_linear(N, k, C) : count_perturbed_quadratic(N, k, C);
}

BigInt diagonal_count(std::int64_t N) {
  const BigInt n = N;
  return 6 * n * (n - 1) * (n - 2) + 9 * n * (n - 1) + n;
}

bool in_theorem(System sys, int k) { return sys == System::linear ? k >= 2 : k >= 4; }

exp::SweepReport diophantine_sweep(System sys, int k, const Rational &C, const std::vector<std::int64_t> &Ns,
                                   double tolerance, std::size_t fit_last) {
  if (Ns.size() < 4)
    throw PreconditionError("diophantine_sweep needs at least 4 values of N");
  exp::SweepReport r;
  r.label = std::string(sys == System::linear ? "linear" : "quadratic") + " k=" + std::to_string(k) +
            " C=" + C.str() + (in_theorem(sys, k) ? "" : " (out-of-theorem)");
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    const std::int64_t N = Ns[i];
    if (N < 1 || (N & (N - 1)) != 0)
      throw PreconditionError("diophantine_sweep needs dyadic N");
    if (i > 0 && N <= Ns[i - 1])
      throw PreconditionError("diophantine_sweep needs increasing N");
    const BigInt c = count_perturbed(sys, N, k, C);
    r.rows.push_back({static_cast<double>(N), to_double(c), to_double(diagonal_count(N))});
  }
  exp::fit_and_compare(r, 3.0, tolerance, exp::GradeMode::upper_bound, fit_last);
  return r;
}

} // namespace declab::dioph
