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
#include <vector>

#include "declab/bigint.hpp"
#include "declab/rational.hpp"
#include "declab/sweep.hpp"

namespace declab::dioph {

enum class System { linear, quadratic };

// Variables range over the dyadic window (N, 2N]. Both systems count
// ordered sextuples (n1..n6).
//
// linear:    n1+n2+n3 = n4+n5+n6 and |sum n_i^k - sum n_j^k| <= C N^{k-2}
// quadratic: n1^2+n2^2+n3^2 = n4^2+n5^2+n6^2 and the same with C N^{k-1}
//
// The window is closed; its bound floor(C N^e) is computed exactly.
BigInt count_perturbed_linear(std::int64_t N, int k, const Rational &C);
BigInt count_perturbed_quadratic(std::int64_t N, int k, const Rational &C);
BigInt count_perturbed(System sys, std::int64_t N, int k, const Rational &C);

// floor(C N^e), e = k - 2 (linear) or k - 1 (quadratic).
std::int64_t window_bound(System sys, std::int64_t N, int k, const Rational &C);

// Sextuples with (n4, n5, n6) a permutation of (n1, n2, n3):
// 6 N(N-1)(N-2) + 9 N(N-1) + N.
BigInt diagonal_count(std::int64_t N);

// True when the theorem covers (sys, k): linear k >= 3 is graded, quadratic
// needs k >= 4.
bool in_theorem(System sys, int k);

// Counts over the N list, fitted over the largest `fit_last` scales and
// graded in upper-bound mode against slope 3.
exp::SweepReport diophantine_sweep(System sys, int k, const Rational &C, const std::vector<std::int64_t> &Ns,
                                   double tolerance = 0.3, std::size_t fit_last = 5);

} // namespace declab::dioph
