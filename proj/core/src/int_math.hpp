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

#include <cmath>
#include <cstdint>

#include "declab/bigint.hpp"
#include "declab/errors.hpp"

namespace declab::detail {

inline std::int64_t isqrt(std::int64_t v) {
  if (v < 0)
    throw PreconditionError("isqrt of negative value");
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(v)));
  while (r > 0 && static_cast<i128>(r) * r > v)
    --r;
  while (static_cast<i128>(r + 1) * (r + 1) <= v)
    ++r;
  return r;
}

// Smallest r >= 0 with r*r >= v.
inline std::int64_t ceil_sqrt(std::int64_t v) {
  if (v <= 0)
    return 0;
  std::int64_t r = isqrt(v);
  return r * r == v ? r : r + 1;
}

inline std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i)
    r = checked_mul64(r, b);
  return r;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0)))
    --q;
  return q;
}

} // namespace declab::detail
