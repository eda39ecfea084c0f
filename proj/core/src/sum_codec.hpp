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
#include <limits>
#include <vector>

#include "declab/errors.hpp"
#include "declab/rational.hpp"

namespace declab::detail {

// Linear mixed-radix code for integer vectors: code(v) = sum (v_i - min_i) s_i
// with radices wide enough for k-fold sums, so code(a + b) = code(a) + code(b)
// for any sum of at most k points of the set.
class SumCodec {
public:
  SumCodec(const IntPoints &pts, int k, std::size_t first_axis = 0) : k_(k), first_(first_axis) {
    const int n = pts.n;
    const std::size_t m = pts.size();
    for (int i = static_cast<int>(first_axis); i < n; ++i) {
      std::int64_t lo = std::numeric_limits<std::int64_t>::max();
      std::int64_t hi = std::numeric_limits<std::int64_t>::min();
      for (std::size_t j = 0; j < m; ++j) {
        lo = std::min(lo, pts[j][i]);
        hi = std::max(hi, pts[j][i]);
      }
      if (m == 0)
        lo = hi = 0;
      min_.push_back(lo);
      const long double width = static_cast<long double>(k) * (static_cast<long double>(hi) - lo) + 1;
      widths_.push_back(width);
    }
    long double total = 1;
    for (auto w : widths_) {
      stride_.push_back(static_cast<std::uint64_t>(total));
      total *= w;
    }
    if (total > static_cast<long double>(std::numeric_limits<std::uint64_t>::max() / 4))
      throw BudgetExceeded("sum range does not fit a 64-bit code", static_cast<double>(total));
    range_ = static_cast<std::uint64_t>(total);
  }

  std::uint64_t encode(const std::int64_t *v) const {
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < min_.size(); ++i)
      c += static_cast<std::uint64_t>(v[first_ + i] - min_[i]) * stride_[i];
    return c;
  }

  std::uint64_t range() const { return range_; }
  int k() const { return k_; }

private:
  int k_;
  std::size_t first_;
  std::vector<std::int64_t> min_;
  std::vector<long double> widths_;
  std::vector<std::uint64_t> stride_;
  std::uint64_t range_ = 1;
};

} // namespace declab::detail
