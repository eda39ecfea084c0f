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

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "compensated.hpp"
#include "declab/errors.hpp"
#include "declab/exp_sums.hpp"

namespace declab::detail {

struct AxisGrid {
  double lo;
  double step;
  std::size_t count;
};

// Separable evaluation of a trigonometric polynomial on a tensor grid. Each
// axis keeps a table of e(u x_j) over the distinct frequency values u on
// that axis; the last axis is handled by a dense complex matrix product over
// blocks of outer grid indices.
class TensorEvaluator {
public:
  TensorEvaluator(const expsum::TrigPoly &f, std::vector<AxisGrid> axes) : axes_(std::move(axes)) {
    n_ = f.n();
    if (static_cast<int>(axes_.size()) != n_)
      throw PreconditionError("grid dimension differs from the polynomial's");
    const std::size_t T = f.size();
    idx_.assign(static_cast<std::size_t>(n_), std::vector<std::size_t>(T));
    tables_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      std::map<Rational, std::size_t> uniq;
      for (const auto &t : f.terms())
        uniq.emplace(t.xi[i], 0);
      std::size_t u = 0;
      for (auto &kv : uniq)
        kv.second = u++;
      for (std::size_t t = 0; t < T; ++t)
        idx_[i][t] = uniq.at(f.terms()[t].xi[i]);
      const auto &ax = axes_[i];
      Eigen::MatrixXcd tab(static_cast<Eigen::Index>(uniq.size()), static_cast<Eigen::Index>(ax.count));
      for (const auto &[val, row] : uniq) {
        const long double v = val.to_long_double();
        for (std::size_t j = 0; j < ax.count; ++j) {
          const long double x = static_cast<long double>(ax.lo) + static_cast<long double>(ax.step) * j;
          tab(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) = unit_phase(v * x);
        }
      }
      tables_[i] = std::move(tab);
    }
    coef_.reserve(T);
    for (const auto &t : f.terms())
      coef_.push_back(t.a);
    const double bytes = 16.0 * static_cast<double>(tables_.back().size());
    if (bytes > 1.5e9)
      throw BudgetExceeded("phase table for the last axis too large", bytes);
  }

  // Calls fn(outer, row) for every outer index in increasing order, with row
  // the values along the last axis.
  template <class Fn> void for_each_row(Fn &&fn) const {
    const int last = n_ - 1;
    std::size_t outer_total = 1;
    for (int i = 0; i < last; ++i)
      outer_total *= axes_[i].count;
    const auto U = tables_[last].rows();
    const auto J = tables_[last].cols();
    constexpr std::size_t block = 64;
    Eigen::MatrixXcd C(static_cast<Eigen::Index>(block), U);
    Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out;
    std::vector<std::size_t> jidx(static_cast<std::size_t>(std::max(last, 1)), 0);
    for (std::size_t start = 0; start < outer_total; start += block) {
      const std::size_t nb = std::min(block, outer_total - start);
      C.setZero();
      for (std::size_t b = 0; b < nb; ++b) {
        std::size_t rem = start + b;
        for (int i = last - 1; i >= 0; --i) {
          jidx[i] = rem % axes_[i].count;
          rem /= axes_[i].count;
        }
        for (std::size_t t = 0; t < coef_.size(); ++t) {
          std::complex<double> c = coef_[t];
          for (int i = 0; i < last; ++i)
            c *= tables_[i](static_cast<Eigen::Index>(idx_[i][t]), static_cast<Eigen::Index>(jidx[i]));
          C(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(idx_[last][t])) += c;
        }
      }
      out.noalias() = C.topRows(static_cast<Eigen::Index>(nb)) * tables_[last];
      for (std::size_t b = 0; b < nb; ++b)
        fn(start + b, out.data() + static_cast<std::ptrdiff_t>(b) * J);
    }
  }

private:
  int n_ = 0;
  std::vector<AxisGrid> axes_;
  std::vector<std::vector<std::size_t>> idx_;
  std::vector<Eigen::MatrixXcd> tables_;
  std::vector<std::complex<double>> coef_;
};

} // namespace declab::detail
