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

#include "declab/sweep.hpp"

#include <cmath>

#include "declab/errors.hpp"

namespace declab::exp {

std::string_view grade_mode_name(GradeMode m) {
  return m == GradeMode::two_sided ? "two-sided" : "upper-bound";
}

bool fit_and_compare(SweepReport &report, double theoretical, double tolerance, GradeMode mode,
                     std::size_t use_last) {
  const std::size_t n = report.rows.size();
  const std::size_t take = use_last == 0 ? n : std::min(use_last, n);
  if (take < 4)
    throw PreconditionError("fit_and_compare needs at least 4 rows");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = n - take; i < n; ++i)
    pts.emplace_back(report.rows[i].scale, report.rows[i].measured);
  report.fit = energy::exponent_fit(pts);
  report.fit.max_residual_index += n - take;
  report.fit_rows = take;
  report.theoretical = theoretical;
  report.tolerance = tolerance;
  report.mode = mode;
  if (mode == GradeMode::two_sided)
    report.pass = std::fabs(report.fit.slope - theoretical) <= tolerance;
  else
    report.pass = report.fit.slope <= theoretical + tolerance;
  return report.pass;
}

} // namespace declab::exp
