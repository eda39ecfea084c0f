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

#include <string>
#include <string_view>
#include <vector>

#include "declab/energy.hpp"

namespace declab::exp {

enum class GradeMode { two_sided, upper_bound };

std::string_view grade_mode_name(GradeMode m);

struct SweepRow {
  double scale = 0;
  double measured = 0;
  double reference = 0;
};

struct SweepReport {
  std::string label;
  std::vector<SweepRow> rows;
  energy::FitResult fit;
  double theoretical = 0;
  double tolerance = 0;
  GradeMode mode = GradeMode::upper_bound;
  std::size_t fit_rows = 0; // rows used by the fit (the largest scales)
  bool pass = false;
};

// Fits log(measured) against log(scale) over the last `use_last` rows (all
// rows when 0) and grades the slope. two_sided: |fit - theo| <= tol;
// upper_bound: fit <= theo + tol.
bool fit_and_compare(SweepReport &report, double theoretical, double tolerance, GradeMode mode,
                     std::size_t use_last = 0);

} // namespace declab::exp
