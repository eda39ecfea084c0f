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
#include <complex>

namespace declab::detail {

// Neumaier-compensated sum. Used for every floating reduction so results do
// not depend on how callers chunk the data beyond ~1e-12 relative.
struct NeumaierSum {
  double s = 0.0;
  double c = 0.0;

  void add(double v) {
    const double t = s + v;
    if (std::fabs(s) >= std::fabs(v))
      c += (s - t) + v;
    else
      c += (v - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

struct ComplexNeumaier {
  NeumaierSum re, im;
  void add(std::complex<double> v) {
    re.add(v.real());
    im.add(v.imag());
  }
  std::complex<double> value() const { return {re.value(), im.value()}; }
};

// e(t) = exp(2 pi i t) after reducing t modulo 1 in extended precision.
inline std::complex<double> unit_phase(long double t) {
  t -= std::nearbyint(t);
  const long double a = 2.0L * 3.141592653589793238462643383279502884L * t;
  return {static_cast<double>(std::cos(a)), static_cast<double>(std::sin(a))};
}

} // namespace declab::detail
