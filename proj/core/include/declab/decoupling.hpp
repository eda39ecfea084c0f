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
#include <string>
#include <vector>

#include "declab/exp_sums.hpp"
#include "declab/lattice_sets.hpp"

namespace declab::decouple {

// How the two sides were evaluated.
//  periodic:   every box side is a whole number of frequency periods and p
//              is even; lhs is the box average (|B|^{-1} int_B |f|^p)^{1/p}
//              and each cap term is the same average of f_theta, which
//              equals |B|^{-1/p} ||f_theta||_{L^p(w)} for a weight with
//              Fourier support in B(0, 1/(2 side)) and total mass |B|.
//  quadrature: lhs is ||f||_{L^p(B)} by the trapezoid rule, cap terms are
//              weighted norms with the product weight on the 8x window.
enum class Route { periodic, quadrature };

std::string_view route_name(Route r);

struct DecouplingReport {
  lattice::Surface surface = lattice::Surface::paraboloid;
  int n = 0;
  double p = 0;
  double delta = 0;
  std::string family;
  double lhs = 0;
  double rhs = 0;
  double ratio = 0;
  double theo_exponent = 0; // K_p(delta) ~ delta^{-theo_exponent}
  double h = 0;
  std::uint64_t seed = 0;
  Route route = Route::periodic;
  std::size_t caps_used = 0; // nonempty cap terms
};

// (n-1)/4 - (n+1)/(2p) above the critical exponent 2(n+1)/(n-1), else 0.
double paraboloid_exponent(int n, double p);
// (n-2)/4 - n/(2p) above 2n/(n-2), else 0.
double cone_exponent(int n, double p);

// Terms of f whose frequency lies in the cap.
expsum::TrigPoly cap_restrict(const expsum::TrigPoly &f, const lattice::Cap &cap);

// f split along a cap assignment; frequencies covered by no cap are
// returned in `outside`.
struct CapSplit {
  std::vector<expsum::TrigPoly> pieces; // one per cap, possibly empty
  expsum::TrigPoly outside;
};
CapSplit split_by_caps(const expsum::TrigPoly &f, const std::vector<lattice::Cap> &caps);

// Both sides for a given split of f into pieces. Empty pieces are skipped.
DecouplingReport ratio_for_pieces(const expsum::TrigPoly &f, const std::vector<expsum::TrigPoly> &pieces,
                                  double p, const expsum::Box &box, double h);

// f on the rescaled paraboloid neighbourhood, caps from cap_partition(n,
// delta). Throws when some frequency lies in no cap.
DecouplingReport decoupling_ratio(const expsum::TrigPoly &f, double p, const Rational &delta,
                                  const expsum::Box &box, double h);

// Normalized average over the cube of side R about the origin against
// ||a||_2. Rejects sets that are not delta^{1/2}-separated.
struct RestrictionReport {
  int n = 0;
  double p = 0;
  double delta = 0;
  double R = 0;
  double lhs = 0;
  double l2 = 0;
  double ratio = 0;             // lhs / ||a||_2
  double reference = 0;         // delta^{(n+1)/(2p) - (n-1)/4} when supercritical, 1 otherwise
  double scaled = 0;            // ratio / reference
  bool subcritical = false;     // p <= 2(n+1)/(n-1)
};
RestrictionReport discrete_restriction_ratio(const PointSet &points, const std::vector<expsum::cplx> &coeffs,
                                             double p, double delta, double R, double h);

// Minimum |det(v_1..v_n)| over unit normals sampled at the centre and the
// cube corners of each of the n caps (one sample per cap).
enum class NormalSample { centers, corners_and_center };
double transversality(const std::vector<lattice::Cap> &caps, NormalSample sample = NormalSample::corners_and_center);

struct MultilinearReport {
  double lhs = 0; // || prod |g_i|^{1/n} ||_{L^p(B)}
  double rhs = 0; // prod_i (sum_theta ||g_{i,theta}||^2)^{1/(2n)}
  double ratio = 0;
  double nu = 0;
  // Geometric mean of the linear ratios of the g_i on the same grid; Holder
  // gives ratio <= linear_geomean.
  double linear_geomean = 0;
  Route route = Route::periodic;
};
MultilinearReport multilinear_ratio(const std::vector<expsum::TrigPoly> &g, const std::vector<lattice::Cap> &caps,
                                    double p, const Rational &delta, const expsum::Box &box, double h, double nu_min);

// L_tau: xi' -> (xi' - a)/sigma^{1/2}, xi_n -> (xi_n - 2 a.xi' + |a|^2)/sigma,
// with a the cap centre and sigma its scale. Throws if some frequency is
// not in tau.
expsum::TrigPoly parabolic_rescale(const expsum::TrigPoly &f, const lattice::Cap &tau);

// Witness families on the rescaled lattice paraboloid P^{n-1}(N), N =
// delta^{-1/2}: (a) unit coefficients, (b) unit coefficients on the
// central cap only, (c) seeded random signs, best of `draws`.
struct WitnessResult {
  std::vector<DecouplingReport> families; // a, b, c (c absent when skipped)
  std::size_t argmax = 0;
  bool c_skipped = false;
};
// One period cell in x_1 is 2N and in x_n is 4N^2; the box uses side N^2
// and 4N^2, both whole periods.
expsum::Box lattice_box(int n, std::int64_t N);
WitnessResult lower_bound_witness(int n, double p, const Rational &delta, std::uint64_t seed, int draws = 32,
                                  double c_budget = 2e9);

// Largest N for which family (c) is evaluated at n = 2, p = 6.
std::int64_t sign_family_limit(double c_budget);

// Cone slice {(a, b, c) : a^2 + b^2 = c^2, K <= c <= 2K} rescaled by 1/K,
// K = delta^{-1/2}, with sectors of angular width 2 pi / ceil(2 pi K).
// Torus period K per axis; box side delta^{-1} = K^2.
struct ConeReport {
  DecouplingReport report;
  std::size_t points = 0;
  std::size_t sectors = 0;
};
ConeReport cone_sector_ratio(const PointSet &cone_points, const std::vector<expsum::cplx> &coeffs, double p,
                             const Rational &delta);
ConeReport cone_unit_ratio(double p, const Rational &delta);

} // namespace declab::decouple
