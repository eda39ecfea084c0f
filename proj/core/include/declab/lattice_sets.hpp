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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "declab/rational.hpp"

namespace declab::lattice {

enum class Surface { paraboloid, sphere, cone, annulus };

std::string_view surface_tag(Surface s);
Surface parse_surface(std::string_view tag);

// {(xi_1..xi_{n-1}, sum xi_i^2) : xi_i integer, |xi_i| <= N}, in
// lexicographic order of the first n-1 coordinates.
PointSet paraboloid_lattice(int n, std::int64_t N);

// All xi in Z^n with |xi|^2 = lambda, lexicographically sorted.
PointSet sphere_lattice(int n, std::int64_t lambda);

// Integer bounds used for the annulus R <= |xi| <= R + R^{-1/3}. The lower
// bound ceil(R^2) is exact. For the upper bound t is the first double not
// below R^{-1/3} (certified with rational arithmetic), so points within one
// ulp outside the true annulus may be included.
struct AnnulusBounds {
  double R = 0;
  double t = 0; // outward-rounded R^{-1/3}
  std::int64_t lower_sq = 0;
  std::int64_t upper_sq = 0;
};

AnnulusBounds annulus_bounds(double R);
PointSet annulus_lattice(double R);

// Integer points (a, b, c) with a^2 + b^2 = c^2 and K <= c <= 2K.
PointSet cone_lattice(std::int64_t K);

// Lattice points of P^{n-1}(N) mapped onto [-1/2,1/2]^{n-1} x R by
// xi' -> xi'/(2N), xi_n -> xi_n/(4N^2), so they lie on the unit paraboloid.
PointSet rescale_paraboloid_lattice(const PointSet &points, std::int64_t N);

struct Cap {
  Surface surface = Surface::paraboloid;
  FreqPoint center; // paraboloid: (c', |c'|^2); sphere: point of S^{n-1}
  Rational delta;   // scale, a power of 1/4 for paraboloid caps
  int n = 0;

  // delta^{1/2}; exact because delta is a power of 1/4.
  Rational sqrt_delta() const;
  // Half the cube side, delta^{1/2}/2.
  Rational half_width() const { return sqrt_delta() / Rational(2); }
  bool contains(const FreqPoint &xi) const;
};

// Returns sqrt(delta) when delta is 4^{-j}, j >= 0; throws otherwise.
Rational dyadic_sqrt(const Rational &delta);

// Caps of P_delta: centers on (delta^{1/2}/2) Z^{n-1} intersected with
// [-1/2,1/2]^{n-1}, each with cube side delta^{1/2} and slab |eta| <= 2 delta.
std::vector<Cap> cap_partition(int n, const Rational &delta);

struct CapAssignment {
  std::vector<std::vector<std::size_t>> fibers; // point indices per cap
  std::vector<std::size_t> uncovered;
};

// Each point goes to the lexicographically smallest cap center containing it.
CapAssignment assign_to_caps(const PointSet &points, const std::vector<Cap> &caps);

struct Sector {
  std::size_t index = 0;
  double r_lo = 0, r_hi = 0;
  double angle_lo = 0, angle_hi = 0; // radians in [0, 2 pi)
};

struct SectorFiber {
  Sector sector;
  PointSet points;
};

std::size_t annulus_sector_count(double R);
// Index in [0, count) of the equal-angle sector holding (x, y).
std::size_t angular_sector_index(double x, double y, std::size_t count);
std::vector<SectorFiber> annulus_sectors(double R);

struct Collinearity {
  bool collinear = true;
  bool equidistant = true;
  std::optional<Rational> spacing_sq; // squared gap, exact
  std::optional<double> spacing;
};

Collinearity collinearity_check(const PointSet &points);

// Greedy maximal s-separated subset of a dyadic surface sample. The seed
// picks a dyadic offset of the sample grid. Supported: paraboloid (any n),
// sphere (n >= 2, via two stereographic charts, so points stay rational).
PointSet separated_net(Surface surface, int n, double s, std::uint64_t seed);

double euclidean_distance(const FreqPoint &a, const FreqPoint &b);
double min_pairwise_distance(const PointSet &points);

// Line format: header "n <n> surface <tag>", then one point per line with
// space-separated exact rationals "p/q".
void write_points(std::ostream &os, const PointSet &points, Surface surface);
struct PointFile {
  int n = 0;
  Surface surface = Surface::paraboloid;
  PointSet points;
};
PointFile read_points(std::istream &is);

} // namespace declab::lattice
