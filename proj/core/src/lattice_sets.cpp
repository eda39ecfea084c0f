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

#include "declab/lattice_sets.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>

#include <gmpxx.h>

#include "declab/errors.hpp"
#include "int_math.hpp"

namespace declab::lattice {

using detail::ceil_sqrt;
using detail::isqrt;

std::string_view surface_tag(Surface s) {
  switch (s) {
  case Surface::paraboloid:
    return "paraboloid";
  case Surface::sphere:
    return "sphere";
  case Surface::cone:
    return "cone";
  case Surface::annulus:
    return "annulus";
  }
  return "unknown";
}

Surface parse_surface(std::string_view tag) {
  if (tag == "paraboloid")
    return Surface::paraboloid;
  if (tag == "sphere")
    return Surface::sphere;
  if (tag == "cone")
    return Surface::cone;
  if (tag == "annulus")
    return Surface::annulus;
  throw PreconditionError("unknown surface tag '" + std::string(tag) + "'");
}

PointSet paraboloid_lattice(int n, std::int64_t N) {
  if (n < 2)
    throw PreconditionError("paraboloid_lattice needs n >= 2");
  if (N < 1)
    throw PreconditionError("paraboloid_lattice needs N >= 1");
  const int m = n - 1;
  std::vector<std::int64_t> idx(m, -N);
  PointSet out;
  double expected = std::pow(2.0 * N + 1.0, m);
  if (expected > 5e7)
    throw BudgetExceeded("paraboloid lattice too large", expected * 8.0 * n);
  out.reserve(static_cast<std::size_t>(expected));
  while (true) {
    FreqPoint p;
    p.coords.reserve(n);
    std::int64_t sq = 0;
    for (auto v : idx) {
      p.coords.emplace_back(v);
      sq += v * v;
    }
    p.coords.emplace_back(sq);
    out.push_back(std::move(p));
    int d = m - 1;
    while (d >= 0 && idx[d] == N) {
      idx[d] = -N;
      --d;
    }
    if (d < 0)
      break;
    ++idx[d];
  }
  return out;
}

PointSet sphere_lattice(int n, std::int64_t lambda) {
  if (n < 3)
    throw PreconditionError("sphere_lattice needs n >= 3");
  if (lambda < 1)
    throw PreconditionError("sphere_lattice needs lambda >= 1");
  PointSet out;
  std::vector<std::int64_t> cur(n, 0);
  // Depth-first search with the remaining squared budget.
  auto rec = [&](auto &&self, int depth, std::int64_t remaining) -> void {
    if (depth == n - 1) {
      std::int64_t r = isqrt(remaining);
      if (r * r != remaining)
        return;
      for (std::int64_t v : {-r, r}) {
        cur[depth] = v;
        out.push_back(FreqPoint::from_ints(cur));
        if (r == 0)
          break;
      }
      return;
    }
    std::int64_t b = isqrt(remaining);
    for (std::int64_t v = -b; v <= b; ++v) {
      cur[depth] = v;
      self(self, depth + 1, remaining - v * v);
    }
  };
  rec(rec, 0, lambda);
  std::sort(out.begin(), out.end());
  return out;
}

AnnulusBounds annulus_bounds(double R) {
  if (!(R >= 2.0) || !std::isfinite(R))
    throw PreconditionError("annulus needs R >= 2");
  AnnulusBounds b;
  b.R = R;
  const mpq_class Rq(R);
  // t is the least double with t^3 R >= 1, i.e. the outward rounding of R^{-1/3}.
  double t = std::pow(R, -1.0 / 3.0);
  auto ok = [&](double tt) {
    mpq_class tq(tt);
    return tq * tq * tq * Rq >= 1;
  };
  while (!ok(t))
    t = std::nextafter(t, INFINITY);
  while (ok(std::nextafter(t, 0.0)))
    t = std::nextafter(t, 0.0);
  b.t = t;
  mpq_class lo = Rq * Rq;
  mpq_class hi = (Rq + mpq_class(t)) * (Rq + mpq_class(t));
  mpz_class lo_ceil, hi_floor;
  mpz_cdiv_q(lo_ceil.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
  mpz_fdiv_q(hi_floor.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
  if (!hi_floor.fits_slong_p())
    throw OverflowError("annulus bounds exceed 64 bits");
  b.lower_sq = lo_ceil.get_si();
  b.upper_sq = hi_floor.get_si();
  return b;
}

PointSet annulus_lattice(double R) {
  const AnnulusBounds b = annulus_bounds(R);
  PointSet out;
  const std::int64_t xmax = isqrt(b.upper_sq);
  for (std::int64_t x = -xmax; x <= xmax; ++x) {
    const std::int64_t x2 = x * x;
    const std::int64_t ymax = isqrt(b.upper_sq - x2);
    const std::int64_t ymin = ceil_sqrt(b.lower_sq - x2);
    if (ymin > ymax)
      continue;
    for (std::int64_t y = -ymax; y <= -ymin; ++y)
      out.push_back(FreqPoint::from_ints({x, y}));
    // The negative range already holds y = 0 when ymin == 0.
    for (std::int64_t y = std::max<std::int64_t>(ymin, 1); y <= ymax; ++y)
      out.push_back(FreqPoint::from_ints({x, y}));
  }
  return out;
}

PointSet cone_lattice(std::int64_t K) {
  if (K < 1)
    throw PreconditionError("cone_lattice needs K >= 1");
  PointSet out;
  for (std::int64_t c = K; c <= 2 * K; ++c) {
    const std::int64_t c2 = c * c;
    for (std::int64_t a = -c; a <= c; ++a) {
      const std::int64_t r = c2 - a * a;
      const std::int64_t b = isqrt(r);
      if (b * b != r)
        continue;
      out.push_back(FreqPoint::from_ints({a, b, c}));
      if (b != 0)
        out.push_back(FreqPoint::from_ints({a, -b, c}));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

PointSet rescale_paraboloid_lattice(const PointSet &points, std::int64_t N) {
  PointSet out;
  out.reserve(points.size());
  const Rational s1(1, 2 * N);
  const Rational s2(1, checked_mul64(4 * N, N));
  for (const auto &p : points) {
    FreqPoint q = p;
    for (int i = 0; i + 1 < p.n(); ++i)
      q.coords[i] *= s1;
    q.coords.back() *= s2;
    out.push_back(std::move(q));
  }
  return out;
}

Rational dyadic_sqrt(const Rational &delta) {
  if (delta.num() != 1 || delta.den() < 1)
    throw PreconditionError("scale must be of the form 4^{-j}, got " + delta.str());
  std::int64_t d = delta.den();
  std::int64_t root = 1;
  while (d > 1) {
    if (d % 4 != 0)
      throw PreconditionError("scale must be of the form 4^{-j}, got " + delta.str());
    d /= 4;
    root *= 2;
  }
  return Rational(1, root);
}

Rational Cap::sqrt_delta() const { return dyadic_sqrt(delta); }

bool Cap::contains(const FreqPoint &xi) const {
  if (xi.n() != n)
    return false;
  switch (surface) {
  case Surface::paraboloid: {
    const Rational h = half_width();
    Rational sq(0);
    for (int i = 0; i + 1 < n; ++i) {
      if ((xi[i] - center[i]).abs() > h)
        return false;
      sq += xi[i] * xi[i];
    }
    return (xi[n - 1] - sq).abs() <= Rational(2) * delta;
  }
  case Surface::sphere: {
    Rational dist(0), norm(0);
    for (int i = 0; i < n; ++i) {
      Rational d = xi[i] - center[i];
      dist += d * d;
      norm += xi[i] * xi[i];
    }
    return dist <= delta && (norm - Rational(1)).abs() <= Rational(2) * delta;
  }
  case Surface::cone:
  case Surface::annulus:
    break;
  }
  throw PreconditionError("cap membership is defined for paraboloid and sphere caps; "
                          "cone and annulus pieces use Sector");
}

std::vector<Cap> cap_partition(int n, const Rational &delta) {
  if (n < 2)
    throw PreconditionError("cap_partition needs n >= 2");
  if (!(delta > Rational(0)) || delta > Rational(1, 4))
    throw PreconditionError("cap_partition needs 0 < delta <= 1/4");
  const Rational root = dyadic_sqrt(delta);
  const Rational g = root / Rational(2);
  const std::int64_t imax = (Rational(1, 2) / g).floor();
  const int m = n - 1;
  std::vector<std::int64_t> idx(m, -imax);
  std::vector<Cap> caps;
  while (true) {
    Cap c;
    c.surface = Surface::paraboloid;
    c.delta = delta;
    c.n = n;
    Rational sq(0);
    for (auto v : idx) {
      Rational ci = g * Rational(v);
      c.center.coords.push_back(ci);
      sq += ci * ci;
    }
    c.center.coords.push_back(sq);
    caps.push_back(std::move(c));
    int d = m - 1;
    while (d >= 0 && idx[d] == imax) {
      idx[d] = -imax;
      --d;
    }
    if (d < 0)
      break;
    ++idx[d];
  }
  return caps;
}

namespace {

struct VecHash {
  std::size_t operator()(const std::vector<std::int64_t> &v) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto x : v) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// True when every cap is a paraboloid cap of one scale centred on the grid,
// which lets us look candidates up instead of scanning all caps.
bool uniform_grid(const std::vector<Cap> &caps) {
  if (caps.empty())
    return false;
  for (const auto &c : caps) {
    if (c.surface != Surface::paraboloid || c.delta != caps.front().delta || c.n != caps.front().n)
      return false;
    const Rational g = c.half_width();
    for (int i = 0; i + 1 < c.n; ++i)
      if (!(c.center[i] / g).is_integer())
        return false;
  }
  return true;
}

} // namespace

CapAssignment assign_to_caps(const PointSet &points, const std::vector<Cap> &caps) {
  CapAssignment out;
  out.fibers.assign(caps.size(), {});
  if (caps.empty()) {
    for (std::size_t i = 0; i < points.size(); ++i)
      out.uncovered.push_back(i);
    return out;
  }
  auto better = [&](std::size_t a, std::size_t b) { return caps[a].center < caps[b].center; };

  if (uniform_grid(caps)) {
    const Rational g = caps.front().half_width();
    const int m = caps.front().n - 1;
    std::unordered_map<std::vector<std::int64_t>, std::size_t, VecHash> index;
    for (std::size_t c = 0; c < caps.size(); ++c) {
      std::vector<std::int64_t> key(m);
      for (int i = 0; i < m; ++i)
        key[i] = (caps[c].center[i] / g).num();
      index.emplace(std::move(key), c);
    }
    for (std::size_t p = 0; p < points.size(); ++p) {
      const auto &xi = points[p];
      if (xi.n() != m + 1) {
        out.uncovered.push_back(p);
        continue;
      }
      std::vector<std::int64_t> lo(m), hi(m);
      for (int i = 0; i < m; ++i) {
        lo[i] = ((xi[i] - g) / g).ceil();
        hi[i] = ((xi[i] + g) / g).floor();
      }
      std::vector<std::int64_t> key = lo;
      std::optional<std::size_t> best;
      bool empty_range = false;
      for (int i = 0; i < m; ++i)
        if (lo[i] > hi[i])
          empty_range = true;
      while (!empty_range) {
        auto it = index.find(key);
        if (it != index.end() && caps[it->second].contains(xi))
          if (!best || better(it->second, *best))
            best = it->second;
        int d = m - 1;
        while (d >= 0 && key[d] == hi[d]) {
          key[d] = lo[d];
          --d;
        }
        if (d < 0)
          break;
        ++key[d];
      }
      if (best)
        out.fibers[*best].push_back(p);
      else
        out.uncovered.push_back(p);
    }
    return out;
  }

  for (std::size_t p = 0; p < points.size(); ++p) {
    std::optional<std::size_t> best;
    for (std::size_t c = 0; c < caps.size(); ++c)
      if (caps[c].contains(points[p]) && (!best || better(c, *best)))
        best = c;
    if (best)
      out.fibers[*best].push_back(p);
    else
      out.uncovered.push_back(p);
  }
  return out;
}

std::size_t annulus_sector_count(double R) {
  if (!(R >= 2.0))
    throw PreconditionError("annulus needs R >= 2");
  return static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi * std::cbrt(R * R)));
}

std::size_t angular_sector_index(double x, double y, std::size_t count) {
  double a = std::atan2(y, x);
  if (a < 0)
    a += 2.0 * std::numbers::pi;
  auto idx = static_cast<std::size_t>(std::floor(a * static_cast<double>(count) / (2.0 * std::numbers::pi)));
  return std::min(idx, count - 1);
}

std::vector<SectorFiber> annulus_sectors(double R) {
  const AnnulusBounds b = annulus_bounds(R);
  const std::size_t count = annulus_sector_count(R);
  std::vector<SectorFiber> out(count);
  const double width = 2.0 * std::numbers::pi / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i].sector.index = i;
    out[i].sector.r_lo = R;
    out[i].sector.r_hi = R + b.t;
    out[i].sector.angle_lo = width * static_cast<double>(i);
    out[i].sector.angle_hi = width * static_cast<double>(i + 1);
  }
  for (auto &p : annulus_lattice(R)) {
    std::size_t s = angular_sector_index(p[0].to_double(), p[1].to_double(), count);
    out[s].points.push_back(std::move(p));
  }
  return out;
}

Collinearity collinearity_check(const PointSet &points) {
  if (points.empty())
    throw PreconditionError("collinearity_check needs at least one point");
  for (const auto &p : points)
    if (p.n() != 2)
      throw PreconditionError("collinearity_check works in the plane");
  Collinearity out;
  if (points.size() == 1)
    return out;
  const FreqPoint &p0 = points.front();
  const FreqPoint v = points[1] - p0;
  for (std::size_t i = 2; i < points.size(); ++i) {
    const FreqPoint w = points[i] - p0;
    if (v[0] * w[1] - v[1] * w[0] != Rational(0)) {
      out.collinear = false;
      out.equidistant = false;
      return out;
    }
  }
  std::vector<std::pair<Rational, std::size_t>> proj;
  proj.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const FreqPoint w = points[i] - p0;
    proj.emplace_back(w[0] * v[0] + w[1] * v[1], i);
  }
  std::sort(proj.begin(), proj.end());
  std::optional<Rational> gap;
  for (std::size_t i = 0; i + 1 < proj.size(); ++i) {
    const FreqPoint d = points[proj[i + 1].second] - points[proj[i].second];
    Rational g2 = d[0] * d[0] + d[1] * d[1];
    if (!gap)
      gap = g2;
    else if (*gap != g2)
      out.equidistant = false;
  }
  if (out.equidistant) {
    out.spacing_sq = gap;
    out.spacing = std::sqrt(gap->to_double());
  }
  return out;
}

double euclidean_distance(const FreqPoint &a, const FreqPoint &b) {
  long double s = 0;
  for (int i = 0; i < a.n(); ++i) {
    long double d = a[i].to_long_double() - b[i].to_long_double();
    s += d * d;
  }
  return static_cast<double>(std::sqrt(s));
}

double min_pairwise_distance(const PointSet &points) {
  double best = INFINITY;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      best = std::min(best, euclidean_distance(points[i], points[j]));
  return best;
}

namespace {

// Dyadic sample grid: step 2^{-j} <= s/4, shifted by a seeded dyadic offset.
struct SampleGrid {
  Rational step;
  std::vector<Rational> offset;
};

SampleGrid make_grid(int dims, double s, std::uint64_t seed) {
  int j = 0;
  while (std::ldexp(1.0, -j) > s / 4.0)
    ++j;
  if (j > 20)
    throw BudgetExceeded("separation too small for the sample grid", std::ldexp(1.0, 20 * dims));
  SampleGrid g;
  g.step = Rational(1, std::int64_t{1} << j);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < dims; ++i) {
    auto r = static_cast<std::int64_t>(rng() % 256);
    g.offset.push_back(g.step * Rational(r, 256));
  }
  return g;
}

void for_each_grid_point(const SampleGrid &g, int dims, const Rational &lo, const Rational &hi,
                         const std::function<void(const std::vector<Rational> &)> &fn) {
  std::vector<std::int64_t> kmin(dims), kmax(dims);
  for (int i = 0; i < dims; ++i) {
    kmin[i] = ((lo - g.offset[i]) / g.step).ceil();
    kmax[i] = ((hi - g.offset[i]) / g.step).floor();
  }
  std::vector<std::int64_t> k = kmin;
  std::vector<Rational> t(dims);
  while (true) {
    for (int i = 0; i < dims; ++i)
      t[i] = g.offset[i] + g.step * Rational(k[i]);
    fn(t);
    int d = dims - 1;
    while (d >= 0 && k[d] == kmax[d]) {
      k[d] = kmin[d];
      --d;
    }
    if (d < 0)
      break;
    ++k[d];
  }
}

PointSet greedy_net(PointSet samples, double s) {
  std::sort(samples.begin(), samples.end());
  samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
  if (samples.empty())
    return samples;
  const int n = samples.front().n();
  // Spatial hash with cell side s keeps the greedy pass near linear.
  std::unordered_map<std::vector<std::int64_t>, std::vector<std::size_t>, VecHash> cells;
  PointSet net;
  std::vector<std::vector<double>> netd;
  for (const auto &p : samples) {
    std::vector<double> pd = p.to_doubles();
    std::vector<std::int64_t> cell(n);
    for (int i = 0; i < n; ++i)
      cell[i] = static_cast<std::int64_t>(std::floor(pd[i] / s));
    bool ok = true;
    std::vector<std::int64_t> probe(n);
    const std::int64_t total = static_cast<std::int64_t>(std::pow(3, n));
    for (std::int64_t code = 0; code < total && ok; ++code) {
      std::int64_t c = code;
      for (int i = 0; i < n; ++i) {
        probe[i] = cell[i] + (c % 3) - 1;
        c /= 3;
      }
      auto it = cells.find(probe);
      if (it == cells.end())
        continue;
      for (auto q : it->second) {
        long double d2 = 0;
        for (int i = 0; i < n; ++i) {
          long double d = static_cast<long double>(pd[i]) - netd[q][i];
          d2 += d * d;
        }
        if (std::sqrt(d2) < s) {
          ok = false;
          break;
        }
      }
    }
    if (!ok)
      continue;
    cells[cell].push_back(net.size());
    net.push_back(p);
    netd.push_back(std::move(pd));
  }
  return net;
}

} // namespace

PointSet separated_net(Surface surface, int n, double s, std::uint64_t seed) {
  if (!(s > 0 && s < 1))
    throw PreconditionError("separated_net needs 0 < s < 1");
  if (n < 2)
    throw PreconditionError("separated_net needs n >= 2");
  PointSet samples;
  const int dims = n - 1;
  const SampleGrid g = make_grid(dims, s, seed);
  if (surface == Surface::paraboloid) {
    for_each_grid_point(g, dims, Rational(-1, 2), Rational(1, 2), [&](const std::vector<Rational> &t) {
      FreqPoint p;
      Rational sq(0);
      for (const auto &v : t) {
        p.coords.push_back(v);
        sq += v * v;
      }
      p.coords.push_back(sq);
      samples.push_back(std::move(p));
    });
  } else if (surface == Surface::sphere) {
    // Inverse stereographic projection of rational u with |u| <= 1 covers the
    // lower hemisphere exactly; mirroring the last coordinate gives the upper one.
    for_each_grid_point(g, dims, Rational(-1), Rational(1), [&](const std::vector<Rational> &u) {
      Rational u2(0);
      for (const auto &v : u)
        u2 += v * v;
      if (u2 > Rational(1))
        return;
      const Rational den = u2 + Rational(1);
      FreqPoint p;
      for (const auto &v : u)
        p.coords.push_back(Rational(2) * v / den);
      p.coords.push_back((u2 - Rational(1)) / den);
      FreqPoint q = p;
      q.coords.back() = -q.coords.back();
      samples.push_back(std::move(p));
      samples.push_back(std::move(q));
    });
  } else {
    throw PreconditionError("separated_net supports paraboloid and sphere samples");
  }
  return greedy_net(std::move(samples), s);
}

void write_points(std::ostream &os, const PointSet &points, Surface surface) {
  const int n = points.empty() ? 0 : points.front().n();
  os << "n " << n << " surface " << surface_tag(surface) << '\n';
  for (const auto &p : points) {
    for (int i = 0; i < p.n(); ++i)
      os << (i ? " " : "") << p[i].str();
    os << '\n';
  }
}

PointFile read_points(std::istream &is) {
  PointFile f;
  std::string line;
  if (!std::getline(is, line))
    throw PreconditionError("point file: missing header");
  {
    std::istringstream hs(line);
    std::string kn, ks, tag;
    if (!(hs >> kn >> f.n >> ks >> tag) || kn != "n" || ks != "surface")
      throw PreconditionError("point file: malformed header '" + line + "'");
    f.surface = parse_surface(tag);
  }
  while (std::getline(is, line)) {
    if (line.empty() || line.front() == '#')
      continue;
    std::istringstream ls(line);
    std::string tok;
    FreqPoint p;
    while (ls >> tok)
      p.coords.push_back(Rational::parse(tok));
    if (p.n() != f.n)
      throw PreconditionError("point file: wrong dimension on line '" + line + "'");
    f.points.push_back(std::move(p));
  }
  return f;
}

} // namespace declab::lattice
