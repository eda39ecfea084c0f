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

#include "declab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>

#include "declab/errors.hpp"
#include "declab/exp_sums.hpp"
#include "sum_codec.hpp"

namespace declab::energy {

namespace {

// Exact integer copy of a rational point set, each axis multiplied by the
// lcm of its denominators. Sum relations are preserved.
IntPoints scaled_int_points(const PointSet &points) {
  if (points.empty())
    return {};
  const int n = points.front().n();
  std::vector<std::int64_t> den(n, 1);
  for (const auto &p : points) {
    if (p.n() != n)
      throw PreconditionError("points of mixed dimension");
    for (int i = 0; i < n; ++i) {
      const std::int64_t g = std::gcd(den[i], p[i].den());
      den[i] = checked_mul64(den[i] / g, p[i].den());
    }
  }
  IntPoints out;
  out.n = n;
  out.coords.reserve(points.size() * n);
  for (const auto &p : points)
    for (int i = 0; i < n; ++i)
      out.coords.push_back(checked_mul64(p[i].num(), den[i] / p[i].den()));
  return out;
}

void require_distinct(const PointSet &points) {
  std::vector<FreqPoint> s(points);
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end())
    throw PreconditionError("point set has repeated points");
}

BigInt square_sum(const std::vector<std::uint64_t> &counts) {
  u128 t = 0;
  for (auto c : counts)
    t = checked_add(t, static_cast<u128>(c) * c);
  return to_big(t);
}

} // namespace

BigInt additive_energy(const PointSet &points, int k, double sum_budget) {
  if (k < 2)
    throw PreconditionError("additive_energy needs k >= 2");
  if (points.empty())
    return 0;
  require_distinct(points);
  const IntPoints ip = scaled_int_points(points);
  const detail::SumCodec codec(ip, k);
  const double m = static_cast<double>(ip.size());
  const double sums = std::min(std::pow(m, k), static_cast<double>(codec.range()));
  if (sums > sum_budget)
    throw BudgetExceeded("additive_energy: too many k-fold sums", sums * 16.0);
  std::vector<std::uint64_t> codes(ip.size());
  for (std::size_t i = 0; i < ip.size(); ++i)
    codes[i] = codec.encode(ip[i]);

  const auto dense_limit = std::min<std::uint64_t>(std::uint64_t{1} << 24,
                                                  static_cast<std::uint64_t>(std::max(4194304.0, 4 * sums)));
  if (codec.range() <= dense_limit) {
    std::vector<std::uint64_t> cur(codec.range(), 0), next(codec.range(), 0);
    for (auto c : codes)
      cur[c] = 1;
    std::vector<std::uint64_t> support(codes);
    for (int step = 1; step < k; ++step) {
      std::vector<std::uint64_t> nsupport;
      for (auto c : support)
        for (auto d : codes) {
          const std::uint64_t e = c + d;
          if (next[e] == 0)
            nsupport.push_back(e);
          next[e] += cur[c];
        }
      for (auto c : support)
        cur[c] = 0;
      std::swap(cur, next);
      support = std::move(nsupport);
    }
    std::vector<std::uint64_t> counts;
    counts.reserve(support.size());
    for (auto c : support)
      counts.push_back(cur[c]);
    return square_sum(counts);
  }

  std::unordered_map<std::uint64_t, std::uint64_t> cur;
  cur.reserve(codes.size());
  for (auto c : codes)
    cur[c] = 1;
  for (int step = 1; step < k; ++step) {
    std::unordered_map<std::uint64_t, std::uint64_t> next;
    next.reserve(static_cast<std::size_t>(std::min(sums, static_cast<double>(cur.size()) * m)));
    for (const auto &[c, v] : cur)
      for (auto d : codes)
        next[c + d] += v;
    cur = std::move(next);
  }
  std::vector<std::uint64_t> counts;
  counts.reserve(cur.size());
  for (const auto &[c, v] : cur)
    counts.push_back(v);
  return square_sum(counts);
}

EnergyReport energy_report(const PointSet &points, int k, double sum_budget) {
  EnergyReport r;
  r.k = k;
  r.size = points.size();
  r.count = additive_energy(points, k, sum_budget);
  r.trivial_lower = boost::multiprecision::pow(BigInt(points.size()), static_cast<unsigned>(k));
  return r;
}

BigInt energy3(const PointSet &points) {
  if (points.empty())
    return 0;
  for (const auto &p : points)
    if (!p.is_integer())
      return additive_energy(points, 3);
  require_distinct(points);
  return expsum::moment6_sweep(to_int_points(points));
}

bool energy_torus_crosscheck(const PointSet &points, int k) {
  const BigInt a = additive_energy(points, k);
  const expsum::TorusMoment t = expsum::lp_norm_torus_even(expsum::TrigPoly::unit(points), 2 * k);
  if (!t.exact || t.value != a)
    throw CrosscheckFailure("additive energy " + a.str() + " differs from torus moment " + t.value.str() +
                            " (k = " + std::to_string(k) + ")");
  return true;
}

namespace {

void check_on_paraboloid(const FreqPoint &p) {
  if (p.n() != 3 || p[2] != p[0] * p[0] + p[1] * p[1])
    throw PreconditionError("point " + p.str() + " is not on P^2");
}

} // namespace

CircleStructure quadruple_circle_structure(const Quadruple &q) {
  for (const auto *p : {&q.p1, &q.p2, &q.p3, &q.p4})
    check_on_paraboloid(*p);
  if (q.p1 + q.p2 != q.p3 + q.p4)
    throw PreconditionError("not an additive quadruple: p1 + p2 != p3 + p4");
  const Rational A = q.p1[0] + q.p2[0];
  const Rational B = q.p1[1] + q.p2[1];
  const Rational C = q.p1[2] + q.p2[2];
  CircleStructure s;
  s.center_x = A / Rational(2);
  s.center_y = B / Rational(2);
  s.radius_sq = (Rational(2) * C - A * A - B * B) / Rational(4);
  s.on_circle = true;
  for (const auto *p : {&q.p1, &q.p2, &q.p3, &q.p4}) {
    const Rational dx = (*p)[0] - s.center_x, dy = (*p)[1] - s.center_y;
    if (dx * dx + dy * dy != s.radius_sq)
      s.on_circle = false;
  }
  auto antipodal = [&](const FreqPoint &a, const FreqPoint &b) {
    return (a[0] + b[0]) / Rational(2) == s.center_x && (a[1] + b[1]) / Rational(2) == s.center_y;
  };
  s.diametrically_opposite = antipodal(q.p1, q.p2) && antipodal(q.p3, q.p4);
  return s;
}

std::vector<Quadruple> harvest_quadruples(const PointSet &points, std::size_t limit) {
  std::vector<Quadruple> out;
  if (points.empty())
    return out;
  const IntPoints ip = scaled_int_points(points);
  const detail::SumCodec codec(ip, 2);
  const std::size_t m = ip.size();
  if (static_cast<double>(m) * m > 4e8)
    throw BudgetExceeded("harvest_quadruples: too many pairs", static_cast<double>(m) * m * 16.0);
  struct PairSum {
    std::uint64_t code;
    std::uint32_t i, j;
  };
  std::vector<PairSum> ps;
  ps.reserve(m * m);
  std::vector<std::uint64_t> codes(m);
  for (std::size_t i = 0; i < m; ++i)
    codes[i] = codec.encode(ip[i]);
  for (std::uint32_t i = 0; i < m; ++i)
    for (std::uint32_t j = 0; j < m; ++j)
      ps.push_back({codes[i] + codes[j], i, j});
  std::sort(ps.begin(), ps.end(), [](const PairSum &a, const PairSum &b) {
    return std::tie(a.code, a.i, a.j) < std::tie(b.code, b.i, b.j);
  });
  for (std::size_t b = 0; b < ps.size() && out.size() < limit;) {
    std::size_t e = b;
    while (e < ps.size() && ps[e].code == ps[b].code)
      ++e;
    for (std::size_t x = b; x < e && out.size() < limit; ++x)
      for (std::size_t y = b; y < e && out.size() < limit; ++y) {
        const auto &u = ps[x], &v = ps[y];
        if ((u.i == v.i && u.j == v.j) || (u.i == v.j && u.j == v.i))
          continue;
        out.push_back({points[u.i], points[u.j], points[v.i], points[v.j]});
      }
    b = e;
  }
  return out;
}

PointSet random_paraboloid_sample(std::size_t count, std::int64_t half_side, std::uint64_t seed) {
  const double cap = std::pow(2.0 * static_cast<double>(half_side) + 1, 2);
  if (static_cast<double>(count) > cap / 2)
    throw PreconditionError("random_paraboloid_sample: box too small for the requested count");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> u(-half_side, half_side);
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  PointSet out;
  out.reserve(count);
  while (out.size() < count) {
    const std::int64_t a = u(rng), b = u(rng);
    if (seen.emplace(a, b).second)
      out.push_back(FreqPoint::from_ints({a, b, a * a + b * b}));
  }
  std::sort(out.begin(), out.end());
  return out;
}

RightAngles right_angle_count(const PointSet &points, double budget) {
  const double m = static_cast<double>(points.size());
  if (m * m > budget)
    throw BudgetExceeded("right_angle_count: point set too large", m * 24.0);
  RightAngles r;
  if (points.empty())
    return r;
  if (points.front().n() != 2)
    throw PreconditionError("right_angle_count expects planar points");
  require_distinct(points);
  const IntPoints ip = scaled_int_points(points);
  struct DirHash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t> &d) const noexcept {
      return std::hash<std::int64_t>()(d.first * 0x9E3779B97F4A7C15ULL ^ d.second);
    }
  };
  u128 total = 0;
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::uint64_t, DirHash> dirs;
  for (std::size_t v = 0; v < ip.size(); ++v) {
    dirs.clear();
    for (std::size_t w = 0; w < ip.size(); ++w) {
      if (w == v)
        continue;
      std::int64_t dx = ip[w][0] - ip[v][0], dy = ip[w][1] - ip[v][1];
      const std::int64_t g = std::gcd(dx, dy);
      ++dirs[{dx / g, dy / g}];
    }
    u128 here = 0;
    for (const auto &[d, c] : dirs) {
      auto it = dirs.find({-d.second, d.first});
      if (it != dirs.end())
        here += static_cast<u128>(c) * it->second;
      it = dirs.find({d.second, -d.first});
      if (it != dirs.end())
        here += static_cast<u128>(c) * it->second;
    }
    total = checked_add(total, here);
  }
  r.ordered = to_big(total);
  r.unordered = r.ordered / 2;
  return r;
}

FitResult exponent_fit(const std::vector<std::pair<double, double>> &sweep) {
  if (sweep.size() < 4)
    throw PreconditionError("exponent_fit needs at least 4 sweep points");
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    if (!(sweep[i].first > 0) || !(sweep[i].second > 0))
      throw PreconditionError("exponent_fit needs positive sizes and counts");
    if (i > 0 && !(sweep[i].first > sweep[i - 1].first))
      throw PreconditionError("exponent_fit needs strictly increasing sizes");
  }
  const auto n = static_cast<double>(sweep.size());
  double sx = 0, sy = 0;
  for (const auto &[s, c] : sweep) {
    sx += std::log(s);
    sy += std::log(c);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto &[s, c] : sweep) {
    const double dx = std::log(s) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(c) - my);
  }
  FitResult f;
  f.points = sweep.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const double r = std::fabs(std::log(sweep[i].second) - (f.intercept + f.slope * std::log(sweep[i].first)));
    if (r > f.max_residual) {
      f.max_residual = r;
      f.max_residual_index = i;
    }
  }
  return f;
}

} // namespace declab::energy
