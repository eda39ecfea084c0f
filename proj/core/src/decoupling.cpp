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

#include "declab/decoupling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "compensated.hpp"
#include "declab/errors.hpp"

namespace declab::decouple {

using expsum::Box;
using expsum::cplx;
using expsum::TrigPoly;
using lattice::Cap;

std::string_view route_name(Route r) { return r == Route::periodic ? "periodic" : "quadrature"; }

double paraboloid_exponent(int n, double p) {
  if (n < 2)
    throw PreconditionError("paraboloid exponent needs n >= 2");
  return std::max(0.0, (n - 1) / 4.0 - (n + 1) / (2.0 * p));
}

double cone_exponent(int n, double p) {
  if (n < 3)
    throw PreconditionError("cone exponent needs n >= 3");
  return std::max(0.0, (n - 2) / 4.0 - n / (2.0 * p));
}

TrigPoly cap_restrict(const TrigPoly &f, const Cap &cap) {
  TrigPoly out(f.n());
  for (const auto &t : f.terms())
    if (cap.contains(t.xi))
      out.add(t.xi, t.a);
  return out;
}

CapSplit split_by_caps(const TrigPoly &f, const std::vector<Cap> &caps) {
  PointSet pts;
  pts.reserve(f.size());
  for (const auto &t : f.terms())
    pts.push_back(t.xi);
  const lattice::CapAssignment a = lattice::assign_to_caps(pts, caps);
  CapSplit s;
  s.pieces.assign(caps.size(), TrigPoly(f.n()));
  for (std::size_t c = 0; c < caps.size(); ++c)
    for (auto i : a.fibers[c])
      s.pieces[c].add(f.terms()[i].xi, f.terms()[i].a);
  s.outside = TrigPoly(f.n());
  for (auto i : a.uncovered)
    s.outside.add(f.terms()[i].xi, f.terms()[i].a);
  return s;
}

namespace {

bool even_integer(double p) { return p == std::floor(p) && std::fmod(p, 2.0) == 0.0; }

// Per-axis lcm of frequency denominators, when it stays moderate.
bool frequency_periods(const TrigPoly &f, std::vector<std::int64_t> &D) {
  D.assign(f.n(), 1);
  for (const auto &t : f.terms())
    for (int i = 0; i < f.n(); ++i) {
      const std::int64_t d = t.xi[i].den();
      const i128 l = static_cast<i128>(D[i] / std::gcd(D[i], d)) * d;
      if (l > (i128{1} << 40))
        return false;
      D[i] = static_cast<std::int64_t>(l);
    }
  return true;
}

bool box_is_periodic(const Box &box, const std::vector<std::int64_t> &D) {
  for (std::size_t i = 0; i < D.size(); ++i) {
    const double r = box.side[i] / static_cast<double>(D[i]);
    const double rr = std::nearbyint(r);
    if (rr < 1 || std::fabs(r - rr) > 1e-9 * r)
      return false;
  }
  return true;
}

TrigPoly scale_to_integers(const TrigPoly &f, const std::vector<std::int64_t> &D) {
  TrigPoly g(f.n());
  for (const auto &t : f.terms()) {
    FreqPoint k = t.xi;
    for (int i = 0; i < f.n(); ++i)
      k[i] = k[i] * Rational(D[i]);
    g.add(std::move(k), t.a);
  }
  return g;
}

bool real_integer_coefficients(const TrigPoly &f) {
  for (const auto &t : f.terms())
    if (t.a.imag() != 0 || t.a.real() != std::floor(t.a.real()) || std::fabs(t.a.real()) > 1e9)
      return false;
  return true;
}

double grid_points_for(const TrigPoly &g, double p) {
  double G = 1;
  for (int i = 0; i < g.n(); ++i) {
    std::int64_t lo = INT64_MAX, hi = INT64_MIN;
    for (const auto &t : g.terms()) {
      lo = std::min(lo, t.xi[i].num());
      hi = std::max(hi, t.xi[i].num());
    }
    G *= std::ceil(p) * static_cast<double>(hi - lo) + 1;
  }
  return G;
}

} // namespace

// Mean of |g|^p over the unit torus, g with integer frequencies, p even.
// Sixth moments of integer-weighted sums go through the exact column
// sweep; everything else through the FFT grid.
long double periodic_mean(const TrigPoly &g, double p) {
  if (g.empty())
    return 0;
  if (g.size() == 1)
    return std::pow(static_cast<long double>(std::abs(g.terms()[0].a)), p);
  if (p == 6 && real_integer_coefficients(g)) {
    const double m = static_cast<double>(g.size());
    if (m * m * m <= 4e10 || grid_points_for(g, p) > 6e7) {
      PointSet pts;
      std::vector<std::int64_t> w;
      for (const auto &t : g.terms()) {
        pts.push_back(t.xi);
        w.push_back(static_cast<std::int64_t>(t.a.real()));
      }
      return expsum::moment6_sweep(to_int_points(pts), w).convert_to<long double>();
    }
  }
  // Plancherel on the torus, used once the FFT grid stops fitting.
  if (p == 2 && grid_points_for(g, p) > 6e7) {
    detail::NeumaierSum s;
    for (const auto &t : g.terms())
      s.add(std::norm(t.a));
    return s.value();
  }
  return expsum::torus_mean_power(g, p);
}

DecouplingReport ratio_for_pieces(const TrigPoly &f, const std::vector<TrigPoly> &pieces, double p, const Box &box,
                                  double h) {
  if (!(p >= 2))
    throw PreconditionError("decoupling needs p >= 2");
  if (box.n() != f.n())
    throw PreconditionError("box dimension differs from the polynomial's");
  DecouplingReport r;
  r.n = f.n();
  r.p = p;
  r.h = h;
  std::vector<std::int64_t> D;
  bool periodic = even_integer(p) && frequency_periods(f, D);
  for (const auto &piece : pieces) {
    std::vector<std::int64_t> Dp;
    if (!periodic || !frequency_periods(piece, Dp))
      periodic = false;
    else
      for (int i = 0; i < f.n(); ++i)
        D[i] = std::lcm(D[i], Dp[i]);
  }
  periodic = periodic && box_is_periodic(box, D);
  detail::NeumaierSum rhs2;
  if (periodic) {
    r.route = Route::periodic;
    r.lhs = static_cast<double>(std::pow(periodic_mean(scale_to_integers(f, D), p), 1.0L / p));
    for (const auto &piece : pieces) {
      if (piece.empty())
        continue;
      ++r.caps_used;
      rhs2.add(static_cast<double>(std::pow(periodic_mean(scale_to_integers(piece, D), p), 2.0L / p)));
    }
  } else {
    r.route = Route::quadrature;
    r.lhs = expsum::lp_norm_box(f, p, box, h) * std::pow(box.volume(), 1.0 / p);
    const expsum::Weight w = expsum::Weight::for_box(box);
    for (const auto &piece : pieces) {
      if (piece.empty())
        continue;
      ++r.caps_used;
      rhs2.add(std::pow(expsum::weighted_lp_norm(piece, p, w, h), 2.0));
    }
  }
  r.rhs = std::sqrt(rhs2.value());
  r.ratio = r.rhs > 0 ? r.lhs / r.rhs : 0.0;
  return r;
}

DecouplingReport decoupling_ratio(const TrigPoly &f, double p, const Rational &delta, const Box &box, double h) {
  const auto caps = lattice::cap_partition(f.n(), delta);
  CapSplit s = split_by_caps(f, caps);
  if (!s.outside.empty())
    throw PreconditionError("frequency " + s.outside.terms()[0].xi.str() + " lies in no cap of the partition");
  DecouplingReport r = ratio_for_pieces(f, s.pieces, p, box, h);
  r.delta = delta.to_double();
  r.theo_exponent = paraboloid_exponent(f.n(), p);
  return r;
}

RestrictionReport discrete_restriction_ratio(const PointSet &points, const std::vector<cplx> &coeffs, double p,
                                             double delta, double R, double h) {
  if (points.empty())
    throw PreconditionError("discrete_restriction_ratio needs a nonempty set");
  if (!(delta > 0 && delta < 1))
    throw PreconditionError("delta must lie in (0, 1)");
  if (R < 1.0 / delta * (1 - 1e-12))
    throw PreconditionError("discrete restriction needs R >= 1/delta");
  const double sep = std::sqrt(delta);
  if (points.size() > 1 && lattice::min_pairwise_distance(points) < sep * (1 - 1e-12))
    throw PreconditionError("point set is not delta^{1/2}-separated");
  const TrigPoly f = TrigPoly::with_coefficients(points, coeffs);
  RestrictionReport r;
  r.n = f.n();
  r.p = p;
  r.delta = delta;
  r.R = R;
  r.lhs = expsum::lp_norm_box(f, p, Box::cube(f.n(), R, 0.0), h);
  r.l2 = f.l2_norm();
  r.ratio = r.lhs / r.l2;
  const int n = r.n;
  r.subcritical = p <= 2.0 * (n + 1) / (n - 1);
  r.reference = std::max(1.0, std::pow(delta, (n + 1) / (2.0 * p) - (n - 1) / 4.0));
  r.scaled = r.ratio / r.reference;
  return r;
}

namespace {

std::vector<Eigen::VectorXd> normal_samples(const Cap &cap, NormalSample sample) {
  if (cap.surface != lattice::Surface::paraboloid)
    throw PreconditionError("transversality is defined for paraboloid caps");
  const int d = cap.n - 1;
  std::vector<std::vector<double>> pts;
  std::vector<double> c(d);
  for (int i = 0; i < d; ++i)
    c[i] = cap.center[i].to_double();
  pts.push_back(c);
  if (sample == NormalSample::corners_and_center) {
    const double g = cap.half_width().to_double();
    for (int mask = 0; mask < (1 << d); ++mask) {
      std::vector<double> q = c;
      for (int i = 0; i < d; ++i)
        q[i] += (mask >> i & 1) ? g : -g;
      pts.push_back(q);
    }
  }
  std::vector<Eigen::VectorXd> out;
  for (const auto &q : pts) {
    Eigen::VectorXd v(cap.n);
    for (int i = 0; i < d; ++i)
      v[i] = -2 * q[i];
    v[d] = 1;
    out.push_back(v.normalized());
  }
  return out;
}

} // namespace

double transversality(const std::vector<Cap> &caps, NormalSample sample) {
  if (caps.empty())
    throw PreconditionError("transversality needs caps");
  const int n = caps.front().n;
  if (static_cast<int>(caps.size()) < n)
    throw PreconditionError("transversality needs n caps");
  std::vector<std::vector<Eigen::VectorXd>> s;
  for (int i = 0; i < n; ++i)
    s.push_back(normal_samples(caps[i], sample));
  std::vector<std::size_t> idx(n, 0);
  double best = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd M(n, n);
  while (true) {
    for (int i = 0; i < n; ++i)
      M.col(i) = s[i][idx[i]];
    best = std::min(best, std::fabs(M.determinant()));
    int i = n - 1;
    while (i >= 0 && idx[i] + 1 == s[i].size())
      idx[i--] = 0;
    if (i < 0)
      break;
    ++idx[i];
  }
  return best;
}

MultilinearReport multilinear_ratio(const std::vector<TrigPoly> &g, const std::vector<Cap> &caps, double p,
                                    const Rational &delta, const Box &box, double h, double nu_min) {
  if (g.empty() || g.size() != caps.size())
    throw PreconditionError("multilinear_ratio needs one function per cap");
  const int n = g.front().n();
  if (static_cast<int>(g.size()) != n)
    throw PreconditionError("multilinear_ratio needs exactly n functions");
  for (std::size_t i = 0; i < g.size(); ++i)
    for (const auto &t : g[i].terms())
      if (!caps[i].contains(t.xi))
        throw PreconditionError("frequency " + t.xi.str() + " outside its transverse cap");
  MultilinearReport r;
  r.nu = transversality(caps);
  if (r.nu < nu_min)
    throw PreconditionError("caps fail the transversality bound");
  const auto part = lattice::cap_partition(n, delta);
  const double inv_n = 1.0 / n;

  // Common period of all g_i.
  TrigPoly all(n);
  for (const auto &gi : g)
    for (const auto &t : gi.terms())
      if (!std::any_of(all.terms().begin(), all.terms().end(), [&](const auto &u) { return u.xi == t.xi; }))
        all.add(t.xi, t.a);
  std::vector<std::int64_t> D;
  const bool periodic = even_integer(p) && frequency_periods(all, D) && box_is_periodic(box, D);

  std::vector<std::vector<double>> mods; // |g_i| on the grid
  std::vector<double> wq;                // quadrature weights (sum 1 on periodic grids)
  std::vector<double> rhs(n);
  if (periodic) {
    r.route = Route::periodic;
    std::vector<TrigPoly> gi_int;
    for (const auto &gi : g)
      gi_int.push_back(scale_to_integers(gi, D));
    std::vector<std::size_t> M(n, 1);
    for (int a = 0; a < n; ++a) {
      std::int64_t lo = INT64_MAX, hi = INT64_MIN;
      for (const auto &gi : gi_int)
        for (const auto &t : gi.terms()) {
          lo = std::min(lo, t.xi[a].num());
          hi = std::max(hi, t.xi[a].num());
        }
      const auto need = static_cast<std::size_t>(2 * std::ceil(p) * static_cast<double>(hi - lo) + 1);
      const auto by_h = static_cast<std::size_t>(std::ceil(static_cast<double>(D[a]) / h - 1e-9));
      M[a] = expsum::fft_friendly_size(std::max(need, by_h));
    }
    for (const auto &gi : gi_int) {
      const auto vals = expsum::periodic_samples(gi, M);
      std::vector<double> m(vals.size());
      for (std::size_t j = 0; j < vals.size(); ++j)
        m[j] = std::abs(vals[j]);
      mods.push_back(std::move(m));
    }
    wq.assign(mods.front().size(), 1.0 / static_cast<double>(mods.front().size()));
    for (int i = 0; i < n; ++i) {
      detail::NeumaierSum s;
      for (const auto &piece : split_by_caps(g[i], part).pieces)
        if (!piece.empty())
          s.add(static_cast<double>(std::pow(periodic_mean(scale_to_integers(piece, D), p), 2.0L / p)));
      rhs[i] = std::sqrt(s.value());
    }
  } else {
    r.route = Route::quadrature;
    for (const auto &gi : g) {
      const expsum::Grid grid = expsum::evaluate_grid(gi, box, h, expsum::GridPath::direct);
      std::vector<double> m(grid.values.size());
      for (std::size_t j = 0; j < m.size(); ++j)
        m[j] = std::abs(grid.values[j]);
      if (wq.empty()) {
        wq.assign(m.size(), 0);
        // Tensor trapezoid weights times the cell volume.
        for (std::size_t j = 0; j < wq.size(); ++j) {
          double w = 1;
          std::size_t rem = j;
          for (int a = n - 1; a >= 0; --a) {
            const std::size_t k = rem % grid.shape[a];
            rem /= grid.shape[a];
            w *= ((k == 0 || k + 1 == grid.shape[a]) ? 0.5 : 1.0) * grid.step[a];
          }
          wq[j] = w;
        }
      }
      mods.push_back(std::move(m));
    }
    const expsum::Weight w = expsum::Weight::for_box(box);
    for (int i = 0; i < n; ++i) {
      detail::NeumaierSum s;
      for (const auto &piece : split_by_caps(g[i], part).pieces)
        if (!piece.empty())
          s.add(std::pow(expsum::weighted_lp_norm(piece, p, w, h), 2.0));
      rhs[i] = std::sqrt(s.value());
    }
  }
  detail::NeumaierSum lhs;
  std::vector<detail::NeumaierSum> lin(n);
  for (std::size_t j = 0; j < wq.size(); ++j) {
    double prod = 1;
    for (int i = 0; i < n; ++i) {
      prod *= mods[i][j];
      lin[i].add(wq[j] * std::pow(mods[i][j], p));
    }
    lhs.add(wq[j] * std::pow(prod, p * inv_n));
  }
  r.lhs = std::pow(lhs.value(), 1.0 / p);
  r.rhs = 1;
  r.linear_geomean = 1;
  for (int i = 0; i < n; ++i) {
    r.rhs *= std::pow(rhs[i], inv_n);
    r.linear_geomean *= std::pow(std::pow(lin[i].value(), 1.0 / p) / rhs[i], inv_n);
  }
  r.ratio = r.lhs / r.rhs;
  return r;
}

TrigPoly parabolic_rescale(const TrigPoly &f, const Cap &tau) {
  if (tau.surface != lattice::Surface::paraboloid)
    throw PreconditionError("parabolic rescaling needs a paraboloid cap");
  const int n = f.n();
  if (tau.n != n)
    throw PreconditionError("cap dimension differs from the polynomial's");
  const Rational sigma = tau.delta;
  const Rational root = tau.sqrt_delta();
  TrigPoly out(n);
  for (const auto &t : f.terms()) {
    if (!tau.contains(t.xi))
      throw PreconditionError("frequency " + t.xi.str() + " is outside the cap");
    FreqPoint x = t.xi;
    Rational last = t.xi[n - 1];
    for (int i = 0; i < n - 1; ++i) {
      const Rational &a = tau.center[i];
      last = last - Rational(2) * a * t.xi[i] + a * a;
      x[i] = (t.xi[i] - a) / root;
    }
    x[n - 1] = last / sigma;
    out.add(std::move(x), t.a);
  }
  return out;
}

Box lattice_box(int n, std::int64_t N) {
  Box b;
  b.center.assign(n, 0.0);
  b.side.assign(n, static_cast<double>(N) * static_cast<double>(N));
  b.side[n - 1] *= 4;
  return b;
}

std::int64_t sign_family_limit(double c_budget) {
  std::int64_t N = 1;
  while (12.0 * std::pow(4.0 * static_cast<double>(N), 3) <= c_budget)
    N *= 2;
  return N;
}

namespace {

std::int64_t lattice_N(const Rational &delta) {
  const Rational r = lattice::dyadic_sqrt(delta);
  if (r.num() != 1)
    throw PreconditionError("delta must be 4^{-j} with j >= 1");
  return r.den();
}

DecouplingReport finish(DecouplingReport r, const std::string &family, int n, double p, const Rational &delta,
                        std::uint64_t seed) {
  r.family = family;
  r.n = n;
  r.p = p;
  r.delta = delta.to_double();
  r.theo_exponent = paraboloid_exponent(n, p);
  r.seed = seed;
  return r;
}

} // namespace

WitnessResult lower_bound_witness(int n, double p, const Rational &delta, std::uint64_t seed, int draws,
                                  double c_budget) {
  const std::int64_t N = lattice_N(delta);
  const PointSet raw = lattice::paraboloid_lattice(n, N);
  const PointSet pts = lattice::rescale_paraboloid_lattice(raw, N);
  const auto caps = lattice::cap_partition(n, delta);
  const Box box = lattice_box(n, N);
  const double h = 1.0; // frequencies lie in [-1/2, 1/2]^{n-1} x [0, (n-1)/4]
  const bool parabola6 = n == 2 && p == 6;

  auto split_with = [&](const std::vector<cplx> &a) {
    const TrigPoly f = TrigPoly::with_coefficients(pts, a);
    CapSplit s = split_by_caps(f, caps);
    if (!s.outside.empty())
      throw CrosscheckFailure("rescaled lattice point outside every cap");
    return std::pair{f, std::move(s.pieces)};
  };
  // The full lattice sum: its lhs comes from the parabola kernel at n = 2,
  // p = 6, and from the generic periodic path otherwise.
  auto full_report = [&](const std::vector<cplx> &a, const std::vector<std::int64_t> *signs) {
    auto [f, pieces] = split_with(a);
    if (!parabola6)
      return ratio_for_pieces(f, pieces, p, box, h);
    TrigPoly empty(n);
    DecouplingReport r = ratio_for_pieces(empty, pieces, p, box, h);
    long double mean;
    if (signs == nullptr)
      mean = expsum::parabola_moment6(-N, N).convert_to<long double>();
    else
      mean = expsum::moment6_sweep(to_int_points(raw), *signs).convert_to<long double>();
    r.lhs = static_cast<double>(std::pow(mean, 1.0L / 6));
    r.ratio = r.lhs / r.rhs;
    r.route = Route::periodic;
    return r;
  };

  WitnessResult w;
  const std::vector<cplx> ones(pts.size(), cplx(1, 0));
  w.families.push_back(finish(full_report(ones, nullptr), "a", n, p, delta, seed));

  {
    // Central cap only.
    std::size_t centre = 0;
    for (std::size_t c = 0; c < caps.size(); ++c) {
      bool zero = true;
      for (int i = 0; i < n - 1; ++i)
        zero = zero && caps[c].center[i] == Rational(0);
      if (zero)
        centre = c;
    }
    auto [f, pieces] = split_with(ones);
    const TrigPoly &g = pieces[centre];
    w.families.push_back(finish(ratio_for_pieces(g, {g}, p, box, h), "b", n, p, delta, seed));
  }

  const bool run_c = !parabola6 || N <= sign_family_limit(c_budget);
  if (run_c && draws > 0) {
    std::mt19937_64 rng(seed);
    DecouplingReport best;
    best.ratio = -1;
    for (int d = 0; d < draws; ++d) {
      std::vector<std::int64_t> s(pts.size());
      std::vector<cplx> a(pts.size());
      for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = (rng() >> 63) ? 1 : -1;
        a[i] = cplx(static_cast<double>(s[i]), 0);
      }
      DecouplingReport r = full_report(a, &s);
      if (r.ratio > best.ratio)
        best = r;
    }
    w.families.push_back(finish(best, "c", n, p, delta, seed));
  } else {
    w.c_skipped = true;
  }
  for (std::size_t i = 1; i < w.families.size(); ++i)
    if (w.families[i].ratio > w.families[w.argmax].ratio)
      w.argmax = i;
  return w;
}

ConeReport cone_sector_ratio(const PointSet &cone_points, const std::vector<cplx> &coeffs, double p,
                             const Rational &delta) {
  const Rational root = lattice::dyadic_sqrt(delta);
  if (root.num() != 1)
    throw PreconditionError("delta must be 4^{-j} with j >= 1");
  const std::int64_t K = root.den();
  if (cone_points.size() != coeffs.size())
    throw PreconditionError("points and coefficients differ in length");
  ConeReport out;
  out.points = cone_points.size();
  out.sectors = static_cast<std::size_t>(std::ceil(2 * M_PI * static_cast<double>(K)));
  TrigPoly f(3);
  std::vector<TrigPoly> pieces(out.sectors, TrigPoly(3));
  for (std::size_t i = 0; i < cone_points.size(); ++i) {
    const FreqPoint &q = cone_points[i];
    if (q.n() != 3 || q[0] * q[0] + q[1] * q[1] != q[2] * q[2])
      throw PreconditionError("point " + q.str() + " is not on the cone");
    const Rational c = q[2] / Rational(K);
    if (c < Rational(1) || c > Rational(2))
      throw PreconditionError("point " + q.str() + " outside the slice 1 <= xi_3 <= 2");
    const FreqPoint xi({q[0] / Rational(K), q[1] / Rational(K), c});
    f.add(xi, coeffs[i]);
    const std::size_t s = lattice::angular_sector_index(q[0].to_double(), q[1].to_double(), out.sectors);
    pieces[s].add(xi, coeffs[i]);
  }
  const Box box = Box::cube(3, static_cast<double>(K) * static_cast<double>(K), 0.0);
  DecouplingReport r = ratio_for_pieces(f, pieces, p, box, 0.25);
  r.surface = lattice::Surface::cone;
  r.family = "unit";
  r.delta = delta.to_double();
  r.theo_exponent = cone_exponent(3, p);
  out.report = r;
  return out;
}

ConeReport cone_unit_ratio(double p, const Rational &delta) {
  const Rational root = lattice::dyadic_sqrt(delta);
  const PointSet pts = lattice::cone_lattice(root.den());
  return cone_sector_ratio(pts, std::vector<cplx>(pts.size(), cplx(1, 0)), p, delta);
}

} // namespace declab::decouple
