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

#include "declab/exp_sums.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <Eigen/Dense>
#include <fftw3.h>

#include "compensated.hpp"
#include "declab/errors.hpp"
#include "int_math.hpp"
#include "sum_codec.hpp"
#include "tensor_eval.hpp"

namespace declab::expsum {

using detail::ComplexNeumaier;
using detail::NeumaierSum;
using detail::unit_phase;

TrigPoly::TrigPoly(int n, std::vector<Term> terms) : n_(n) {
  for (auto &t : terms)
    add(std::move(t.xi), t.a);
}

TrigPoly TrigPoly::unit(const PointSet &points) {
  TrigPoly f(points.empty() ? 0 : points.front().n());
  for (const auto &p : points)
    f.add(p, cplx(1.0, 0.0));
  return f;
}

TrigPoly TrigPoly::with_coefficients(const PointSet &points, const std::vector<cplx> &coeffs) {
  if (points.size() != coeffs.size())
    throw PreconditionError("points and coefficients differ in length");
  TrigPoly f(points.empty() ? 0 : points.front().n());
  for (std::size_t i = 0; i < points.size(); ++i)
    f.add(points[i], coeffs[i]);
  return f;
}

void TrigPoly::add(FreqPoint xi, cplx a) {
  if (n_ == 0 && terms_.empty())
    n_ = xi.n();
  if (xi.n() != n_)
    throw PreconditionError("frequency dimension differs from the polynomial's");
  auto [it, inserted] = index_.emplace(xi, terms_.size());
  if (!inserted)
    throw PreconditionError("repeated frequency " + xi.str());
  terms_.push_back({std::move(xi), a});
}

double TrigPoly::l2_norm() const {
  NeumaierSum s;
  for (const auto &t : terms_)
    s.add(std::norm(t.a));
  return std::sqrt(s.value());
}

double TrigPoly::l1_norm() const {
  NeumaierSum s;
  for (const auto &t : terms_)
    s.add(std::abs(t.a));
  return s.value();
}

double TrigPoly::max_abs_frequency() const {
  double m = 0;
  for (const auto &t : terms_)
    for (const auto &c : t.xi.coords)
      m = std::max(m, std::fabs(c.to_double()));
  return m;
}

bool TrigPoly::integer_frequencies() const {
  for (const auto &t : terms_)
    if (!t.xi.is_integer())
      return false;
  return true;
}

bool TrigPoly::gaussian_integer_coefficients() const {
  constexpr double lim = 9007199254740992.0; // 2^53
  for (const auto &t : terms_) {
    const double re = t.a.real(), im = t.a.imag();
    if (re != std::floor(re) || im != std::floor(im) || std::fabs(re) >= lim || std::fabs(im) >= lim)
      return false;
  }
  return true;
}

Box Box::cube(int n, double side, double center) {
  Box b;
  b.center.assign(n, center);
  b.side.assign(n, side);
  return b;
}

double Box::volume() const {
  double v = 1;
  for (auto s : side)
    v *= s;
  return v;
}

Weight Weight::for_box(const Box &box, int m) {
  Weight w;
  w.center = box.center;
  w.side = box.side;
  w.R = *std::max_element(box.side.begin(), box.side.end());
  w.m = m > 0 ? m : 10 * box.n();
  return w;
}

double Weight::axis_factor(int axis, double x) const {
  const double d = std::max(0.0, std::fabs(x - center[axis]) - side[axis] / 2.0);
  return std::pow(1.0 + d / R, -static_cast<double>(m));
}

double Weight::operator()(std::span<const double> x) const {
  double v = 1;
  for (std::size_t i = 0; i < x.size(); ++i)
    v *= axis_factor(static_cast<int>(i), x[i]);
  return v;
}

Box Weight::window() const {
  Box b;
  b.center = center;
  b.side = side;
  for (auto &s : b.side)
    s *= 8.0;
  return b;
}

cplx evaluate(const TrigPoly &f, std::span<const double> x) {
  if (static_cast<int>(x.size()) != f.n())
    throw PreconditionError("evaluation point has the wrong dimension");
  ComplexNeumaier acc;
  for (const auto &t : f.terms()) {
    long double ph = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
      ph += t.xi[i].to_long_double() * static_cast<long double>(x[i]);
    acc.add(t.a * unit_phase(ph));
  }
  return acc.value();
}

double nyquist_spacing(const TrigPoly &f) {
  const double m = f.max_abs_frequency();
  return m > 0 ? 1.0 / (2.0 * m) : 1.0;
}

HPolicy parse_h_policy(std::string_view s) {
  if (s == "nyquist")
    return HPolicy::nyquist;
  if (s == "nyquist/2" || s == "half")
    return HPolicy::half;
  if (s == "nyquist/4" || s == "quarter")
    return HPolicy::quarter;
  throw PreconditionError("unknown h policy '" + std::string(s) + "'");
}

std::string_view h_policy_name(HPolicy p) {
  switch (p) {
  case HPolicy::nyquist:
    return "nyquist";
  case HPolicy::half:
    return "nyquist/2";
  case HPolicy::quarter:
    return "nyquist/4";
  }
  return "nyquist";
}

double policy_spacing(const TrigPoly &f, HPolicy p) {
  const double h = nyquist_spacing(f);
  switch (p) {
  case HPolicy::nyquist:
    return h;
  case HPolicy::half:
    return h / 2;
  case HPolicy::quarter:
    return h / 4;
  }
  return h;
}

namespace {

void check_nyquist(const TrigPoly &f, double h) {
  if (!(h > 0))
    throw PreconditionError("grid spacing must be positive");
  if (h > nyquist_spacing(f) * (1.0 + 1e-12))
    throw PreconditionError("grid spacing violates the Nyquist rule h <= 1/(2 max|xi|)");
}

double pow_abs(cplx v, double p) {
  const double a2 = std::norm(v);
  if (p == 2.0)
    return a2;
  if (p == std::floor(p) && std::fmod(p, 2.0) == 0.0 && p <= 64) {
    double r = 1;
    for (int i = 0; i < static_cast<int>(p) / 2; ++i)
      r *= a2;
    return r;
  }
  return std::pow(std::sqrt(a2), p);
}

bool is_unit_period_cell(const TrigPoly &f, const Box &box, double h, std::size_t &M) {
  if (!f.integer_frequencies())
    return false;
  for (auto s : box.side)
    if (s != 1.0)
      return false;
  const double inv = 1.0 / h;
  const double r = std::nearbyint(inv);
  if (std::fabs(inv - r) > 1e-9 * inv || r < 1)
    return false;
  M = static_cast<std::size_t>(r);
  return true;
}

// Samples f(lo + x) for x on the periodic M-grid of [0,1)^n via one inverse DFT.
std::vector<cplx> fft_samples(const TrigPoly &f, const std::vector<double> &lo,
                              const std::vector<std::size_t> &M) {
  const int n = f.n();
  std::size_t total = 1;
  for (auto m : M)
    total *= m;
  if (total > (std::size_t{1} << 26))
    throw BudgetExceeded("periodic grid too large", static_cast<double>(total) * 16.0);
  std::vector<cplx> buf(total, cplx(0, 0));
  for (const auto &t : f.terms()) {
    std::size_t idx = 0;
    long double ph = 0;
    for (int i = 0; i < n; ++i) {
      const std::int64_t k = t.xi[i].num();
      const auto m = static_cast<std::int64_t>(M[i]);
      const std::int64_t r = ((k % m) + m) % m;
      idx = idx * M[i] + static_cast<std::size_t>(r);
      ph += static_cast<long double>(k) * lo[i];
    }
    buf[idx] += t.a * unit_phase(ph);
  }
  std::vector<int> dims(M.begin(), M.end());
  auto *data = reinterpret_cast<fftw_complex *>(buf.data());
  fftw_plan plan = fftw_plan_dft(n, dims.data(), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return buf;
}

// Common denominator per axis when every coordinate is rational.
bool axis_periods(const TrigPoly &f, std::vector<std::int64_t> &D) {
  const int n = f.n();
  D.assign(n, 1);
  for (const auto &t : f.terms())
    for (int i = 0; i < n; ++i) {
      const std::int64_t d = t.xi[i].den();
      const std::int64_t g = std::gcd(D[i], d);
      const i128 l = static_cast<i128>(D[i] / g) * d;
      if (l > (i128{1} << 40))
        return false;
      D[i] = static_cast<std::int64_t>(l);
    }
  return true;
}

} // namespace

Grid evaluate_grid(const TrigPoly &f, const Box &box, double h, GridPath path) {
  check_nyquist(f, h);
  if (box.n() != f.n())
    throw PreconditionError("box dimension differs from the polynomial's");
  const int n = f.n();
  Grid g;
  std::size_t M = 0;
  const bool periodic = is_unit_period_cell(f, box, h, M);
  if (path == GridPath::fft && !periodic)
    throw PreconditionError("FFT grid path needs integer frequencies, a unit period cell and h = 1/M");
  g.lo.resize(n);
  for (int i = 0; i < n; ++i)
    g.lo[i] = box.center[i] - box.side[i] / 2.0;
  if (periodic) {
    g.periodic = true;
    g.shape.assign(n, M);
    g.step.assign(n, 1.0 / static_cast<double>(M));
    if (path != GridPath::direct) {
      g.values = fft_samples(f, g.lo, g.shape);
      return g;
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const auto K = static_cast<std::size_t>(std::ceil(box.side[i] / h - 1e-9));
      g.shape.push_back(std::max<std::size_t>(K, 1) + 1);
      g.step.push_back(box.side[i] / static_cast<double>(g.shape.back() - 1));
    }
  }
  std::vector<detail::AxisGrid> axes;
  for (int i = 0; i < n; ++i)
    axes.push_back({g.lo[i], g.step[i], g.shape[i]});
  std::size_t total = 1;
  for (auto s : g.shape)
    total *= s;
  g.values.resize(total);
  detail::TensorEvaluator ev(f, axes);
  const std::size_t last = g.shape.back();
  ev.for_each_row([&](std::size_t outer, const cplx *row) {
    std::copy(row, row + last, g.values.begin() + static_cast<std::ptrdiff_t>(outer * last));
  });
  return g;
}

namespace {

std::size_t smooth_size(std::size_t m) {
  for (;; ++m) {
    std::size_t r = m;
    for (std::size_t q : {2u, 3u, 5u, 7u})
      while (r % q == 0)
        r /= q;
    if (r == 1)
      return m;
  }
}

} // namespace

std::vector<cplx> periodic_samples(const TrigPoly &f, const std::vector<std::size_t> &M) {
  if (!f.integer_frequencies())
    throw PreconditionError("periodic_samples needs integer frequencies");
  if (static_cast<int>(M.size()) != f.n())
    throw PreconditionError("periodic_samples: one grid size per axis");
  return fft_samples(f, std::vector<double>(M.size(), 0.0), M);
}

std::size_t fft_friendly_size(std::size_t m) { return smooth_size(m); }

double torus_mean_power(const TrigPoly &f, double p, std::size_t min_points) {
  if (!f.integer_frequencies())
    throw PreconditionError("torus_mean_power needs integer frequencies");
  if (f.empty())
    return 0.0;
  const int n = f.n();
  std::vector<std::int64_t> kmin(n, INT64_MAX), kmax(n, INT64_MIN);
  for (const auto &t : f.terms())
    for (int i = 0; i < n; ++i) {
      kmin[i] = std::min(kmin[i], t.xi[i].num());
      kmax[i] = std::max(kmax[i], t.xi[i].num());
    }
  std::vector<std::size_t> M(n);
  for (int i = 0; i < n; ++i) {
    const double exact = std::ceil(p) * static_cast<double>(kmax[i] - kmin[i]) + 1;
    M[i] = smooth_size(std::max(min_points, static_cast<std::size_t>(exact)));
  }
  const std::vector<cplx> vals = fft_samples(f, std::vector<double>(n, 0.0), M);
  NeumaierSum acc;
  for (const auto &v : vals)
    acc.add(pow_abs(v, p));
  return acc.value() / static_cast<double>(vals.size());
}

double lp_norm_box(const TrigPoly &f, double p, const Box &box, double h) {
  if (!(p >= 1))
    throw PreconditionError("lp_norm_box needs p >= 1");
  check_nyquist(f, h);
  if (box.n() != f.n())
    throw PreconditionError("box dimension differs from the polynomial's");
  if (f.empty())
    return 0.0;
  const int n = f.n();

  std::vector<std::int64_t> D;
  bool periodic = axis_periods(f, D);
  if (periodic)
    for (int i = 0; i < n; ++i) {
      const double r = box.side[i] / static_cast<double>(D[i]);
      const double rr = std::nearbyint(r);
      if (rr < 1 || std::fabs(r - rr) > 1e-9 * r)
        periodic = false;
    }

  NeumaierSum acc;
  if (periodic) {
    // Integer frequencies k = xi D on the unit torus. The mean over whole
    // periods does not depend on the box offset.
    TrigPoly g(n);
    for (const auto &t : f.terms()) {
      FreqPoint k = t.xi;
      for (int i = 0; i < n; ++i)
        k[i] = k[i] * Rational(D[i]);
      g.add(std::move(k), t.a);
    }
    const bool even = p == std::floor(p) && std::fmod(p, 2.0) == 0.0;
    std::size_t min_points = 1;
    if (!even)
      for (int i = 0; i < n; ++i)
        min_points = std::max(min_points, static_cast<std::size_t>(std::ceil(static_cast<double>(D[i]) / h - 1e-9)));
    return std::pow(torus_mean_power(g, p, min_points), 1.0 / p);
  }

  std::vector<detail::AxisGrid> axes;
  std::vector<std::size_t> shape;
  for (int i = 0; i < n; ++i) {
    const auto K = std::max<std::size_t>(static_cast<std::size_t>(std::ceil(box.side[i] / h - 1e-9)), 1);
    axes.push_back({box.center[i] - box.side[i] / 2.0, box.side[i] / static_cast<double>(K), K + 1});
    shape.push_back(K + 1);
  }
  detail::TensorEvaluator ev(f, axes);
  const std::size_t last = shape.back();
  double wsum = 1;
  for (auto s : shape)
    wsum *= static_cast<double>(s - 1);
  ev.for_each_row([&](std::size_t outer, const cplx *row) {
    // Trapezoid weight of the outer index: product of 1/2 at each boundary.
    double wo = 1;
    std::size_t rem = outer;
    for (int i = n - 2; i >= 0; --i) {
      const std::size_t j = rem % shape[i];
      rem /= shape[i];
      if (j == 0 || j + 1 == shape[i])
        wo *= 0.5;
    }
    NeumaierSum rs;
    for (std::size_t j = 0; j < last; ++j) {
      const double wj = (j == 0 || j + 1 == last) ? 0.5 : 1.0;
      rs.add(wj * pow_abs(row[j], p));
    }
    acc.add(wo * rs.value());
  });
  return std::pow(acc.value() / wsum, 1.0 / p);
}

namespace {

struct GaussInt {
  i128 re = 0, im = 0;
};

} // namespace

TorusMoment lp_norm_torus_even(const TrigPoly &f, int p) {
  if (p < 2 || p % 2 != 0)
    throw PreconditionError("lp_norm_torus_even needs an even exponent p = 2k >= 2");
  if (!f.integer_frequencies())
    throw PreconditionError("lp_norm_torus_even needs integer frequencies");
  const int k = p / 2;
  TorusMoment out;
  if (f.empty()) {
    out.exact = true;
    return out;
  }
  PointSet pts;
  for (const auto &t : f.terms())
    pts.push_back(t.xi);
  const IntPoints ip = to_int_points(pts);
  const detail::SumCodec codec(ip, k);
  std::vector<std::uint64_t> codes(ip.size());
  for (std::size_t i = 0; i < ip.size(); ++i)
    codes[i] = codec.encode(ip[i]);

  const bool exact = f.gaussian_integer_coefficients();
  out.exact = exact;
  if (exact) {
    std::unordered_map<std::uint64_t, GaussInt> cur;
    for (std::size_t i = 0; i < ip.size(); ++i)
      cur[codes[i]] = {static_cast<i128>(f.terms()[i].a.real()), static_cast<i128>(f.terms()[i].a.imag())};
    for (int step = 1; step < k; ++step) {
      std::unordered_map<std::uint64_t, GaussInt> next;
      next.reserve(cur.size() * 4);
      for (const auto &[c, v] : cur)
        for (std::size_t i = 0; i < ip.size(); ++i) {
          const i128 ar = static_cast<i128>(f.terms()[i].a.real());
          const i128 ai = static_cast<i128>(f.terms()[i].a.imag());
          auto &slot = next[c + codes[i]];
          slot.re = checked_add(slot.re, checked_add(checked_mul(v.re, ar), -checked_mul(v.im, ai)));
          slot.im = checked_add(slot.im, checked_add(checked_mul(v.re, ai), checked_mul(v.im, ar)));
        }
      cur = std::move(next);
    }
    BigInt total = 0;
    for (const auto &[c, v] : cur) {
      total += to_big(checked_add(checked_mul(v.re, v.re), checked_mul(v.im, v.im)));
    }
    out.value = total;
    out.approx = total.convert_to<long double>();
  } else {
    using lcplx = std::complex<long double>;
    std::unordered_map<std::uint64_t, lcplx> cur;
    for (std::size_t i = 0; i < ip.size(); ++i)
      cur[codes[i]] = lcplx(f.terms()[i].a.real(), f.terms()[i].a.imag());
    for (int step = 1; step < k; ++step) {
      std::unordered_map<std::uint64_t, lcplx> next;
      next.reserve(cur.size() * 4);
      for (const auto &[c, v] : cur)
        for (std::size_t i = 0; i < ip.size(); ++i)
          next[c + codes[i]] += v * lcplx(f.terms()[i].a.real(), f.terms()[i].a.imag());
      cur = std::move(next);
    }
    // Sum in code order so the result does not depend on hash iteration order.
    std::vector<std::pair<std::uint64_t, lcplx>> items(cur.begin(), cur.end());
    std::sort(items.begin(), items.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    long double total = 0;
    for (const auto &[c, v] : items)
      total += std::norm(v);
    out.approx = total;
  }
  out.root = static_cast<double>(std::pow(out.approx, 1.0L / p));
  return out;
}

double weighted_lp_norm(const TrigPoly &f, double p, const Weight &w, double h) {
  if (!(p >= 1))
    throw PreconditionError("weighted_lp_norm needs p >= 1");
  check_nyquist(f, h);
  if (static_cast<int>(w.center.size()) != f.n())
    throw PreconditionError("weight dimension differs from the polynomial's");
  if (f.empty())
    return 0.0;
  const int n = f.n();
  const Box win = w.window();
  std::vector<detail::AxisGrid> axes;
  std::vector<std::vector<double>> tw(n); // trapezoid weight times axis weight
  double cell = 1;
  for (int i = 0; i < n; ++i) {
    const auto K = std::max<std::size_t>(static_cast<std::size_t>(std::ceil(win.side[i] / h - 1e-9)), 1);
    const double lo = win.center[i] - win.side[i] / 2.0;
    const double step = win.side[i] / static_cast<double>(K);
    axes.push_back({lo, step, K + 1});
    cell *= step;
    tw[i].resize(K + 1);
    for (std::size_t j = 0; j <= K; ++j)
      tw[i][j] = ((j == 0 || j == K) ? 0.5 : 1.0) * w.axis_factor(i, lo + step * static_cast<double>(j));
  }
  // The weight is a product, so a row whose outer factor is negligible
  // contributes nothing measurable; we still visit it for determinism.
  NeumaierSum acc;
  detail::TensorEvaluator ev(f, axes);
  const std::size_t last = axes.back().count;
  ev.for_each_row([&](std::size_t outer, const cplx *row) {
    double wo = 1;
    std::size_t rem = outer;
    for (int i = n - 2; i >= 0; --i) {
      const std::size_t j = rem % axes[i].count;
      rem /= axes[i].count;
      wo *= tw[i][j];
    }
    NeumaierSum rs;
    for (std::size_t j = 0; j < last; ++j)
      rs.add(tw[n - 1][j] * pow_abs(row[j], p));
    acc.add(wo * rs.value());
  });
  return std::pow(acc.value() * cell, 1.0 / p);
}

double weight_mass(const Weight &w, double h) {
  const int n = static_cast<int>(w.center.size());
  const Box win = w.window();
  double mass = 1;
  for (int i = 0; i < n; ++i) {
    const auto K = std::max<std::size_t>(static_cast<std::size_t>(std::ceil(win.side[i] / h - 1e-9)), 1);
    const double lo = win.center[i] - win.side[i] / 2.0;
    const double step = win.side[i] / static_cast<double>(K);
    NeumaierSum s;
    for (std::size_t j = 0; j <= K; ++j)
      s.add(((j == 0 || j == K) ? 0.5 : 1.0) * w.axis_factor(i, lo + step * static_cast<double>(j)));
    mass *= s.value() * step;
  }
  return mass;
}

BigInt moment6_sweep(const IntPoints &points, const std::vector<std::int64_t> &weights) {
  const std::size_t m = points.size();
  if (m == 0)
    return 0;
  const bool unit = weights.empty();
  if (!unit && weights.size() != m)
    throw PreconditionError("weights and points differ in length");
  const int n = points.n;

  // Remaining coordinates are coded densely; the first one is swept.
  const detail::SumCodec codec(points, 3, 1);
  if (codec.range() > (std::uint64_t{1} << 27))
    throw BudgetExceeded("moment6_sweep accumulator too large", static_cast<double>(codec.range()) * 9.0);
  std::int64_t xmin = INT64_MAX, xmax = INT64_MIN;
  for (std::size_t i = 0; i < m; ++i) {
    xmin = std::min(xmin, points[i][0]);
    xmax = std::max(xmax, points[i][0]);
  }
  (void)n;

  // Columns of points by first coordinate.
  const auto xs = static_cast<std::size_t>(xmax - xmin + 1);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a][0] != points[b][0])
      return points[a][0] < points[b][0];
    return codec.encode(points[a]) < codec.encode(points[b]);
  });
  std::vector<std::size_t> col_start(xs + 1, 0);
  std::vector<std::uint64_t> col_code(m);
  std::vector<std::int64_t> col_w(m);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t i = order[r];
    col_code[r] = codec.encode(points[i]);
    col_w[r] = unit ? 1 : weights[i];
    ++col_start[static_cast<std::size_t>(points[i][0] - xmin) + 1];
  }
  for (std::size_t c = 0; c < xs; ++c)
    col_start[c + 1] += col_start[c];
  std::vector<std::int64_t> nonempty;
  for (std::size_t c = 0; c < xs; ++c)
    if (col_start[c + 1] > col_start[c])
      nonempty.push_back(static_cast<std::int64_t>(c));

  // Mirror symmetry x -> -x (with equal weights) halves the work.
  bool symmetric = (xmin == -xmax);
  if (symmetric) {
    for (std::size_t c = 0; c < xs && symmetric; ++c) {
      const std::size_t mc = xs - 1 - c;
      if (col_start[c + 1] - col_start[c] != col_start[mc + 1] - col_start[mc]) {
        symmetric = false;
        break;
      }
      for (std::size_t r = col_start[c], s = col_start[mc]; r < col_start[c + 1]; ++r, ++s)
        if (col_code[r] != col_code[s] || col_w[r] != col_w[s]) {
          symmetric = false;
          break;
        }
    }
  }

  std::vector<std::int64_t> acc(codec.range(), 0);
  std::vector<std::uint8_t> mark(codec.range(), 0);
  std::vector<std::uint64_t> touched;

  // c2 columns in CSR form, indexed by X2 - 2 xmin.
  const auto x2s = 2 * xs - 1;
  std::vector<std::size_t> c2_start(x2s + 1, 0);
  std::vector<std::uint64_t> c2_code;
  std::vector<std::int64_t> c2_val;
  for (std::size_t X2 = 0; X2 < x2s; ++X2) {
    c2_start[X2] = c2_code.size();
    const bool mirror = symmetric && static_cast<std::int64_t>(X2) + 2 * xmin < 0;
    if (!mirror) {
      for (auto ca : nonempty) {
        const std::int64_t cb = static_cast<std::int64_t>(X2) - ca;
        if (cb < 0 || cb >= static_cast<std::int64_t>(xs))
          continue;
        const auto ub = static_cast<std::size_t>(cb);
        for (std::size_t ia = col_start[ca]; ia < col_start[ca + 1]; ++ia)
          for (std::size_t ib = col_start[ub]; ib < col_start[ub + 1]; ++ib) {
            const std::uint64_t code = col_code[ia] + col_code[ib];
            if (!mark[code]) {
              mark[code] = 1;
              touched.push_back(code);
            }
            acc[code] += col_w[ia] * col_w[ib];
          }
      }
      std::sort(touched.begin(), touched.end());
      for (auto code : touched) {
        if (acc[code] != 0) {
          c2_code.push_back(code);
          c2_val.push_back(acc[code]);
        }
        acc[code] = 0;
        mark[code] = 0;
      }
      touched.clear();
    }
  }
  c2_start[x2s] = c2_code.size();
  // Column X2 for negative X2 under symmetry is the column of -X2.
  auto c2_range = [&](std::int64_t X2) -> std::pair<std::size_t, std::size_t> {
    if (symmetric && X2 < 0)
      X2 = -X2;
    const auto idx = static_cast<std::size_t>(X2 - 2 * xmin);
    return {c2_start[idx], c2_start[idx + 1]};
  };

  u128 total = 0;
  for (std::int64_t X = 3 * xmin; X <= 3 * xmax; ++X) {
    if (symmetric && X < 0)
      continue;
    for (auto cc : nonempty) {
      const std::int64_t xc = cc + xmin;
      const std::int64_t X2 = X - xc;
      if (X2 < 2 * xmin || X2 > 2 * xmax)
        continue;
      auto [b, e] = c2_range(X2);
      for (std::size_t i = col_start[cc]; i < col_start[cc + 1]; ++i) {
        const std::uint64_t base = col_code[i];
        const std::int64_t wi = col_w[i];
        for (std::size_t t = b; t < e; ++t) {
          const std::uint64_t code = c2_code[t] + base;
          if (!mark[code]) {
            mark[code] = 1;
            touched.push_back(code);
          }
          acc[code] += c2_val[t] * wi;
        }
      }
    }
    u128 col_sum = 0;
    for (auto code : touched) {
      const i128 v = acc[code];
      col_sum = checked_add(col_sum, static_cast<u128>(v * v));
      acc[code] = 0;
      mark[code] = 0;
    }
    touched.clear();
    if (symmetric && X > 0)
      col_sum = checked_add(col_sum, col_sum);
    total = checked_add(total, col_sum);
  }
  return to_big(total);
}

BigInt parabola_moment6(std::int64_t L, std::int64_t H) {
  if (H < L)
    return 0;
  const std::int64_t D = H - L;
  if (D > (std::int64_t{1} << 20))
    throw BudgetExceeded("parabola_moment6 range too long", static_cast<double>(D) * D * 48.0);
  // Entry for a difference vector (p, q): s = p + 2q (so sum x = 3 x3 + s),
  // and the admissible x3 interval [lo, hi].
  struct Entry {
    std::int32_t s, lo, hi;
  };
  const std::int64_t Qmax = 2 * D * D;
  const std::int64_t W = std::max<std::int64_t>(1, std::min<std::int64_t>(Qmax + 1, 4'000'000));
  u128 total = 0;
  std::vector<std::uint32_t> count;
  std::vector<Entry> entries, sorted;
  for (std::int64_t Q0 = 0; Q0 <= Qmax; Q0 += W) {
    const std::int64_t Q1 = std::min(Qmax + 1, Q0 + W); // window [Q0, Q1)
    const auto Wn = static_cast<std::size_t>(Q1 - Q0);
    entries.clear();
    std::vector<std::uint32_t> qidx;
    for (std::int64_t p = -D; p <= D; ++p) {
      // Q = (s^2 + 3 p^2) / 2 with s = p + 2q, s = p (mod 2).
      const std::int64_t p3 = 3 * p * p;
      const std::int64_t hi_sq = 2 * (Q1 - 1) - p3;
      if (hi_sq < 0)
        continue;
      const std::int64_t smax = detail::isqrt(hi_sq);
      const std::int64_t smin = detail::ceil_sqrt(2 * Q0 - p3);
      for (std::int64_t a = smin; a <= smax; ++a) {
        if (((a - p) & 1) != 0)
          continue;
        for (int sign = 0; sign < (a == 0 ? 1 : 2); ++sign) {
          const std::int64_t s = sign ? -a : a;
          const std::int64_t q = (s - p) / 2;
          const std::int64_t pq = p + q;
          if (q < -D || q > D || pq < -D || pq > D)
            continue;
          const std::int64_t lo = L - std::min<std::int64_t>({0, q, pq});
          const std::int64_t hi = H - std::max<std::int64_t>({0, q, pq});
          if (lo > hi)
            continue;
          const std::int64_t Q = (s * s + p3) / 2;
          entries.push_back({static_cast<std::int32_t>(s), static_cast<std::int32_t>(lo),
                             static_cast<std::int32_t>(hi)});
          qidx.push_back(static_cast<std::uint32_t>(Q - Q0));
        }
      }
    }
    // Counting sort by Q within the window.
    count.assign(Wn + 1, 0);
    for (auto qi : qidx)
      ++count[qi + 1];
    for (std::size_t i = 0; i < Wn; ++i)
      count[i + 1] += count[i];
    sorted.resize(entries.size());
    {
      std::vector<std::uint32_t> pos(count.begin(), count.end() - 1);
      for (std::size_t i = 0; i < entries.size(); ++i)
        sorted[pos[qidx[i]]++] = entries[i];
    }
    for (std::size_t qi = 0; qi < Wn; ++qi) {
      const std::size_t b = count[qi], e = count[qi + 1];
      u128 grp = 0;
      for (std::size_t i = b; i < e; ++i) {
        const Entry &u = sorted[i];
        for (std::size_t j = b; j < e; ++j) {
          const Entry &v = sorted[j];
          const std::int32_t ds = u.s - v.s;
          if (ds % 3 != 0)
            continue;
          const std::int32_t t = ds / 3; // x3' = x3 + t
          const std::int32_t lo = std::max(u.lo, v.lo - t);
          const std::int32_t hi = std::min(u.hi, v.hi - t);
          if (hi >= lo)
            grp += static_cast<u128>(hi - lo + 1);
        }
      }
      total = checked_add(total, grp);
    }
  }
  return to_big(total);
}

} // namespace declab::expsum
