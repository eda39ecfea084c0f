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

#include "declab/wavepackets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <fftw3.h>

#include "compensated.hpp"
#include "declab/errors.hpp"

namespace declab::packets {

using detail::NeumaierSum;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Smooth step with s(t) + s(1 - t) = 1, s = 0 for t <= 0 and 1 for t >= 1.
double smooth_step(double t) {
  if (t <= 0)
    return 0;
  if (t >= 1)
    return 1;
  const double a = std::exp(-1 / t), b = std::exp(-1 / (1 - t));
  return a / (a + b);
}

std::int64_t wrap(std::int64_t k, std::int64_t N) { return ((k % N) + N) % N; }
std::int64_t signed_bin(std::int64_t i, std::int64_t N) { return i < N / 2 ? i : i - N; }

void fft2(std::vector<cplx> &a, std::int64_t N, int sign) {
  auto *data = reinterpret_cast<fftw_complex *>(a.data());
  fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(N), static_cast<int>(N), data, data, sign, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

std::vector<cplx> inverse(std::vector<cplx> spec, std::int64_t N) {
  fft2(spec, N, FFTW_BACKWARD);
  const double s = 1.0 / static_cast<double>(N * N);
  for (auto &z : spec)
    z *= s;
  return spec;
}

// e(j / N) for j in [0, N).
std::vector<cplx> roots_of_unity(std::int64_t N) {
  std::vector<cplx> r(static_cast<std::size_t>(N));
  for (std::int64_t j = 0; j < N; ++j)
    r[j] = detail::unit_phase(static_cast<long double>(j) / N);
  return r;
}

double lp_sum(const std::vector<cplx> &g, double p) {
  if (p == 0) {
    double m = 0;
    for (const auto &z : g)
      m = std::max(m, std::abs(z));
    return m;
  }
  NeumaierSum s;
  if (p == std::floor(p) && std::fmod(p, 2.0) == 0.0 && p <= 16) {
    const int k = static_cast<int>(p) / 2;
    for (const auto &z : g) {
      const double a = std::norm(z);
      double v = a;
      for (int i = 1; i < k; ++i)
        v *= a;
      s.add(v);
    }
  } else {
    for (const auto &z : g)
      s.add(std::pow(std::abs(z), p));
  }
  return std::pow(s.value(), 1.0 / p);
}

} // namespace

double Field::l2() const {
  NeumaierSum s;
  for (const auto &z : v)
    s.add(std::norm(z));
  return std::sqrt(s.value());
}

void check_scale(std::int64_t N) {
  std::int64_t r = 1;
  while (r * r < N)
    r *= 2;
  if (N < 16 || r * r != N || (r & (r - 1)) != 0 || N > (1 << 14))
    throw PreconditionError("wave packets need N = 4^j with 16 <= N <= 2^14");
}

Field from_trig_poly(const expsum::TrigPoly &f, std::int64_t N) {
  check_scale(N);
  if (f.n() != 2)
    throw PreconditionError("wave packets are two-dimensional");
  std::vector<cplx> spec(static_cast<std::size_t>(N * N));
  for (const auto &t : f.terms()) {
    const Rational k1 = t.xi[0] * Rational(N), k2 = t.xi[1] * Rational(N);
    if (!k1.is_integer() || !k2.is_integer())
      throw PreconditionError("frequency " + t.xi.str() + " not in (1/N) Z^2");
    spec[wrap(k1.num(), N) * N + wrap(k2.num(), N)] += t.a * static_cast<double>(N * N);
  }
  Field out(N);
  out.v = inverse(std::move(spec), N);
  return out;
}

Field random_adelta_field(std::int64_t N, std::uint64_t seed) {
  check_scale(N);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> spec(static_cast<std::size_t>(N * N));
  for (std::int64_t k1 = -N / 2; k1 < N / 2; ++k1)
    for (std::int64_t k2 = -N / 2; k2 < N / 2; ++k2)
      if (std::abs(k2 * N - k1 * k1) <= N) {
        const double re = g(rng), im = g(rng);
        spec[wrap(k1, N) * N + wrap(k2, N)] = cplx(re, im);
      }
  Field out(N);
  out.v = inverse(std::move(spec), N);
  return out;
}

Field restrict_to_adelta(const Field &f) {
  check_scale(f.N);
  const std::int64_t N = f.N;
  std::vector<cplx> spec = f.v;
  fft2(spec, N, FFTW_FORWARD);
  for (std::int64_t i1 = 0; i1 < N; ++i1)
    for (std::int64_t i2 = 0; i2 < N; ++i2) {
      const std::int64_t k1 = signed_bin(i1, N), k2 = signed_bin(i2, N);
      if (std::abs(k2 * N - k1 * k1) > N)
        spec[i1 * N + i2] = 0;
    }
  Field out(N);
  out.v = inverse(std::move(spec), N);
  return out;
}

PacketDesign::PacketDesign(std::int64_t N, int M) : N_(N), M_(M) {
  check_scale(N);
  if (M < 1)
    throw PreconditionError("envelope exponent must be positive");
  root_ = 1;
  while (root_ * root_ < N)
    root_ *= 2;
  const auto all = lattice::cap_partition(2, Rational(1, N));
  if (static_cast<int>(all.size()) != cap_count())
    throw CrosscheckFailure("cap partition size differs from 2 sqrt(N) + 1");
  caps_ = all;
  const int C = cap_count();
  support_.resize(C);
  lattice_.resize(C);
  profile_.resize(C);
  peak_.resize(C);
  excess_.assign(C, -1);
  for (int i = 0; i < C; ++i) {
    const int m = i + cap_min();
    const std::int64_t kc = m * root_ / 2;
    for (std::int64_t d = -root_ / 2; d <= root_ / 2; ++d) {
      const std::int64_t k1 = kc + d;
      if (k1 < -N / 2 || k1 >= N / 2)
        continue;
      const double tangent = (static_cast<double>(kc) * kc + 2.0 * kc * d) / static_cast<double>(N);
      for (auto k2 = static_cast<std::int64_t>(std::floor(tangent - 2)); k2 <= tangent + 2; ++k2)
        if (multiplier(m, k1, k2) > 0)
          support_[i].push_back({k1, k2});
    }
    std::vector<cplx> spec(static_cast<std::size_t>(N * N));
    for (const auto &k : support_[i])
      spec[wrap(k[0], N) * N + wrap(k[1], N)] = multiplier(m, k[0], k[1]);
    profile_[i] = inverse(std::move(spec), N);
    peak_[i] = profile_[i][0].real();
    for (std::int64_t j = 0; j < 4; ++j) {
      const std::int64_t y2 = j * N / 4;
      for (std::int64_t a = 0; a < root_; ++a)
        lattice_[i].push_back({wrap(-m * j * root_ / 4 + a * root_, N), y2});
    }
  }
}

double PacketDesign::window(int m, std::int64_t k1) const {
  const double half = static_cast<double>(root_) / 2;
  const double u = std::fabs(static_cast<double>(k1 - m * root_ / 2)) / half;
  return smooth_step((0.55 - u) / 0.1);
}

double PacketDesign::multiplier(int m, std::int64_t k1, std::int64_t k2) const {
  const std::int64_t kc = m * root_ / 2;
  const double r = static_cast<double>(root_);
  const double d = static_cast<double>(k1 - kc);
  const double w = smooth_step((0.5 * r - std::fabs(d)) / (0.2 * r));
  if (w == 0)
    return 0;
  const double delta = static_cast<double>(k2) - (static_cast<double>(kc) * kc + 2.0 * kc * d) / N_;
  double h = 1;
  if (delta < -1)
    h = smooth_step((delta + 1.75) / 0.75);
  else if (delta > 1.08)
    h = smooth_step((2.0 - delta) / 0.92);
  return w * h;
}

const std::vector<std::array<std::int64_t, 2>> &PacketDesign::multiplier_support(int m) const {
  return support_.at(m - cap_min());
}
const std::vector<cplx> &PacketDesign::profile(int m) const { return profile_.at(m - cap_min()); }
double PacketDesign::profile_peak(int m) const { return peak_.at(m - cap_min()); }
const std::vector<std::array<std::int64_t, 2>> &PacketDesign::lattice(int m) const {
  return lattice_.at(m - cap_min());
}
double PacketDesign::sampling_factor() const { return static_cast<double>(N_) * N_ / (4.0 * root_); }
const lattice::Cap &PacketDesign::cap(int m) const { return caps_.at(m - cap_min()); }

Tube PacketDesign::tube(int m, std::array<std::int64_t, 2> y) const {
  const double c = static_cast<double>(m) / (2.0 * root_);
  const double s = std::sqrt(1 + 4 * c * c);
  Tube t;
  t.cap = m;
  t.center = {static_cast<double>(y[0]), static_cast<double>(y[1])};
  t.axis = {-2 * c / s, 1 / s};
  t.width = static_cast<double>(root_);
  t.length = static_cast<double>(N_);
  return t;
}

double PacketDesign::envelope(int m, std::int64_t d1, std::int64_t d2) const {
  const double c = static_cast<double>(m) / (2.0 * root_);
  const double s = std::sqrt(1 + 4 * c * c);
  const double r = static_cast<double>(root_), n = static_cast<double>(N_);
  const std::int64_t w1 = signed_bin(wrap(d1, N_), N_), w2 = signed_bin(wrap(d2, N_), N_);
  double best = 0;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) {
      const double x1 = static_cast<double>(w1 + a * N_), x2 = static_cast<double>(w2 + b * N_);
      const double ut = (x1 + 2 * c * x2) / s / r;
      const double ue = (-2 * c * x1 + x2) / s / n;
      best = std::max(best, std::pow(1 + ut * ut + ue * ue, -M_));
    }
  return best;
}

double PacketDesign::envelope_excess(int m) const {
  double &e = excess_.at(m - cap_min());
  if (e >= 0)
    return e;
  const auto &psi = profile(m);
  const double peak = profile_peak(m);
  double worst = 0;
  for (std::int64_t x1 = 0; x1 < N_; ++x1)
    for (std::int64_t x2 = 0; x2 < N_; ++x2)
      worst = std::max(worst, std::abs(psi[x1 * N_ + x2]) / (peak * envelope(m, x1, x2)));
  e = worst;
  return e;
}

double PacketDesign::profile_norm(int m, double p) const {
  const auto key = std::make_pair(m, p);
  auto it = norms_.find(key);
  if (it == norms_.end())
    it = norms_.emplace(key, lp_sum(profile(m), p) / profile_peak(m)).first;
  return it->second;
}

int PacketDesign::cap_of_bin(std::int64_t k1, std::int64_t k2) const {
  if (std::abs(k2 * N_ - k1 * k1) > 2 * N_)
    return INT32_MIN;
  const std::int64_t half = root_ / 2;
  // Smallest m with m half >= k1 - half.
  std::int64_t num = k1 - half;
  std::int64_t m = num >= 0 ? (num + half - 1) / half : -((-num) / half);
  m = std::max<std::int64_t>(m, -root_);
  if (m > root_ || std::abs(m * half - k1) > half)
    return INT32_MIN;
  return static_cast<int>(m);
}

double NFunction::amplitude(const Packet &p) const { return std::abs(p.coeff) * design_->profile_peak(p.cap); }

void NFunction::add(Packet p) {
  if (p.cap < design_->cap_min() || p.cap >= design_->cap_min() + design_->cap_count())
    throw PreconditionError("packet cap index out of range");
  packets_.push_back(p);
}

std::vector<std::size_t> NFunction::plate_counts() const {
  std::vector<std::size_t> c(design_->cap_count(), 0);
  for (const auto &p : packets_)
    ++c[p.cap - design_->cap_min()];
  return c;
}

std::vector<cplx> NFunction::spectrum() const {
  const std::int64_t N = design_->N();
  const auto roots = roots_of_unity(N);
  std::vector<cplx> spec(static_cast<std::size_t>(N * N));
  for (const auto &p : packets_)
    for (const auto &k : design_->multiplier_support(p.cap)) {
      const std::int64_t ph = wrap(-(k[0] * p.y[0] + k[1] * p.y[1]), N);
      spec[wrap(k[0], N) * N + wrap(k[1], N)] += p.coeff * design_->multiplier(p.cap, k[0], k[1]) * roots[ph];
    }
  return spec;
}

Field NFunction::synthesize() const {
  Field f(design_->N());
  f.v = inverse(spectrum(), design_->N());
  return f;
}

InvariantReport NFunction::verify() const {
  const PacketDesign &D = *design_;
  const std::int64_t N = D.N();
  const double T = std::pow(static_cast<double>(N), 1.5);
  InvariantReport r;
  r.size_min = std::numeric_limits<double>::infinity();
  r.size_max = 0;
  std::map<int, double> leak;
  for (const auto &p : packets_) {
    const double a = amplitude(p);
    r.envelope_excess = std::max(r.envelope_excess, a * D.envelope_excess(p.cap));
    for (double q : {2.0, 4.0, 6.0, 0.0}) {
      const double s = a * D.profile_norm(p.cap, q) / (q == 0 ? 1.0 : std::pow(T, 1.0 / q));
      r.size_min = std::min(r.size_min, s);
      r.size_max = std::max(r.size_max, s);
    }
    if (!leak.count(p.cap)) {
      double out = 0, all = 0;
      for (const auto &k : D.multiplier_support(p.cap)) {
        const double w = std::pow(D.multiplier(p.cap, k[0], k[1]), 2);
        all += w;
        if (!D.cap(p.cap).contains(FreqPoint({Rational(k[0], N), Rational(k[1], N)})))
          out += w;
      }
      leak[p.cap] = out / all;
    }
  }
  for (const auto &kv : leak)
    r.leakage = std::max(r.leakage, kv.second);
  if (packets_.empty())
    r.size_min = r.size_max = 1;

  // Tubes of each cap rasterized on the grid.
  std::map<int, std::vector<std::size_t>> by_cap;
  for (std::size_t i = 0; i < packets_.size(); ++i)
    by_cap[packets_[i].cap].push_back(i);
  std::vector<int> count(static_cast<std::size_t>(N * N));
  std::vector<std::size_t> stamp(static_cast<std::size_t>(N * N));
  std::size_t tick = 0;
  for (const auto &[m, idx] : by_cap) {
    std::fill(count.begin(), count.end(), 0);
    for (auto i : idx) {
      const Tube t = D.tube(m, packets_[i].y);
      const double e1 = t.axis[0], e2 = t.axis[1];
      const double t1 = e2, t2 = -e1; // unit cross direction
      ++tick;
      const auto reach = static_cast<std::int64_t>(std::ceil(t.length / 2 + t.width));
      for (std::int64_t d2 = -reach; d2 <= reach; ++d2) {
        // |d.t| < width/2 is an interval in d1 of length width / t1.
        const double mid = -t2 * d2 / t1;
        const double hw = t.width / 2 / t1;
        for (auto d1 = static_cast<std::int64_t>(std::ceil(mid - hw)); d1 <= mid + hw; ++d1) {
          const double a = d1 * t1 + d2 * t2, b = d1 * e1 + d2 * e2;
          if (a < -t.width / 2 || a >= t.width / 2 || b < -t.length / 2 || b >= t.length / 2)
            continue;
          const auto cell = static_cast<std::size_t>(wrap(packets_[i].y[0] + d1, N) * N + wrap(packets_[i].y[1] + d2, N));
          if (stamp[cell] == tick)
            continue;
          stamp[cell] = tick;
          r.max_overlap = std::max(r.max_overlap, ++count[cell]);
        }
      }
    }
  }
  r.envelope_ok = r.envelope_excess <= 1.0;
  r.size_ok = r.size_min >= 1.0 / 8 && r.size_max <= 8;
  r.leakage_ok = r.leakage <= 1e-6;
  r.separation_ok = r.max_overlap <= kTubeOverlap;
  return r;
}

namespace {

std::vector<PDeltaNorm> pdelta_from_spectrum(const std::vector<cplx> &spec, const std::vector<double> &ps,
                                             const PacketDesign &D) {
  const std::int64_t N = D.N();
  std::map<int, std::vector<std::size_t>> cells;
  NeumaierSum total, outside;
  for (std::int64_t i1 = 0; i1 < N; ++i1)
    for (std::int64_t i2 = 0; i2 < N; ++i2) {
      const std::size_t idx = static_cast<std::size_t>(i1 * N + i2);
      const double w = std::norm(spec[idx]);
      if (w == 0)
        continue;
      total.add(w);
      const int m = D.cap_of_bin(signed_bin(i1, N), signed_bin(i2, N));
      if (m == INT32_MIN)
        outside.add(w);
      else
        cells[m].push_back(idx);
    }
  std::vector<NeumaierSum> sq(ps.size());
  std::vector<double> sup(ps.size(), 0);
  for (const auto &[m, idx] : cells) {
    std::vector<cplx> piece(spec.size());
    for (auto i : idx)
      piece[i] = spec[i];
    const auto g = inverse(std::move(piece), N);
    for (std::size_t j = 0; j < ps.size(); ++j)
      sq[j].add(std::pow(lp_sum(g, ps[j]), 2));
  }
  std::vector<PDeltaNorm> out(ps.size());
  for (std::size_t j = 0; j < ps.size(); ++j) {
    out[j].value = std::sqrt(sq[j].value());
    out[j].unsupported_mass = total.value() > 0 ? std::sqrt(outside.value() / total.value()) : 0;
  }
  return out;
}

std::vector<cplx> forward(const Field &f) {
  std::vector<cplx> spec = f.v;
  fft2(spec, f.N, FFTW_FORWARD);
  return spec;
}

} // namespace

std::vector<PDeltaNorm> norm_pdelta_many(const Field &f, const std::vector<double> &ps, const PacketDesign &design) {
  if (f.N != design.N())
    throw PreconditionError("field and design scales differ");
  for (double p : ps)
    if (p != 0 && p < 1)
      throw PreconditionError("norm exponent must be >= 1 (0 for the sup)");
  return pdelta_from_spectrum(forward(f), ps, design);
}

PDeltaNorm norm_pdelta(const Field &f, double p, const PacketDesign &design) {
  return norm_pdelta_many(f, {p}, design).front();
}

NFunction synth_nfunction(std::shared_ptr<const PacketDesign> design, const std::vector<std::size_t> &counts,
                          std::uint64_t seed) {
  const PacketDesign &D = *design;
  if (static_cast<int>(counts.size()) != D.cap_count())
    throw PreconditionError("one plate count per cap required");
  std::mt19937_64 rng(seed);
  NFunction f(design);
  for (int i = 0; i < D.cap_count(); ++i) {
    const int m = i + D.cap_min();
    auto slots = D.lattice(m);
    if (counts[i] > slots.size())
      throw PreconditionError("plate count exceeds the tube-grid capacity of cap " + std::to_string(m));
    for (std::size_t j = 0; j < counts[i]; ++j) {
      const std::size_t pick = j + static_cast<std::size_t>(rng() % (slots.size() - j));
      std::swap(slots[j], slots[pick]);
      const double phase = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      f.add({m, slots[j], std::polar(1.0 / D.profile_peak(m), 2 * kPi * phase)});
    }
  }
  return f;
}

bool is_balanced(const NFunction &f) {
  std::size_t lo = SIZE_MAX, hi = 0;
  for (auto c : f.plate_counts())
    if (c > 0) {
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  return hi == 0 || hi <= 2 * lo;
}

std::vector<NFunction> balanced_split(const NFunction &f) {
  if (is_balanced(f))
    return {f};
  const auto counts = f.plate_counts();
  std::map<int, NFunction> groups;
  for (const auto &p : f.packets()) {
    const std::size_t c = counts[p.cap - f.design().cap_min()];
    const int level = static_cast<int>(std::floor(std::log2(static_cast<double>(c))));
    auto it = groups.find(level);
    if (it == groups.end())
      it = groups.emplace(level, NFunction(f.design_ptr())).first;
    it->second.add(p);
  }
  std::vector<NFunction> out;
  for (auto &kv : groups)
    out.push_back(std::move(kv.second));
  return out;
}

PacketDecomposition wave_packet_decompose(const Field &f, std::shared_ptr<const PacketDesign> design) {
  const PacketDesign &D = *design;
  const std::int64_t N = D.N();
  if (f.N != N)
    throw PreconditionError("field and design scales differ");
  const auto spec = forward(f);
  NeumaierSum total, outside;
  for (std::int64_t i1 = 0; i1 < N; ++i1)
    for (std::int64_t i2 = 0; i2 < N; ++i2) {
      const double w = std::norm(spec[i1 * N + i2]);
      total.add(w);
      const std::int64_t k1 = signed_bin(i1, N), k2 = signed_bin(i2, N);
      if (std::abs(k2 * N - k1 * k1) > N)
        outside.add(w);
    }
  if (outside.value() > 1e-20 * total.value())
    throw PreconditionError("support violation: spectrum leaves A_delta");

  const auto roots = roots_of_unity(N);
  const double inv = 1.0 / static_cast<double>(N * N);
  std::vector<Packet> raw;
  for (int i = 0; i < D.cap_count(); ++i) {
    const int m = i + D.cap_min();
    std::vector<std::pair<std::array<std::int64_t, 2>, cplx>> bins;
    for (std::int64_t k1 = -N / 2; k1 < N / 2; ++k1) {
      const double w = D.window(m, k1);
      if (w == 0)
        continue;
      for (std::int64_t k2 = -N / 2; k2 < N / 2; ++k2) {
        const cplx v = spec[wrap(k1, N) * N + wrap(k2, N)];
        if (v != cplx(0, 0) && std::abs(k2 * N - k1 * k1) <= N)
          bins.push_back({{k1, k2}, w * v});
      }
    }
    if (bins.empty())
      continue;
    for (const auto &y : D.lattice(m)) {
      detail::ComplexNeumaier g;
      for (const auto &[k, v] : bins)
        g.add(v * roots[wrap(k[0] * y[0] + k[1] * y[1], N)]);
      const cplx c = D.sampling_factor() * inv * g.value();
      raw.push_back({m, y, c});
    }
  }

  PacketDecomposition out;
  out.original = f;
  for (const auto &p : raw)
    out.max_amplitude = std::max(out.max_amplitude, std::abs(p.coeff) * D.profile_peak(p.cap));
  std::map<int, NFunction, std::greater<>> levels;
  for (const auto &p : raw) {
    const double a = std::abs(p.coeff) * D.profile_peak(p.cap);
    if (a < 1e-14 * out.max_amplitude || a == 0)
      continue;
    int e;
    std::frexp(a, &e);
    auto it = levels.find(e - 1);
    if (it == levels.end())
      it = levels.emplace(e - 1, NFunction(design)).first;
    it->second.add({p.cap, p.y, p.coeff / std::ldexp(1.0, e - 1)});
  }
  for (auto &kv : levels)
    out.levels.push_back({std::ldexp(1.0, kv.first), std::move(kv.second)});
  out.sup_pdelta = norm_pdelta(f, 0, D).value;
  return out;
}

Field PacketDecomposition::reconstruct() const {
  const std::int64_t N = original.N;
  std::vector<cplx> spec(static_cast<std::size_t>(N * N));
  for (const auto &L : levels) {
    const auto s = L.f.spectrum();
    for (std::size_t i = 0; i < s.size(); ++i)
      spec[i] += L.lambda * s[i];
  }
  Field f(N);
  f.v = inverse(std::move(spec), N);
  return f;
}

double PacketDecomposition::relative_error() const {
  const Field r = reconstruct();
  NeumaierSum e;
  for (std::size_t i = 0; i < r.v.size(); ++i)
    e.add(std::norm(r.v[i] - original.v[i]));
  const double base = original.l2();
  return base > 0 ? std::sqrt(e.value()) / base : std::sqrt(e.value());
}

std::vector<DecompositionCheck> PacketDecomposition::check(const std::vector<double> &ps) const {
  if (levels.empty())
    return {};
  const PacketDesign &D = levels.front().f.design();
  const auto whole = norm_pdelta_many(original, ps, D);
  const double vol = std::pow(static_cast<double>(original.N), 1.5);
  std::vector<DecompositionCheck> out(ps.size() * levels.size());
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const Level &L = levels[l];
    auto spec = L.f.spectrum();
    for (auto &z : spec)
      z *= L.lambda;
    const auto mid = pdelta_from_spectrum(spec, ps, D);
    std::size_t cmax = 0, cmin = SIZE_MAX;
    for (auto n : L.f.plate_counts())
      if (n > 0) {
        cmax = std::max(cmax, n);
        cmin = std::min(cmin, n);
      }
    for (std::size_t j = 0; j < ps.size(); ++j) {
      DecompositionCheck &c = out[j * levels.size() + l];
      c.p = ps[j];
      c.lambda = L.lambda;
      c.count = L.f.size();
      c.cap_max = cmax;
      c.cap_min = cmin;
      c.lhs = std::pow(L.lambda, c.p) * vol * static_cast<double>(c.count);
      c.middle = std::pow(mid[j].value, c.p);
      c.rhs = std::pow(whole[j].value, c.p);
      c.lower_constant = c.lhs / c.middle;
      c.upper_constant = c.middle / c.rhs;
    }
  }
  return out;
}

} // namespace declab::packets
