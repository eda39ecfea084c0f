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

#include "declab/rational.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "declab/bigint.hpp"
#include "declab/errors.hpp"

namespace declab {

namespace {

i128 gcd128(i128 a, i128 b) {
  if (a < 0)
    a = -a;
  if (b < 0)
    b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

void assign_reduced(i128 num, i128 den, std::int64_t &out_num, std::int64_t &out_den) {
  if (den == 0)
    throw PreconditionError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  constexpr i128 lim = static_cast<i128>(INT64_MAX);
  if (num > lim || num < -lim || den > lim)
    throw OverflowError("rational does not fit 64-bit numerator/denominator");
  out_num = static_cast<std::int64_t>(num);
  out_den = static_cast<std::int64_t>(den);
}

} // namespace

Rational::Rational(std::int64_t num) : num_(num), den_(1) {}

Rational::Rational(std::int64_t num, std::int64_t den) {
  assign_reduced(num, den, num_, den_);
}

double Rational::to_double() const noexcept {
  return static_cast<double>(static_cast<long double>(num_) / static_cast<long double>(den_));
}

long double Rational::to_long_double() const noexcept {
  return static_cast<long double>(num_) / static_cast<long double>(den_);
}

std::string Rational::str() const {
  if (den_ == 1)
    return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
  auto parse_int = [&](std::string_view s) {
    std::int64_t v = 0;
    if (!s.empty() && s.front() == '+')
      s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      throw PreconditionError("malformed rational: '" + std::string(text) + "'");
    return v;
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos)
    return Rational(parse_int(text));
  return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

Rational Rational::from_double(double v) {
  if (!std::isfinite(v))
    throw PreconditionError("cannot convert non-finite double to rational");
  int exp = 0;
  double mant = std::frexp(v, &exp); // v = mant * 2^exp, 0.5 <= |mant| < 1
  auto m = static_cast<std::int64_t>(std::ldexp(mant, 53));
  exp -= 53;
  while (m != 0 && (m % 2) == 0 && exp < 0) {
    m /= 2;
    ++exp;
  }
  if (exp >= 0) {
    if (exp > 62)
      throw OverflowError("double too large for rational");
    return Rational(checked_mul64(m, std::int64_t{1} << exp));
  }
  if (-exp > 62)
    throw OverflowError("double needs more than 62 denominator bits");
  return Rational(m, std::int64_t{1} << (-exp));
}

Rational Rational::operator-() const {
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

Rational &Rational::operator+=(const Rational &o) {
  if (den_ == o.den_) {
    assign_reduced(static_cast<i128>(num_) + o.num_, den_, num_, den_);
    return *this;
  }
  i128 n = static_cast<i128>(num_) * o.den_ + static_cast<i128>(o.num_) * den_;
  i128 d = static_cast<i128>(den_) * o.den_;
  assign_reduced(n, d, num_, den_);
  return *this;
}

Rational &Rational::operator-=(const Rational &o) { return *this += -o; }

Rational &Rational::operator*=(const Rational &o) {
  // Cross-reduce first so intermediate products stay small.
  std::int64_t g1 = std::gcd(num_, o.den_);
  std::int64_t g2 = std::gcd(o.num_, den_);
  if (g1 == 0)
    g1 = 1;
  if (g2 == 0)
    g2 = 1;
  i128 n = static_cast<i128>(num_ / g1) * (o.num_ / g2);
  i128 d = static_cast<i128>(den_ / g2) * (o.den_ / g1);
  assign_reduced(n, d, num_, den_);
  return *this;
}

Rational &Rational::operator/=(const Rational &o) {
  if (o.num_ == 0)
    throw PreconditionError("rational division by zero");
  Rational inv;
  inv.num_ = o.den_;
  inv.den_ = o.num_;
  if (inv.den_ < 0) {
    inv.den_ = -inv.den_;
    inv.num_ = -inv.num_;
  }
  return *this *= inv;
}

std::strong_ordering operator<=>(const Rational &a, const Rational &b) noexcept {
  i128 l = static_cast<i128>(a.num_) * b.den_;
  i128 r = static_cast<i128>(b.num_) * a.den_;
  if (l < r)
    return std::strong_ordering::less;
  if (l > r)
    return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::int64_t Rational::floor() const noexcept {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0)
    --q;
  return q;
}

std::int64_t Rational::ceil() const noexcept {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ > 0)
    ++q;
  return q;
}

std::ostream &operator<<(std::ostream &os, const Rational &r) { return os << r.str(); }

FreqPoint FreqPoint::from_ints(std::initializer_list<std::int64_t> v) {
  FreqPoint p;
  p.coords.reserve(v.size());
  for (auto x : v)
    p.coords.emplace_back(x);
  return p;
}

FreqPoint FreqPoint::from_ints(const std::vector<std::int64_t> &v) {
  FreqPoint p;
  p.coords.reserve(v.size());
  for (auto x : v)
    p.coords.emplace_back(x);
  return p;
}

bool FreqPoint::is_integer() const noexcept {
  for (const auto &c : coords)
    if (!c.is_integer())
      return false;
  return true;
}

std::vector<double> FreqPoint::to_doubles() const {
  std::vector<double> out;
  out.reserve(coords.size());
  for (const auto &c : coords)
    out.push_back(c.to_double());
  return out;
}

std::string FreqPoint::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < coords.size(); ++i)
    os << (i ? "," : "") << coords[i];
  os << ')';
  return os.str();
}

FreqPoint operator+(const FreqPoint &a, const FreqPoint &b) {
  if (a.n() != b.n())
    throw PreconditionError("dimension mismatch in FreqPoint sum");
  FreqPoint r = a;
  for (std::size_t i = 0; i < r.coords.size(); ++i)
    r.coords[i] += b.coords[i];
  return r;
}

FreqPoint operator-(const FreqPoint &a, const FreqPoint &b) {
  if (a.n() != b.n())
    throw PreconditionError("dimension mismatch in FreqPoint difference");
  FreqPoint r = a;
  for (std::size_t i = 0; i < r.coords.size(); ++i)
    r.coords[i] -= b.coords[i];
  return r;
}

std::size_t FreqPointHash::operator()(const FreqPoint &p) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (const auto &c : p.coords) {
    auto mix = [&](std::uint64_t v) {
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    };
    mix(static_cast<std::uint64_t>(c.num()));
    mix(static_cast<std::uint64_t>(c.den()));
  }
  return static_cast<std::size_t>(h);
}

IntPoints to_int_points(const PointSet &points) {
  IntPoints out;
  if (points.empty())
    return out;
  out.n = points.front().n();
  out.coords.reserve(points.size() * out.n);
  for (const auto &p : points) {
    if (p.n() != out.n)
      throw PreconditionError("mixed dimensions in point set");
    for (const auto &c : p.coords) {
      if (!c.is_integer())
        throw PreconditionError("integer coordinates required, got " + p.str());
      out.coords.push_back(c.num());
    }
  }
  return out;
}

} // namespace declab
