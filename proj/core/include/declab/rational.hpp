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

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace declab {

// Exact rational with 64-bit numerator and denominator. Every operation
// normalizes (gcd, positive denominator) and throws OverflowError rather
// than rounding, so set membership never depends on floating point.
class Rational {
public:
  constexpr Rational() = default;
  Rational(std::int64_t num); // NOLINT: implicit from integers is intended
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  bool is_integer() const noexcept { return den_ == 1; }
  double to_double() const noexcept;
  long double to_long_double() const noexcept;
  std::string str() const;

  // Accepts "p", "-p", "p/q".
  static Rational parse(std::string_view text);
  // Exact conversion of a binary double; throws if the value needs more
  // than 62 bits of denominator.
  static Rational from_double(double v);

  Rational operator-() const;
  Rational &operator+=(const Rational &o);
  Rational &operator-=(const Rational &o);
  Rational &operator*=(const Rational &o);
  Rational &operator/=(const Rational &o);

  friend Rational operator+(Rational a, const Rational &b) { return a += b; }
  friend Rational operator-(Rational a, const Rational &b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational &b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational &b) { return a /= b; }

  friend bool operator==(const Rational &a, const Rational &b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational &a, const Rational &b) noexcept;

  Rational abs() const { return num_ < 0 ? -*this : *this; }
  std::int64_t floor() const noexcept;
  std::int64_t ceil() const noexcept;

private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::ostream &operator<<(std::ostream &os, const Rational &r);

// A frequency vector with exact rational coordinates.
struct FreqPoint {
  std::vector<Rational> coords;

  FreqPoint() = default;
  explicit FreqPoint(std::vector<Rational> c) : coords(std::move(c)) {}
  static FreqPoint from_ints(std::initializer_list<std::int64_t> v);
  static FreqPoint from_ints(const std::vector<std::int64_t> &v);

  int n() const noexcept { return static_cast<int>(coords.size()); }
  const Rational &operator[](std::size_t i) const { return coords[i]; }
  Rational &operator[](std::size_t i) { return coords[i]; }
  bool is_integer() const noexcept;
  std::vector<double> to_doubles() const;
  std::string str() const;

  friend bool operator==(const FreqPoint &a, const FreqPoint &b) = default;
  friend auto operator<=>(const FreqPoint &a, const FreqPoint &b) = default;
};

FreqPoint operator+(const FreqPoint &a, const FreqPoint &b);
FreqPoint operator-(const FreqPoint &a, const FreqPoint &b);

struct FreqPointHash {
  std::size_t operator()(const FreqPoint &p) const noexcept;
};

using PointSet = std::vector<FreqPoint>;

// Flat integer copy of a point set, used by the counting kernels.
struct IntPoints {
  int n = 0;
  std::vector<std::int64_t> coords; // row-major, size() == n * count

  std::size_t size() const noexcept { return n == 0 ? 0 : coords.size() / n; }
  const std::int64_t *operator[](std::size_t i) const { return coords.data() + i * n; }
};

// Throws PreconditionError when some coordinate is not an integer.
IntPoints to_int_points(const PointSet &points);

} // namespace declab
