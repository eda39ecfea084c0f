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

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "declab/exp_sums.hpp"
#include "declab/lattice_sets.hpp"

// Wave packets for the parabola on the discrete torus (Z/N)^2 at scale
// delta = 1/N. Frequencies are DFT bins k = (k1, k2) with xi = k/N, so the
// neighbourhood A_delta is |k2 - k1^2/N| <= 1.
namespace declab::packets {

using cplx = std::complex<double>;

// Samples on (Z/N)^2, row-major in (x1, x2).
struct Field {
  std::int64_t N = 0;
  std::vector<cplx> v;

  Field() = default;
  explicit Field(std::int64_t n) : N(n), v(static_cast<std::size_t>(n * n)) {}
  cplx &at(std::int64_t x1, std::int64_t x2) { return v[static_cast<std::size_t>(x1 * N + x2)]; }
  const cplx &at(std::int64_t x1, std::int64_t x2) const { return v[static_cast<std::size_t>(x1 * N + x2)]; }
  double l2() const;
};

// Throws unless N = 4^j with N >= 16.
void check_scale(std::int64_t N);

// f sampled at the integer points; frequencies must lie in (1/N) Z^2.
Field from_trig_poly(const expsum::TrigPoly &f, std::int64_t N);
// Seeded complex Gaussian coefficients on every bin of A_delta.
Field random_adelta_field(std::int64_t N, std::uint64_t seed);
// Zeroes every DFT bin outside A_delta.
Field restrict_to_adelta(const Field &f);

// Cap of P_{1/N} with index m, centred at k1 = m sqrt(N)/2, m in [-sqrt N, sqrt N].
struct Tube {
  int cap = 0;                 // m
  std::array<double, 2> center{};
  std::array<double, 2> axis{}; // unit long axis, the cap normal at its centre
  double width = 0;            // N^{1/2}
  double length = 0;           // N
};

// Per-scale data shared by all packets: the frequency windows, packet
// profiles psi_m and the sampling lattices.
//
// Window m is a partition of unity in k1 with overlap 1/10 of the window
// spacing sqrt(N)/2. The packet multiplier psi_m^ equals 1 on the window's
// support inside A_delta and vanishes on every translate of it by the dual
// lattice generated by (sqrt N, m) and (0, 4); this gives the sampling
// identity g = (N^2/|Gamma|) sum_{y in Gamma} g(y) psi_m(. - y) for each
// windowed piece g. Gamma has 4 sqrt(N) points.
class PacketDesign {
public:
  PacketDesign(std::int64_t N, int M);

  std::int64_t N() const { return N_; }
  int M() const { return M_; }
  std::int64_t root() const { return root_; }
  int cap_count() const { return static_cast<int>(2 * root_ + 1); }
  int cap_min() const { return static_cast<int>(-root_); }

  double window(int m, std::int64_t k1) const;
  double multiplier(int m, std::int64_t k1, std::int64_t k2) const;
  // Bins with nonzero multiplier, as (k1, k2) with k1 unwrapped.
  const std::vector<std::array<std::int64_t, 2>> &multiplier_support(int m) const;
  const std::vector<cplx> &profile(int m) const; // psi_m on the grid
  double profile_peak(int m) const;              // psi_m(0) = max |psi_m|
  // Sampling lattice of window m, in [0,N)^2.
  const std::vector<std::array<std::int64_t, 2>> &lattice(int m) const;
  double sampling_factor() const; // N^2 / |Gamma|
  Tube tube(int m, std::array<std::int64_t, 2> y) const;
  const lattice::Cap &cap(int m) const;

  // phi_T(x) = (1 + |A_T(x - y)|^2)^{-M}, A_T the affine map sending T to
  // the unit cube; maximized over the nine nearest torus images.
  double envelope(int m, std::int64_t d1, std::int64_t d2) const;
  // max_x |psi_m(x)| / (psi_m(0) phi_T(x)) over the grid.
  double envelope_excess(int m) const;
  // (sum_x |psi_m/psi_m(0)|^p)^{1/p}; p = 0 means the sup.
  double profile_norm(int m, double p) const;

  // Cap index of bin k1 under the partition of assign_to_caps (smallest
  // containing centre), -1 if (k1, k2) is outside every cap.
  int cap_of_bin(std::int64_t k1, std::int64_t k2) const;

private:
  std::int64_t N_;
  int M_;
  std::int64_t root_;
  std::vector<lattice::Cap> caps_;
  std::vector<std::vector<std::array<std::int64_t, 2>>> support_, lattice_;
  std::vector<std::vector<cplx>> profile_;
  std::vector<double> peak_;
  mutable std::vector<double> excess_;
  mutable std::map<std::pair<int, double>, double> norms_;
};

struct Packet {
  int cap = 0;
  std::array<std::int64_t, 2> y{}; // lattice point
  cplx coeff;                       // f_T = coeff psi_m(x - y)
};

struct InvariantReport {
  double envelope_excess = 0; // max over packets and grid of |f_T| / phi_T
  bool envelope_ok = false;   // envelope_excess <= 1
  double size_min = 0;        // min over packets and p of ||f_T||_p / |T|^{1/p}
  double size_max = 0;
  bool size_ok = false;       // within [1/8, 8]
  double leakage = 0;         // multiplier mass outside the packet's cap
  bool leakage_ok = false;
  int max_overlap = 0;        // max tubes of one cap through a grid point
  bool separation_ok = false;
};

// f = sum_T f_T with f_T = coeff_T psi_m(. - y_T).
class NFunction {
public:
  NFunction() = default;
  explicit NFunction(std::shared_ptr<const PacketDesign> design) : design_(std::move(design)) {}

  const PacketDesign &design() const { return *design_; }
  std::shared_ptr<const PacketDesign> design_ptr() const { return design_; }
  const std::vector<Packet> &packets() const { return packets_; }
  std::size_t size() const { return packets_.size(); } // |H(f)|
  void add(Packet p);

  double amplitude(const Packet &p) const;
  std::vector<std::size_t> plate_counts() const; // |H(f, theta)| per cap
  Field synthesize() const;
  std::vector<cplx> spectrum() const; // DFT of synthesize(), row-major bins
  InvariantReport verify() const;

private:
  std::shared_ptr<const PacketDesign> design_;
  std::vector<Packet> packets_;
};

// Declared bound on tubes of one orientation through a point.
inline constexpr int kTubeOverlap = 8;

struct PDeltaNorm {
  double value = 0;
  double unsupported_mass = 0; // relative l2 mass outside every cap
};
// (sum_theta ||f_theta||_p^2)^{1/2}, f_theta the sharp Fourier restriction
// to the cap cells; ||g||_p = (sum_x |g(x)|^p)^{1/p}, p = 0 the sup.
PDeltaNorm norm_pdelta(const Field &f, double p, const PacketDesign &design);
std::vector<PDeltaNorm> norm_pdelta_many(const Field &f, const std::vector<double> &ps, const PacketDesign &design);

// Packets with prescribed plate counts per cap (index m - cap_min()),
// unit amplitude and seeded phases; throws when a count exceeds the
// 4 sqrt(N) lattice points of its cap.
NFunction synth_nfunction(std::shared_ptr<const PacketDesign> design, const std::vector<std::size_t> &counts,
                          std::uint64_t seed);

bool is_balanced(const NFunction &f);
// A balanced input is returned as is; otherwise caps are grouped by dyadic
// plate-count range. Outputs partition the packets.
std::vector<NFunction> balanced_split(const NFunction &f);

struct Level {
  double lambda = 0; // dyadic; lambda <= a_T < 2 lambda
  NFunction f;       // packets scaled by 1/lambda
};

struct DecompositionCheck {
  double p = 0;
  double lambda = 0;
  std::size_t count = 0;
  std::size_t cap_max = 0, cap_min = 0; // over nonempty caps
  double lhs = 0;        // lambda^p N^{3/2} |H(f_lambda)|
  double middle = 0;     // ||lambda f_lambda||_{p,delta}^p
  double rhs = 0;        // ||f||_{p,delta}^p
  double lower_constant = 0; // lhs / middle
  double upper_constant = 0; // middle / rhs
};

struct PacketDecomposition {
  Field original;
  std::vector<Level> levels; // decreasing lambda
  double sup_pdelta = 0;     // ||f||_{infty,delta}
  double max_amplitude = 0;

  Field reconstruct() const; // sum_lambda lambda f_lambda
  double relative_error() const;
  // Rows for every level and every p, p-major.
  std::vector<DecompositionCheck> check(const std::vector<double> &ps) const;
};

// Amplitudes below 1e-14 of the largest are dropped.
PacketDecomposition wave_packet_decompose(const Field &f, std::shared_ptr<const PacketDesign> design);

} // namespace declab::packets
