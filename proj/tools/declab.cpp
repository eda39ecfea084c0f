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

// declab command line: one subcommand per module plus `sweep`, which runs
// named experiments from the registry. Exit status 0 means every graded
// check passed, 1 means some check failed, 2 means bad usage or an error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "declab/decoupling.hpp"
#include "declab/diophantine.hpp"
#include "declab/energy.hpp"
#include "declab/errors.hpp"
#include "declab/exp_sums.hpp"
#include "declab/experiments.hpp"
#include "declab/lattice_sets.hpp"
#include "declab/wavepackets.hpp"

namespace fs = std::filesystem;
using namespace declab;
using exp::CsvFile;
using exp::format_double;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string h_policy = "nyquist";
  std::string out = "declab-out";
  std::string config;
  exp::ExperimentConfig file; // contents of --config
};

void write_csv(const Globals &g, const CsvFile &csv) {
  fs::create_directories(g.out);
  const auto path = fs::path(g.out) / csv.name;
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot write " + path.string());
  out << csv.text();
  std::cout << "wrote " << path.string() << " (" << csv.rows.size() << " rows)\n";
}

std::string slope_cell(const std::vector<std::pair<double, double>> &pts) {
  if (pts.size() < 4)
    return "nan";
  return format_double(energy::exponent_fit(pts).slope);
}

Rational delta_of(std::int64_t N) {
  if (N < 1 || (N & (N - 1)) != 0)
    throw PreconditionError("N must be a power of two");
  return Rational(1, N * N);
}

// ---------------------------------------------------------------- lattice

struct LatticeOpts {
  std::string family = "paraboloid";
  int n = 2;
  std::int64_t size = 4;
  double R = 16;
  std::string caps_delta;
};

int cmd_lattice(const Globals &g, const LatticeOpts &o) {
  PointSet pts;
  lattice::Surface surface = lattice::Surface::paraboloid;
  if (o.family == "paraboloid") {
    pts = lattice::paraboloid_lattice(o.n, o.size);
  } else if (o.family == "sphere") {
    surface = lattice::Surface::sphere;
    pts = lattice::sphere_lattice(o.n, o.size);
  } else if (o.family == "annulus") {
    surface = lattice::Surface::annulus;
    pts = lattice::annulus_lattice(o.R);
  } else if (o.family == "cone") {
    surface = lattice::Surface::cone;
    pts = lattice::cone_lattice(o.size);
  } else {
    throw PreconditionError("unknown family '" + o.family + "'");
  }
  fs::create_directories(g.out);
  const auto path = fs::path(g.out) / ("lattice_" + o.family + ".txt");
  std::ofstream out(path);
  lattice::write_points(out, pts, surface);
  std::cout << o.family << ": " << pts.size() << " points -> " << path.string() << "\n";
  if (!o.caps_delta.empty()) {
    const Rational d = Rational::parse(o.caps_delta);
    const auto caps = lattice::cap_partition(o.n, d);
    std::cout << "cap_partition(n=" << o.n << ", delta=" << d.str() << "): " << caps.size() << " caps\n";
    if (o.family == "paraboloid") {
      const auto a = lattice::assign_to_caps(lattice::rescale_paraboloid_lattice(pts, o.size), caps);
      std::size_t nonempty = 0;
      for (const auto &f : a.fibers)
        nonempty += !f.empty();
      std::cout << "rescaled points in " << nonempty << " nonempty fibers, " << a.uncovered.size() << " uncovered\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------- norms

struct NormOpts {
  int n = 2;
  std::int64_t N = 8;
  std::vector<double> ps{2, 4, 6};
  std::string R = "torus";
  bool random = false;
};

int cmd_norms(const Globals &g, const NormOpts &o) {
  const PointSet pts = lattice::paraboloid_lattice(o.n, o.N);
  exp::PortableRng rng(g.seed);
  std::vector<expsum::cplx> a(pts.size(), expsum::cplx(1, 0));
  if (o.random)
    for (auto &z : a)
      z = expsum::cplx(rng.gaussian(), rng.gaussian());
  const auto f = expsum::TrigPoly::with_coefficients(pts, a);
  CsvFile csv{"norms.csv", {"n", "p", "R", "h", "value", "value_at_h_half"}, {}};
  for (double p : o.ps) {
    if (o.R == "torus") {
      // Grid of at least ceil(p) * span + 1 points, and twice that.
      const double v1 = std::pow(expsum::torus_mean_power(f, p), 1.0 / p);
      const double v2 = std::pow(expsum::torus_mean_power(f, p, 2 * (static_cast<std::size_t>(std::ceil(p)) * 2 * o.N + 1)), 1.0 / p);
      csv.add({std::to_string(o.n), format_double(p), "torus", "grid", format_double(v1), format_double(v2)});
    } else {
      const double R = std::stod(o.R);
      const auto box = expsum::Box::cube(o.n, R, 0.0);
      const double h = expsum::policy_spacing(f, expsum::parse_h_policy(g.h_policy));
      csv.add({std::to_string(o.n), format_double(p), format_double(R), format_double(h),
               format_double(expsum::lp_norm_box(f, p, box, h)), format_double(expsum::lp_norm_box(f, p, box, h / 2))});
    }
  }
  write_csv(g, csv);
  return 0;
}

// ---------------------------------------------------------------- energy

struct EnergyOpts {
  std::string family = "parabola";
  int k = 2;
  std::vector<std::int64_t> sizes{8, 16, 32, 64};
};

int cmd_energy(const Globals &g, const EnergyOpts &o) {
  CsvFile csv{"energy.csv", {"family", "size_parameter", "points", "k", "energy", "slope_so_far"}, {}};
  std::vector<std::pair<double, double>> sweep;
  for (auto s : o.sizes) {
    PointSet pts;
    if (o.family == "parabola") {
      for (std::int64_t j = -s; j <= s; ++j)
        pts.push_back(FreqPoint::from_ints({j, j * j}));
    } else if (o.family == "paraboloid-random") {
      const auto hs = std::max<std::int64_t>(32, static_cast<std::int64_t>(std::ceil(4 * std::sqrt(double(s)))));
      pts = energy::random_paraboloid_sample(static_cast<std::size_t>(s), hs, g.seed + static_cast<std::uint64_t>(s));
    } else if (o.family == "annulus") {
      pts = lattice::annulus_lattice(static_cast<double>(s));
    } else if (o.family == "sphere") {
      pts = lattice::sphere_lattice(3, s);
    } else {
      throw PreconditionError("unknown family '" + o.family + "'");
    }
    const BigInt e = o.k == 3 ? energy::energy3(pts) : energy::additive_energy(pts, o.k);
    sweep.emplace_back(static_cast<double>(pts.size()), e.convert_to<double>());
    csv.add({o.family, std::to_string(s), std::to_string(pts.size()), std::to_string(o.k), e.str(), slope_cell(sweep)});
    std::cout << o.family << " " << s << ": |Lambda| = " << pts.size() << ", E_" << o.k << " = " << e.str() << "\n";
  }
  write_csv(g, csv);
  return 0;
}

// ---------------------------------------------------------------- dioph

struct DiophOpts {
  std::string system = "linear";
  int k = 3;
  std::string C = "1";
  std::vector<std::int64_t> Ns{16, 32, 64, 128};
};

int cmd_dioph(const Globals &g, const DiophOpts &o) {
  const auto sys = o.system == "linear" ? dioph::System::linear : dioph::System::quadratic;
  if (o.system != "linear" && o.system != "quadratic")
    throw PreconditionError("system must be linear or quadratic");
  const Rational C = Rational::parse(o.C);
  CsvFile csv{"dioph.csv", {"system", "k", "C", "N", "count", "diagonal", "in_theorem", "slope_so_far"}, {}};
  std::vector<std::pair<double, double>> sweep;
  for (auto N : o.Ns) {
    const BigInt c = dioph::count_perturbed(sys, N, o.k, C);
    sweep.emplace_back(static_cast<double>(N), c.convert_to<double>());
    csv.add({o.system, std::to_string(o.k), C.str(), std::to_string(N), c.str(), dioph::diagonal_count(N).str(),
             dioph::in_theorem(sys, o.k) ? "1" : "0", slope_cell(sweep)});
    std::cout << o.system << " k=" << o.k << " N=" << N << ": " << c.str() << "\n";
  }
  write_csv(g, csv);
  return 0;
}

// ---------------------------------------------------------------- decouple

struct DecoupleOpts {
  std::string surface = "paraboloid";
  double p = 6;
  std::vector<std::int64_t> Ns{8, 16, 32};
  int draws = 32;
};

int cmd_decouple(const Globals &g, const DecoupleOpts &o) {
  CsvFile csv{"decoupling.csv",
              {"surface", "n", "p", "delta", "family", "lhs", "rhs", "ratio", "theo_exponent", "fitted_exponent", "h",
               "seed"},
              {}};
  std::vector<decouple::DecouplingReport> reps;
  std::vector<std::pair<double, double>> sweep;
  for (auto N : o.Ns) {
    const Rational d = delta_of(N);
    double best = 0;
    if (o.surface == "cone") {
      auto r = decouple::cone_unit_ratio(o.p, d).report;
      r.seed = g.seed;
      best = r.ratio;
      reps.push_back(r);
    } else if (o.surface == "paraboloid") {
      for (const auto &r : decouple::lower_bound_witness(2, o.p, d, g.seed, o.draws).families) {
        best = std::max(best, r.ratio);
        reps.push_back(r);
      }
    } else {
      throw PreconditionError("surface must be paraboloid or cone");
    }
    sweep.emplace_back(1.0 / d.to_double(), best);
    std::cout << o.surface << " delta=" << d.str() << ": max ratio " << format_double(best) << "\n";
  }
  const std::string fitted = slope_cell(sweep);
  for (const auto &r : reps)
    csv.add({std::string(lattice::surface_tag(r.surface)), std::to_string(r.n), format_double(r.p),
             format_double(r.delta), r.family, format_double(r.lhs), format_double(r.rhs), format_double(r.ratio),
             format_double(r.theo_exponent), fitted, format_double(r.h), std::to_string(r.seed)});
  write_csv(g, csv);
  return 0;
}

// ---------------------------------------------------------------- packets

struct PacketOpts {
  std::int64_t N = 256;
  int M = 4;
  std::vector<double> ps{2, 4, 6};
};

int cmd_packets(const Globals &g, const PacketOpts &o) {
  auto design = std::make_shared<packets::PacketDesign>(o.N, o.M);
  const auto f = packets::random_adelta_field(o.N, g.seed);
  const auto dec = packets::wave_packet_decompose(f, design);
  CsvFile csv{"decomposition.csv", {"seed", "p", "lambda", "packets", "cap_max", "cap_min", "lhs", "middle", "rhs"}, {}};
  for (const auto &r : dec.check(o.ps))
    csv.add({std::to_string(g.seed), format_double(r.p), format_double(r.lambda), std::to_string(r.count),
             std::to_string(r.cap_max), std::to_string(r.cap_min), format_double(r.lhs), format_double(r.middle),
             format_double(r.rhs)});
  std::cout << dec.levels.size() << " levels, relative error " << format_double(dec.relative_error()) << "\n";
  write_csv(g, csv);
  return 0;
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(const Globals &g, std::vector<std::string> names, bool all) {
  if (all) {
    names.clear();
    for (const auto &e : exp::registry())
      names.push_back(e.name);
  }
  if (names.empty() && g.file.has("experiment"))
    names.push_back(g.file.experiment());
  if (names.empty())
    throw PreconditionError("sweep needs experiment names, --all, or a config with an experiment key");
  bool ok = true;
  for (const auto &name : names) {
    const auto &info = exp::find_experiment(name);
    exp::ExperimentConfig cfg;
    // Config-file keys apply when they belong to this experiment.
    const auto defaults = exp::ExperimentConfig::parse(info.defaults);
    for (const auto &[k, v] : g.file.items())
      if (defaults.has(k))
        cfg.set(k, v);
    cfg.set("experiment", name);
    cfg.set("seed", std::to_string(g.seed));
    cfg.set("h_policy", g.h_policy);
    const auto res = exp::run_experiment(cfg);
    exp::write_outputs(res, g.out);
    std::cout << (res.graded ? (res.pass() ? "PASS " : "FAIL ") : "PROBE ") << name << "  ("
              << format_double(std::round(res.seconds * 10) / 10) << " s)\n";
    for (const auto &gr : res.grades)
      std::cout << "    " << (res.graded ? (gr.pass ? "ok   " : "FAIL ") : "info ") << gr.name << ": " << gr.detail
                << "\n";
    ok = ok && res.pass();
  }
  return ok ? 0 : 1;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"declab: desk-scale experiments on decoupling, restriction and additive energy"};
  app.require_subcommand(1);
  Globals g;
  auto *seed_opt = app.add_option("--seed", g.seed, "seed for every randomized step");
  auto *h_opt = app.add_option("--h-policy", g.h_policy, "quadrature spacing: nyquist, half or quarter");
  auto *out_opt = app.add_option("--out", g.out, "output directory");
  app.add_option("--config", g.config, "flat key = value file");

  LatticeOpts lo;
  auto *lat = app.add_subcommand("lattice", "enumerate a lattice family and optionally a cap partition");
  lat->add_option("--family", lo.family, "paraboloid, sphere, annulus or cone");
  lat->add_option("--n", lo.n, "dimension");
  lat->add_option("--size", lo.size, "N for paraboloid, lambda for sphere, K for cone");
  lat->add_option("--R", lo.R, "annulus radius");
  lat->add_option("--caps", lo.caps_delta, "also build cap_partition at this delta (e.g. 1/64)");

  NormOpts no;
  auto *nor = app.add_subcommand("norms", "Lp norms of the lattice paraboloid sum on the torus or a cube");
  nor->add_option("--n", no.n, "dimension");
  nor->add_option("--N", no.N, "lattice size");
  nor->add_option("--p", no.ps, "exponents")->delimiter(',');
  nor->add_option("--R", no.R, "cube side, or 'torus'");
  nor->add_flag("--random", no.random, "seeded Gaussian coefficients instead of ones");

  EnergyOpts eo;
  auto *ene = app.add_subcommand("energy", "additive energies over a size sweep");
  ene->add_option("--family", eo.family, "parabola, paraboloid-random, annulus or sphere");
  ene->add_option("--k", eo.k, "energy order");
  ene->add_option("--sizes", eo.sizes, "size parameters, comma separated")->delimiter(',');

  DiophOpts dopts;
  auto *dio = app.add_subcommand("dioph", "solution counts of the perturbed systems");
  dio->add_option("--system", dopts.system, "linear or quadratic");
  dio->add_option("--k", dopts.k, "power in the perturbed equation");
  dio->add_option("--C", dopts.C, "window constant (rational)");
  dio->add_option("--N", dopts.Ns, "dyadic N values")->delimiter(',');

  DecoupleOpts co;
  auto *dec = app.add_subcommand("decouple", "decoupling ratios of witness families");
  dec->add_option("--surface", co.surface, "paraboloid or cone");
  dec->add_option("--p", co.p, "exponent");
  dec->add_option("--N", co.Ns, "delta^{-1/2} values (powers of two)")->delimiter(',');
  dec->add_option("--draws", co.draws, "random-sign draws");

  PacketOpts po;
  auto *pac = app.add_subcommand("packets", "wave-packet decomposition of a seeded random field");
  pac->add_option("--N", po.N, "grid side, a power of 4");
  pac->add_option("--M", po.M, "envelope exponent");
  pac->add_option("--p", po.ps, "exponents for the level bounds")->delimiter(',');

  std::vector<std::string> names;
  bool all = false;
  auto *swp = app.add_subcommand("sweep", "run registered experiments and grade them");
  swp->add_option("names", names, "experiment names");
  swp->add_flag("--all", all, "run every registered experiment");
  swp->add_flag_callback("--list", [] {
    for (const auto &e : exp::registry())
      std::cout << e.name << (e.graded ? "" : " (open-question probe)") << "\n    " << e.anchor << "\n";
    std::exit(0);
  }, "list experiments and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (!g.config.empty()) {
      g.file = exp::ExperimentConfig::load(g.config);
      // Command-line flags win over the file.
      if (seed_opt->count() == 0 && g.file.has("seed"))
        g.seed = g.file.seed();
      if (h_opt->count() == 0 && g.file.has("h_policy"))
        g.h_policy = g.file.get("h_policy");
      if (out_opt->count() == 0 && g.file.has("out"))
        g.out = g.file.get("out");
    }
    expsum::parse_h_policy(g.h_policy);
    if (*lat)
      return cmd_lattice(g, lo);
    if (*nor)
      return cmd_norms(g, no);
    if (*ene)
      return cmd_energy(g, eo);
    if (*dio)
      return cmd_dioph(g, dopts);
    if (*dec)
      return cmd_decouple(g, co);
    if (*pac)
      return cmd_packets(g, po);
    if (*swp)
      return cmd_sweep(g, names, all);
  } catch (const declab::Error &e) {
    std::cerr << "declab: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "declab: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
