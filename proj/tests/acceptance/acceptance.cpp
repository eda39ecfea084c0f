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

// Acceptance run: one PASS/FAIL line per criterion, then the per-check
// detail. Runs every registered experiment at its default configuration,
// then reruns each with the same seed and compares the CSV bytes.
//
//   acceptance [--out DIR] [--only N]

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "declab/errors.hpp"
#include "declab/experiments.hpp"

using declab::exp::ExperimentConfig;
using declab::exp::ExperimentResult;

namespace {

struct Criterion {
  int id;
  const char *experiment; // nullptr for the determinism criterion
  const char *title;
};

const Criterion kCriteria[] = {
    {1, "energy-torus-identity", "exact energy/torus-moment identity"},
    {2, "parseval", "p = 2 discrete restriction ratio"},
    {3, "parabola-sixth-moment", "parabola sixth moment slope"},
    {4, "paraboloid-energy", "paraboloid E2 slope and quadruple structure"},
    {5, "annulus-energy", "annulus sectors and E3 slope"},
    {6, "diophantine", "perturbed systems: oracles and slopes"},
    {7, "decoupling", "paraboloid decoupling ratios"},
    {8, "cone", "cone sector ratios"},
    {9, "wave-packets", "wave-packet decomposition"},
    {10, nullptr, "seed determinism of every CSV"},
};

ExperimentResult run(const std::string &name) {
  ExperimentConfig c;
  c.set("experiment", name);
  c.set("seed", "1");
  return declab::exp::run_experiment(c);
}

std::string csv_bytes(const ExperimentResult &r) {
  std::string s;
  for (const auto &f : r.csv)
    s += "== " + f.name + "\n" + f.text();
  return s;
}

} // namespace

int main(int argc, char **argv) {
  std::filesystem::path out;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--out") && i + 1 < argc)
      out = argv[++i];
    else if (!std::strcmp(argv[i], "--only") && i + 1 < argc)
      only = std::atoi(argv[++i]);
    else {
      std::cerr << "usage: acceptance [--out DIR] [--only N]\n";
      return 2;
    }
  }

  std::map<std::string, ExperimentResult> first;
  std::vector<std::pair<int, bool>> verdicts;
  std::vector<std::string> details;

  for (const auto &cr : kCriteria) {
    if (!cr.experiment || (only && cr.id != only))
      continue;
    bool ok = false;
    try {
      ExperimentResult r = run(cr.experiment);
      ok = r.pass();
      if (!out.empty())
        declab::exp::write_outputs(r, out);
      std::string d;
      for (const auto &g : r.grades)
        d += std::string("    ") + (g.pass ? "ok   " : "FAIL ") + g.name + ": " + g.detail + "\n";
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.1f", r.seconds);
      details.push_back("criterion " + std::to_string(cr.id) + " (" + cr.experiment + ", " + buf + " s)\n" + d);
      std::cout << "criterion " << cr.id << ": " << (ok ? "PASS" : "FAIL") << "  " << cr.title << "\n" << std::flush;
      first.emplace(cr.experiment, std::move(r));
    } catch (const std::exception &e) {
      details.push_back("criterion " + std::to_string(cr.id) + ": error: " + e.what() + "\n");
      std::cout << "criterion " << cr.id << ": FAIL  " << cr.title << " (error: " << e.what() << ")\n" << std::flush;
    }
    verdicts.emplace_back(cr.id, ok);
  }

  if (only == 0 || only == 10) {
    // Every registered experiment, the ungraded probe included.
    bool same = true;
    std::string d;
    for (const auto &info : declab::exp::registry()) {
      try {
        auto it = first.find(info.name);
        if (it == first.end())
          it = first.emplace(info.name, run(info.name)).first;
        const bool eq = csv_bytes(it->second) == csv_bytes(run(info.name));
        same = same && eq;
        d += std::string("    ") + (eq ? "ok   " : "FAIL ") + info.name + ": rerun CSV " +
             (eq ? "byte-identical" : "differs") + "\n";
      } catch (const std::exception &e) {
        same = false;
        d += "    FAIL " + info.name + ": error: " + e.what() + "\n";
      }
    }
    details.push_back("criterion 10 (all experiments)\n" + d);
    std::cout << "criterion 10: " << (same ? "PASS" : "FAIL") << "  seed determinism of every CSV\n";
    verdicts.emplace_back(10, same);
  }

  std::cout << "\ndetails:\n";
  for (const auto &d : details)
    std::cout << d;
  int failed = 0;
  for (const auto &[id, ok] : verdicts)
    failed += !ok;
  std::cout << "\n" << verdicts.size() - failed << " of " << verdicts.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
