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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "declab/sweep.hpp"

namespace declab::exp {

// Flat "key = value" text, one pair per line; '#' starts a comment line.
// Keys are [a-z0-9_]+, values carry no newline and no surrounding blanks,
// so parse(to_text()) reproduces the map exactly.
class ExperimentConfig {
public:
  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path &path);
  std::string to_text() const; // sorted by key

  void set(const std::string &key, const std::string &value);
  bool has(const std::string &key) const { return kv_.count(key) != 0; }
  const std::string &get(const std::string &key) const; // throws if absent
  double get_double(const std::string &key) const;
  std::int64_t get_int(const std::string &key) const;
  std::uint64_t get_uint(const std::string &key) const;
  // "a,b,c" or the dyadic range "2^i..2^j" (both ends included).
  std::vector<std::int64_t> get_int_list(const std::string &key) const;
  std::vector<double> get_double_list(const std::string &key) const;

  // Keys of `other` override the ones here.
  void merge(const ExperimentConfig &other);
  const std::map<std::string, std::string> &items() const { return kv_; }
  bool operator==(const ExperimentConfig &o) const { return kv_ == o.kv_; }

  std::string experiment() const { return has("experiment") ? get("experiment") : std::string(); }
  std::uint64_t seed() const { return has("seed") ? get_uint("seed") : 1; }

private:
  std::map<std::string, std::string> kv_;
};

struct Grade {
  std::string name;
  std::string detail;
  bool pass = false;
};

struct CsvFile {
  std::string name; // file name inside the output directory
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  std::string text() const;
};

struct ExperimentResult {
  std::string name;
  std::string anchor;
  bool graded = true; // false for open-question probes
  ExperimentConfig config;
  std::vector<SweepReport> sweeps;
  std::vector<Grade> grades;
  std::vector<CsvFile> csv;
  double seconds = 0; // wall time; reported in the summary only

  bool pass() const; // every grade passed (probes always pass)
  std::string summary() const;
};

struct ExperimentInfo {
  std::string name;
  std::string anchor;
  bool graded = true;
  std::string defaults; // config text
  std::function<void(const ExperimentConfig &, ExperimentResult &)> run;
};

const std::vector<ExperimentInfo> &registry();
// Throws PreconditionError for an unknown name.
const ExperimentInfo &find_experiment(std::string_view name);

// Merges the experiment's defaults under `config` (which must name the
// experiment) and runs it. Keys that the experiment does not know are
// rejected.
ExperimentResult run_experiment(const ExperimentConfig &config);

// <dir>/<name>/{*.csv, *.gp, summary.txt, config.txt}.
void write_outputs(const ExperimentResult &result, const std::filesystem::path &dir);

// Fixed formatting shared by every CSV writer.
std::string format_double(double x);

// mt19937_64 with fixed mappings to uniforms and Gaussians (Box-Muller),
// so draws agree across standard libraries, unlike the std distributions.
struct PortableRng {
  explicit PortableRng(std::uint64_t seed);
  std::uint64_t next();
  double uniform();                        // [0, 1)
  std::uint64_t below(std::uint64_t bound); // [0, bound)
  double gaussian();

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0;
};

} // namespace declab::exp
