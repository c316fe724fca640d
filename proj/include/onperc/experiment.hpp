#pragma once

// Experiment orchestration: named recipes, parameter grids, worker pool,
// CSV/manifest emission, and recipe verdicts.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "onperc/lattice.hpp"
#include "onperc/sampler.hpp"
#include "onperc/spin.hpp"
#include "onperc/stats.hpp"

namespace onp {

struct ExperimentSpec {
  std::string recipe = "custom";
  LatticeKind kind = LatticeKind::triangular;
  int n = 3;
  Variant variant = Variant::standard;
  std::vector<double> beta_values{1.0};
  std::vector<double> epsilon_values;  // empty unless cut/richard
  double b = 0.0;                      // richard amplitude bound
  std::vector<int> L_values{16};
  double dilution = 0.0;
  long thermalization = 2000;
  long measurement = 20000;
  long interval = 10;  // sweeps between measurements
  int cluster_every = 1;  // embedded update every k-th sweep, 0 = off
  StartKind start = StartKind::hot;
  uint64_t seed = 1;
  int n_blocks = 20;
  int workers = 1;
  std::vector<double> c_values{0.0, 0.2, 0.4};
  bool emit_two_point = false;
  bool debug_checks = false;  // re-verify constraints after every sweep
  std::string output_dir = "out";

  long n_configs() const { return measurement / interval; }
  void validate() const;
};

// named defaults; "custom" returns the baseline spec
ExperimentSpec recipe_defaults(const std::string& recipe);

// flat sectioned key = value text, comma lists for grids
ExperimentSpec parse_experiment_file(const std::string& path);
void apply_override(ExperimentSpec& spec, const std::string& key,
                    const std::string& value);

struct GridPoint {
  ModelParams params;
  int L = 0;
  double dilution = 0.0;
  std::string label;
};

struct Verdict {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct PointSummary {
  GridPoint point;
  uint64_t chain_seed = 0, mask_seed = 0;
  bool failed = false;
  std::string error;
  double seconds = 0.0;
  long n_configs = 0;
  double acceptance = 0.0;
  double delta = 0.0;
  long violations = 0;  // nonzero only with debug_checks
  std::map<std::string, std::vector<double>> series;
  std::map<std::string, Estimate> estimates;
  DiagnosticsReport diagnostics;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<PointSummary> points;
  std::vector<Verdict> verdicts;
  bool all_pass = true;
  std::string manifest_path;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

std::string format_g17(double v);  // fixed 17-significant-digit formatting

}  // namespace onp
