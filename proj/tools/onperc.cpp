// onperc.cpp — command line driver

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "onperc/checkpoint.hpp"
#include "onperc/experiment.hpp"
#include "onperc/fits.hpp"
#include "onperc/lattice.hpp"
#include "onperc/sampler.hpp"
#include "onperc/spin.hpp"
#include "onperc/stats.hpp"

namespace {

using namespace onp;

struct SimulateArgs {
  std::string kind = "triangular";
  int L = 32;
  int n = 3;
  std::string variant = "standard";
  double beta = 1.0;
  double epsilon = 2.0;
  double b = 0.0;
  double dilution = 0.0;
  long sweeps = 2000;
  long tune_sweeps = 500;
  int cluster_every = 1;
  uint64_t seed = 1;
  std::string start = "hot";
  std::string order = "checkerboard";
  std::string out = "out";
};

void drive_chain(Checkpoint& cp, const LatticeGraph& graph, long sweeps,
                 long tune_sweeps, int cluster_every) {
  for (long t = 0; t < sweeps; ++t) {
    cp.chain.tune_delta =
        cp.chain.tune_delta && (long)cp.chain.sweeps < tune_sweeps;
    const auto st = metropolis_sweep(cp.chain, cp.params, graph, cp.mask);
    tune_proposal_width(cp.chain, st);
    if (cluster_every > 0 && cp.chain.sweeps % cluster_every == 0)
      embedded_cluster_update(cp.chain, cp.params, graph, cp.mask);
    global_rotation_update(cp.chain, cp.params);
  }
}

void report_chain(const Checkpoint& cp, const LatticeGraph& graph) {
  const long present = graph.n_bonds() - cp.mask.removed_count();
  const double energy =
      total_action(cp.chain.config, graph, cp.params, cp.mask) / present;
  std::printf("sweeps %llu  acceptance %.4f  delta %.4f  energy %.6f\n",
              (unsigned long long)cp.chain.sweeps,
              cp.chain.total_proposals
                  ? double(cp.chain.total_accepts) / cp.chain.total_proposals
                  : 0.0,
              cp.chain.delta, energy);
}

int cmd_simulate(const SimulateArgs& a) {
  Checkpoint cp;
  cp.kind = lattice_kind_from_string(a.kind);
  cp.L = a.L;
  cp.params.n = a.n;
  cp.params.variant = variant_from_string(a.variant);
  cp.params.beta = a.beta;
  cp.params.epsilon = a.epsilon;
  cp.params.b = a.b;
  cp.params.validate();
  cp.master_seed = a.seed;

  const LatticeGraph graph = build_lattice(cp.kind, cp.L);
  cp.mask = full_mask(graph);
  if (a.dilution > 0.0) {
    Rng mask_rng(derive_seed(a.seed, 1));
    cp.mask = dilute_bonds(graph, a.dilution, mask_rng);
  }
  const StartKind start =
      a.start == "cold" ? StartKind::cold : StartKind::hot;
  cp.chain = init_chain(cp.params, graph, cp.mask, derive_seed(a.seed, 0),
                        start);
  cp.chain.order = a.order == "sequential" ? SweepOrder::sequential
                                           : SweepOrder::checkerboard;

  drive_chain(cp, graph, a.sweeps, a.tune_sweeps, a.cluster_every);

  std::filesystem::create_directories(a.out);
  save_checkpoint(a.out + "/checkpoint.bin", cp);
  report_chain(cp, graph);
  std::printf("checkpoint %s/checkpoint.bin\n", a.out.c_str());
  return 0;
}

struct ResumeArgs {
  std::string checkpoint;
  long sweeps = 1000;
  long tune_sweeps = 500;
  int cluster_every = 1;
  std::string out;  // default: directory of the checkpoint
};

int cmd_resume(const ResumeArgs& a) {
  Checkpoint cp = load_checkpoint(a.checkpoint);
  const LatticeGraph graph = build_lattice_unchecked(cp.kind, cp.L);
  drive_chain(cp, graph, a.sweeps, a.tune_sweeps, a.cluster_every);
  const std::string dir =
      a.out.empty()
          ? std::filesystem::path(a.checkpoint).parent_path().string()
          : a.out;
  const std::string base = dir.empty() ? "." : dir;
  std::filesystem::create_directories(base);
  save_checkpoint(base + "/checkpoint.bin", cp);
  report_chain(cp, graph);
  return 0;
}

struct AnalyzeArgs {
  std::string observables;
  std::string twopoint;
  int n_blocks = 20;
};

int cmd_analyze(const AnalyzeArgs& a) {
  if (!a.observables.empty()) {
    std::ifstream in(a.observables);
    if (!in) throw std::runtime_error("cannot open " + a.observables);
    std::string line;
    std::getline(in, line);  // header
    std::map<std::string, std::vector<double>> series;
    std::vector<std::string> order;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto c1 = line.find(',');
      const auto c2 = line.rfind(',');
      if (c1 == std::string::npos || c2 <= c1)
        throw std::runtime_error("bad observable row: " + line);
      const std::string name = line.substr(c1 + 1, c2 - c1 - 1);
      if (!series.count(name)) order.push_back(name);
      series[name].push_back(std::stod(line.substr(c2 + 1)));
    }
    std::printf("%-24s %12s %12s %8s %8s\n", "observable", "mean", "error",
                "tau", "n");
    for (const auto& name : order) {
      const auto& v = series[name];
      if ((int)v.size() < a.n_blocks) {
        std::printf("%-24s  (only %zu samples, skipped)\n", name.c_str(),
                    v.size());
        continue;
      }
      const auto est = estimate_series(v, a.n_blocks);
      std::printf("%-24s %12.6g %12.3g %8.2f %8ld\n", name.c_str(), est.mean,
                  est.error, est.tau, est.n_samples);
    }
    return 0;
  }
  if (!a.twopoint.empty()) {
    std::ifstream in(a.twopoint);
    if (!in) throw std::runtime_error("cannot open " + a.twopoint);
    std::string line;
    std::getline(in, line);
    std::vector<double> r, g, err;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string tok;
      std::vector<double> cols;
      while (std::getline(ss, tok, ',')) cols.push_back(std::stod(tok));
      if (cols.size() < 2) throw std::runtime_error("bad row: " + line);
      if (cols[0] < 1.0) continue;  // fits start at r = 1
      r.push_back(cols[0]);
      g.push_back(cols[1]);
      if (cols.size() > 2) err.push_back(cols[2]);
    }
    const bool weighted = err.size() == r.size();
    const auto fit = fit_eq7(r, g, weighted ? std::span<const double>(err)
                                            : std::span<const double>());
    auto show = [](const char* name, const FitResult& res) {
      std::printf("%s: %s chi2/dof=%.4g dof=%d iters=%d%s\n", name,
                  res.converged ? "converged" : "NOT CONVERGED", res.goodness,
                  res.dof, res.iterations,
                  res.message.empty() ? "" : (" " + res.message).c_str());
      for (const auto& [k, v] : res.params)
        std::printf("    %-4s = %.6g +- %.3g\n", k.c_str(), v,
                    res.errors.count(k) ? res.errors.at(k) : 0.0);
    };
    show("mixed", fit.mixed);
    show("power", fit.pure_power);
    show("exponential", fit.pure_exponential);
    std::printf("preferred: %s\n",
                fit.preferred.empty() ? "none" : fit.preferred.c_str());
    return 0;
  }
  throw std::invalid_argument("analyze needs --observables or --twopoint");
}

int cmd_experiment(const std::string& recipe, const std::string& config,
                   const std::vector<std::string>& overrides,
                   const std::string& out, uint64_t seed, bool have_seed) {
  ExperimentSpec spec;
  if (!config.empty()) {
    spec = parse_experiment_file(config);
    if (!recipe.empty() && recipe != spec.recipe)
      throw std::invalid_argument("recipe on the command line (" + recipe +
                                  ") conflicts with the config file (" +
                                  spec.recipe + ")");
  } else {
    spec = recipe_defaults(recipe.empty() ? "custom" : recipe);
  }
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got: " + kv);
    apply_override(spec, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!out.empty()) spec.output_dir = out;
  if (have_seed) spec.seed = seed;

  const auto result = run_experiment(spec);
  for (const auto& p : result.points)
    std::printf("point %-28s %s  %.1fs%s%s\n", p.point.label.c_str(),
                p.failed ? "FAILED" : "ok", p.seconds,
                p.failed ? "  " : "", p.failed ? p.error.c_str() : "");
  for (const auto& v : result.verdicts)
    std::printf("[%s] %-40s value=%.4g threshold=%.4g  %s\n",
                v.pass ? "PASS" : "FAIL", v.name.c_str(), v.value,
                v.threshold, v.detail.c_str());
  std::printf("manifest %s\n", result.manifest_path.c_str());
  return result.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and percolation analysis for 2D O(N) spin models"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "run a single chain");
  simulate->add_option("--kind", sim.kind, "triangular | square");
  simulate->add_option("--L", sim.L, "linear lattice size");
  simulate->add_option("--n", sim.n, "spin components");
  simulate->add_option("--variant", sim.variant, "standard | cut | richard");
  simulate->add_option("--beta", sim.beta, "inverse temperature");
  simulate->add_option("--epsilon", sim.epsilon, "bond constraint");
  simulate->add_option("--b", sim.b, "amplitude bound (richard)");
  simulate->add_option("--dilution", sim.dilution, "bond removal probability");
  simulate->add_option("--sweeps", sim.sweeps, "number of sweeps");
  simulate->add_option("--tune-sweeps", sim.tune_sweeps,
                       "sweeps with proposal-width tuning");
  simulate->add_option("--cluster-every", sim.cluster_every,
                       "embedded update period (0 = off)");
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--start", sim.start, "hot | cold");
  simulate->add_option("--order", sim.order, "checkerboard | sequential");
  simulate->add_option("--out", sim.out, "output directory");

  ResumeArgs res;
  auto* resume = app.add_subcommand("resume", "continue from a checkpoint");
  resume->add_option("--checkpoint", res.checkpoint, "checkpoint file")
      ->required();
  resume->add_option("--sweeps", res.sweeps, "additional sweeps");
  resume->add_option("--tune-sweeps", res.tune_sweeps,
                     "total sweeps with tuning");
  resume->add_option("--cluster-every", res.cluster_every,
                     "embedded update period (0 = off)");
  resume->add_option("--out", res.out, "output directory");

  AnalyzeArgs ana;
  auto* analyze = app.add_subcommand("analyze", "estimate or fit saved data");
  analyze->add_option("--observables", ana.observables,
                      "per-configuration observable CSV");
  analyze->add_option("--twopoint", ana.twopoint, "two-point table CSV");
  analyze->add_option("--n-blocks", ana.n_blocks, "jackknife blocks");

  std::string recipe, config, out;
  std::vector<std::string> overrides;
  uint64_t seed = 0;
  auto* experiment = app.add_subcommand("experiment", "run a named recipe");
  experiment->add_option("recipe", recipe,
                         "validate | c6_cap_vs_strip | richard_discriminator |"
                         " diluted_o2 | crossing_flatness | fk_identity |"
                         " custom");
  experiment->add_option("--config", config, "experiment file");
  experiment->add_option("--set", overrides, "key=value override");
  experiment->add_option("--out", out, "output directory");
  auto* seed_opt = experiment->add_option("--seed", seed, "master seed");

  auto* validate = app.add_subcommand("validate", "run the oracle suite");
  std::string vout = "out";
  uint64_t vseed = 1;
  validate->add_option("--out", vout, "output directory");
  validate->add_option("--seed", vseed, "master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (resume->parsed()) return cmd_resume(res);
    if (analyze->parsed()) return cmd_analyze(ana);
    if (experiment->parsed())
      return cmd_experiment(recipe, config, overrides, out, seed,
                            seed_opt->count() > 0);
    if (validate->parsed())
      return cmd_experiment("validate", "", {}, vout, vseed, true);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}
