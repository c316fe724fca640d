// experiment.cpp

#include "onperc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "onperc/binio.hpp"
#include "onperc/exact.hpp"
#include "onperc/fits.hpp"
#include "onperc/observables.hpp"
#include "onperc/percolation.hpp"

namespace onp {

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr double kCapArea = 4.0 * M_PI / 3.0;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string num(double v) { return fmt("%g", v); }

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::standard: return "standard";
    case Variant::cut: return "cut";
    case Variant::richard: return "richard";
  }
  return "?";
}

std::string kind_name(LatticeKind k) {
  return k == LatticeKind::triangular ? "triangular" : "square";
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, int>)
      out += std::to_string(v[i]);
    else
      out += num(v[i]);
  }
  return out;
}

// ---------------------------------------------------------------- parsing

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s) {
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad number: " + s);
  return v;
}

long to_long(const std::string& s) {
  size_t pos = 0;
  const long v = std::stol(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad integer: " + s);
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("bad boolean: " + s);
}

}  // namespace

std::string format_g17(double v) { return fmt("%.17g", v); }

void ExperimentSpec::validate() const {
  if (n < 2) throw std::invalid_argument("spec: n must be >= 2");
  if (L_values.empty() || beta_values.empty())
    throw std::invalid_argument("spec: empty parameter grid");
  for (int L : L_values)
    if (L < 4 || L % 2)
      throw std::invalid_argument("spec: L must be even and >= 4");
  for (double beta : beta_values)
    if (beta < 0) throw std::invalid_argument("spec: beta must be >= 0");
  if (variant != Variant::standard && epsilon_values.empty())
    throw std::invalid_argument("spec: constrained variant needs epsilon");
  if (dilution < 0.0 || dilution >= 1.0)
    throw std::invalid_argument("spec: dilution must lie in [0,1)");
  if (interval < 1) throw std::invalid_argument("spec: interval must be >= 1");
  if (thermalization < 0)
    throw std::invalid_argument("spec: thermalization must be >= 0");
  if (n_blocks < 10) throw std::invalid_argument("spec: need >= 10 blocks");
  if (n_configs() < n_blocks)
    throw std::invalid_argument(
        "spec: measurement/interval must give at least n_blocks samples");
  if (workers < 1) throw std::invalid_argument("spec: workers must be >= 1");
  for (double c : c_values)
    if (c < 0.0 || c > 0.9)
      throw std::invalid_argument("spec: c must lie in [0, 0.9]");
  if (output_dir.empty()) throw std::invalid_argument("spec: empty output dir");
}

ExperimentSpec recipe_defaults(const std::string& recipe) {
  ExperimentSpec s;
  s.recipe = recipe;
  if (recipe == "custom" || recipe == "validate") {
    // baseline settings
  } else if (recipe == "fk_identity") {
    s.n = 3;
    s.variant = Variant::standard;
    s.beta_values = {1.0};
    s.L_values = {16};
    s.thermalization = 1000;
    s.measurement = 10000;
    s.interval = 5;
  } else if (recipe == "c6_cap_vs_strip") {
    s.n = 3;
    s.variant = Variant::cut;
    s.beta_values = {0.0};
    s.epsilon_values = {0.65};
    s.L_values = {16, 32, 64};
    s.thermalization = 4000;
    s.measurement = 120000;
    s.interval = 10;
  } else if (recipe == "richard_discriminator") {
    s.n = 3;
    s.variant = Variant::richard;
    s.b = 0.5;
    s.beta_values = {1.2};
    s.epsilon_values = {0.8};
    s.L_values = {16, 32, 64};
    s.thermalization = 4000;
    s.measurement = 30000;
    s.interval = 10;
  } else if (recipe == "diluted_o2") {
    s.n = 2;
    s.variant = Variant::standard;
    s.beta_values = {1.2};
    s.L_values = {16, 32, 64};
    s.dilution = 0.1;
    s.thermalization = 2000;
    s.measurement = 20000;
    s.interval = 10;
  } else if (recipe == "crossing_flatness") {
    s.n = 3;
    s.variant = Variant::standard;
    s.beta_values = {1.5};
    s.L_values = {64};
    s.c_values = {0.0, 0.2, 0.4};
    s.thermalization = 2000;
    s.measurement = 20000;
    s.interval = 10;
  } else {
    throw std::invalid_argument("unknown recipe: " + recipe);
  }
  return s;
}

void apply_override(ExperimentSpec& spec, const std::string& key,
                    const std::string& value) {
  auto ints = [&] {
    std::vector<int> out;
    for (const auto& tok : split_list(value)) out.push_back((int)to_long(tok));
    return out;
  };
  auto doubles = [&] {
    std::vector<double> out;
    for (const auto& tok : split_list(value)) out.push_back(to_double(tok));
    return out;
  };

  if (key == "recipe") {
    // handled by the parser; accept silently so files can restate it
    if (value != spec.recipe)
      throw std::invalid_argument("recipe mismatch inside file");
  } else if (key == "model.kind") {
    if (value == "triangular") spec.kind = LatticeKind::triangular;
    else if (value == "square") spec.kind = LatticeKind::square;
    else throw std::invalid_argument("bad lattice kind: " + value);
  } else if (key == "model.n") {
    spec.n = (int)to_long(value);
  } else if (key == "model.variant") {
    if (value == "standard") spec.variant = Variant::standard;
    else if (value == "cut") spec.variant = Variant::cut;
    else if (value == "richard") spec.variant = Variant::richard;
    else throw std::invalid_argument("bad variant: " + value);
  } else if (key == "model.beta") {
    spec.beta_values = doubles();
  } else if (key == "model.epsilon") {
    spec.epsilon_values = doubles();
  } else if (key == "model.b") {
    spec.b = to_double(value);
  } else if (key == "model.dilution") {
    spec.dilution = to_double(value);
  } else if (key == "grid.L") {
    spec.L_values = ints();
  } else if (key == "run.thermalization") {
    spec.thermalization = to_long(value);
  } else if (key == "run.measurement") {
    spec.measurement = to_long(value);
  } else if (key == "run.interval") {
    spec.interval = to_long(value);
  } else if (key == "run.cluster_every") {
    spec.cluster_every = (int)to_long(value);
  } else if (key == "run.start") {
    if (value == "hot") spec.start = StartKind::hot;
    else if (value == "cold") spec.start = StartKind::cold;
    else throw std::invalid_argument("bad start kind: " + value);
  } else if (key == "run.seed") {
    spec.seed = (uint64_t)to_long(value);
  } else if (key == "run.n_blocks") {
    spec.n_blocks = (int)to_long(value);
  } else if (key == "run.workers") {
    spec.workers = (int)to_long(value);
  } else if (key == "run.debug_checks") {
    spec.debug_checks = to_bool(value);
  } else if (key == "observables.c") {
    spec.c_values = doubles();
  } else if (key == "observables.two_point") {
    spec.emit_two_point = to_bool(value);
  } else if (key == "output.dir") {
    spec.output_dir = value;
  } else {
    throw std::invalid_argument("unknown config key: " + key);
  }
}

ExperimentSpec parse_experiment_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line, section;
  while (std::getline(in, line)) {
    if (const auto h = line.find('#'); h != std::string::npos)
      line = line.substr(0, h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("bad config line: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    kv.emplace_back(section.empty() ? key : section + "." + key, value);
  }
  std::string recipe = "custom";
  for (const auto& [k, v] : kv)
    if (k == "recipe") recipe = v;
  ExperimentSpec spec = recipe_defaults(recipe);
  for (const auto& [k, v] : kv)
    if (k != "recipe") apply_override(spec, k, v);
  return spec;
}

// ---------------------------------------------------------------- running

namespace {

struct MeasurePlan {
  bool chi_is = true;
  bool chi_phi = false;
  bool fk_size = false;
  bool sigma_clusters = false;
  std::vector<RegionSpec> cluster_regions;
  std::vector<RegionSpec> occupancy_regions;
  std::vector<double> crossing_c;
  bool two_point = false;
};

MeasurePlan plan_for(const ExperimentSpec& spec) {
  MeasurePlan p;
  p.two_point = spec.emit_two_point;
  if (spec.recipe == "fk_identity") {
    p.fk_size = true;
    p.sigma_clusters = true;
  } else if (spec.recipe == "c6_cap_vs_strip") {
    auto cap = RegionSpec::cap_of_area(kCapArea);
    cap.name = "cap";
    auto strip = RegionSpec::strip_of_area(kCapArea);
    strip.name = "strip";
    p.cluster_regions = {cap, strip};
    p.occupancy_regions = {cap, strip};
  } else if (spec.recipe == "crossing_flatness") {
    p.crossing_c = spec.c_values;
  } else if (spec.recipe == "richard_discriminator") {
    p.chi_phi = true;
  } else {  // custom, diluted_o2
    p.chi_phi = spec.n >= 2;
    p.sigma_clusters = true;
  }
  return p;
}

std::vector<GridPoint> build_grid(const ExperimentSpec& spec) {
  std::vector<GridPoint> points;
  std::vector<double> eps =
      spec.variant == Variant::standard ? std::vector<double>{2.0}
                                        : spec.epsilon_values;
  for (int L : spec.L_values)
    for (double beta : spec.beta_values)
      for (double e : eps) {
        GridPoint gp;
        gp.params.n = spec.n;
        gp.params.beta = beta;
        gp.params.variant = spec.variant;
        gp.params.epsilon = e;
        gp.params.b = spec.b;
        gp.L = L;
        gp.dilution = spec.dilution;
        gp.label = "L" + std::to_string(L) + "_beta" + num(beta);
        if (spec.variant != Variant::standard) gp.label += "_eps" + num(e);
        if (spec.variant == Variant::richard) gp.label += "_b" + num(spec.b);
        if (spec.dilution > 0.0) gp.label += "_dil" + num(spec.dilution);
        points.push_back(std::move(gp));
      }
  return points;
}

struct PointOutput {
  PointSummary summary;
  std::vector<std::string> obs_rows;      // config_index,name,value
  std::vector<std::string> cluster_rows;  // per-predicate cluster rows
  std::vector<std::vector<double>> twopoint;
};

void cluster_row(std::vector<std::string>& rows, long idx,
                 const std::string& predicate, const ClusterPartition& part) {
  bool any_x = false, any_y = false;
  for (int c = 0; c < part.cluster_count(); ++c) {
    any_x = any_x || part.wraps_x[c];
    any_y = any_y || part.wraps_y[c];
  }
  rows.push_back(std::to_string(idx) + "," + predicate + "," +
                 std::to_string(part.cluster_count()) + "," +
                 format_g17(mean_cluster_size(part)) + "," +
                 format_g17(part.largest_fraction()) + "," +
                 (any_x ? "1" : "0") + "," + (any_y ? "1" : "0"));
}

PointOutput run_point(const ExperimentSpec& spec, const MeasurePlan& plan,
                      const GridPoint& point, size_t index) {
  PointOutput out;
  PointSummary& sum = out.summary;
  sum.point = point;
  sum.chain_seed = derive_seed(spec.seed, 2 * index);
  sum.mask_seed = derive_seed(spec.seed, 2 * index + 1);
  const auto t0 = std::chrono::steady_clock::now();

  try {
    const LatticeGraph graph = build_lattice(spec.kind, point.L);
    BondMask mask = full_mask(graph);
    if (point.dilution > 0.0) {
      Rng mask_rng(sum.mask_seed);
      mask = dilute_bonds(graph, point.dilution, mask_rng);
    }
    const long n_present = graph.n_bonds() - mask.removed_count();
    const auto u = point.params.axis();

    ChainState chain =
        init_chain(point.params, graph, mask, sum.chain_seed, spec.start);

    uint64_t sweep_counter = 0;
    auto one_sweep = [&](bool tuning) {
      const auto st = metropolis_sweep(chain, point.params, graph, mask);
      if (tuning) tune_proposal_width(chain, st);
      ++sweep_counter;
      if (spec.cluster_every > 0 && sweep_counter % spec.cluster_every == 0)
        embedded_cluster_update(chain, point.params, graph, mask);
      global_rotation_update(chain, point.params);
      if (spec.debug_checks)
        sum.violations +=
            count_violations(chain.config, graph, point.params, mask);
    };

    for (long t = 0; t < spec.thermalization; ++t) one_sweep(true);
    chain.tune_delta = false;

    auto& series = sum.series;
    std::map<std::string, double> late_spatial;
    const long n_cfg = spec.n_configs();
    for (long m = 0; m < n_cfg; ++m) {
      for (long k = 0; k < spec.interval; ++k) one_sweep(false);

      auto record = [&](const std::string& name, double value) {
        series[name].push_back(value);
        out.obs_rows.push_back(std::to_string(m) + "," + name + "," +
                               format_g17(value));
      };

      const double energy =
          total_action(chain.config, graph, point.params, mask) / n_present;
      record("energy", energy);
      late_spatial["energy"] = energy;

      const auto proj = hemisphere_decompose(chain.config, u);
      if (plan.chi_is) record("chi_is", chi_ising_value(proj.sigma));
      if (plan.chi_phi)
        record("chi_phi", chi_phi_value(azimuth_field(chain.config, u)));

      if (plan.sigma_clusters) {
        const auto part = clusters_by_predicate(
            chain.config, graph, [&](int i) { return proj.sigma[i] > 0; },
            &mask);
        cluster_row(out.cluster_rows, m, "sigma+", part);
        record("size[sigma+]", mean_cluster_size(part));
        record("wrap[sigma+]", part.any_wrap() ? 1.0 : 0.0);
      }
      for (const auto& region : plan.cluster_regions) {
        const auto part = clusters_by_predicate(
            chain.config, graph,
            [&](int i) {
              return region_membership(chain.config.spin(i), region, u);
            },
            &mask);
        cluster_row(out.cluster_rows, m, "region:" + region.name, part);
        record("size[" + region.name + "]", mean_cluster_size(part));
        record("wrap[" + region.name + "]", part.any_wrap() ? 1.0 : 0.0);
      }
      for (const auto& region : plan.occupancy_regions) {
        const double occ = region_occupancy(chain.config, region);
        record("occ[" + region.name + "]", occ);
        late_spatial["occ[" + region.name + "]"] = occ;
      }
      for (double c : plan.crossing_c)
        record("cross[c=" + num(c) + "]",
               crossing_count(chain.config, graph, mask, c));
      if (plan.fk_size) {
        const auto h = cluster_like_sigma(graph, proj, &mask);
        const auto fkr = fk_realize(chain.config, graph, point.params, h, proj,
                                    mask, chain.rng);
        record("fk_size", mean_cluster_size(fkr.clusters));
      }
      if (plan.two_point)
        out.twopoint.push_back(two_point_value(chain.config, graph));
    }

    sum.n_configs = n_cfg;
    sum.acceptance = chain.total_proposals
                         ? double(chain.total_accepts) / chain.total_proposals
                         : 0.0;
    sum.delta = chain.delta;
    for (const auto& [name, values] : series)
      sum.estimates[name] = estimate_series(values, spec.n_blocks);
    sum.diagnostics = ergodicity_diagnostics(series, late_spatial, 0.05);
  } catch (const std::exception& e) {
    sum.failed = true;
    sum.error = e.what();
  }
  sum.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

std::vector<PointOutput> run_pool(const ExperimentSpec& spec,
                                  const MeasurePlan& plan,
                                  const std::vector<GridPoint>& points) {
  std::vector<PointOutput> outputs(points.size());
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i; (i = next.fetch_add(1)) < points.size();)
      outputs[i] = run_point(spec, plan, points[i], i);
  };
  const int n_workers =
      std::min<int>(spec.workers, static_cast<int>(points.size()));
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < n_workers; ++w) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  return outputs;
}

// ---------------------------------------------------------------- verdicts

const Estimate* find_estimate(const PointSummary& p, const std::string& name) {
  const auto it = p.estimates.find(name);
  return it == p.estimates.end() ? nullptr : &it->second;
}

void fk_identity_verdicts(const std::vector<PointSummary>& points,
                          std::vector<Verdict>& verdicts) {
  for (const auto& p : points) {
    if (p.failed) continue;
    const auto* chi = find_estimate(p, "chi_is");
    const auto* fk = find_estimate(p, "fk_size");
    if (!chi || !fk) continue;
    Verdict v;
    v.name = "fk_identity[" + p.point.label + "]";
    const double comb = std::hypot(chi->error, fk->error);
    v.value = comb > 0 ? std::abs(chi->mean - fk->mean) / comb : 0.0;
    v.threshold = 3.0;
    v.pass = v.value <= v.threshold;
    v.detail = "chi_is=" + num(chi->mean) + "+-" + num(chi->error) +
               " fk_size=" + num(fk->mean) + "+-" + num(fk->error);
    verdicts.push_back(v);
  }
}

void c6_verdicts(const std::vector<PointSummary>& points,
                 std::vector<Verdict>& verdicts) {
  struct Series {
    std::vector<double> L, mean, err;
  };
  std::map<std::string, Series> by_region;
  for (const auto& p : points) {
    if (p.failed) continue;
    for (const char* r : {"cap", "strip"}) {
      const auto* est = find_estimate(p, std::string("size[") + r + "]");
      if (!est) continue;
      auto& s = by_region[r];
      s.L.push_back(p.point.L);
      s.mean.push_back(est->mean);
      s.err.push_back(est->error);
    }
  }
  std::map<std::string, FitResult> fits;
  for (auto& [region, s] : by_region) {
    if (s.L.size() < 3) continue;
    Verdict v;
    v.name = "power_law_goodness[" + region + "]";
    v.threshold = 4.0;
    try {
      const auto fit = fit_power_law(s.L, s.mean, s.err);
      fits[region] = fit;
      v.value = fit.goodness;
      v.pass = fit.converged && fit.goodness <= v.threshold;
      v.detail = "eta=" + num(fit.params.at("eta")) + "+-" +
                 num(fit.errors.at("eta")) + " exponent=" +
                 num(fit.params.at("exponent"));
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = e.what();
    }
    verdicts.push_back(v);
  }
  if (fits.count("cap") && fits.count("strip")) {
    const auto& a = fits["cap"];
    const auto& b = fits["strip"];
    Verdict v;
    v.name = "eta_cap_below_eta_strip";
    const double ea = a.params.at("eta"), eb = b.params.at("eta");
    const double comb = std::hypot(a.errors.at("eta"), b.errors.at("eta"));
    v.value = comb > 0 ? (eb - ea) / comb : 0.0;
    v.threshold = 2.0;
    v.pass = v.value >= v.threshold;
    v.detail = "eta_cap=" + num(ea) + "+-" + num(a.errors.at("eta")) +
               " eta_strip=" + num(eb) + "+-" + num(b.errors.at("eta"));
    verdicts.push_back(v);
  }
}

void richard_verdicts(const std::vector<PointSummary>& points,
                      std::vector<Verdict>& verdicts) {
  std::vector<const PointSummary*> sorted;
  for (const auto& p : points)
    if (!p.failed) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->point.L < b->point.L; });
  for (size_t k = 0; k + 1 < sorted.size(); ++k) {
    const auto& lo = *sorted[k];
    const auto& hi = *sorted[k + 1];
    const std::string tag =
        "[L" + std::to_string(lo.point.L) + "->L" + std::to_string(hi.point.L) + "]";
    if (const auto *a = find_estimate(lo, "chi_phi"),
        *b = find_estimate(hi, "chi_phi");
        a && b) {
      Verdict v;
      v.name = "chi_phi_increasing" + tag;
      const double comb = std::hypot(a->error, b->error);
      v.value = comb > 0 ? (b->mean - a->mean) / comb : 0.0;
      v.threshold = 1.0;
      v.pass = v.value > v.threshold;
      v.detail = "chi_phi " + num(a->mean) + "+-" + num(a->error) + " -> " +
                 num(b->mean) + "+-" + num(b->error);
      verdicts.push_back(v);
    }
    if (const auto *a = find_estimate(lo, "chi_is"),
        *b = find_estimate(hi, "chi_is");
        a && b) {
      Verdict v;
      v.name = "chi_is_density_decreasing" + tag;
      const double da = a->mean / (double(lo.point.L) * lo.point.L);
      const double db = b->mean / (double(hi.point.L) * hi.point.L);
      v.value = da - db;
      v.threshold = 0.0;
      v.pass = v.value > v.threshold;
      v.detail = "chi_is/|V| " + num(da) + " -> " + num(db);
      verdicts.push_back(v);
    }
  }
}

void crossing_verdicts(const ExperimentSpec& spec,
                       const std::vector<PointSummary>& points,
                       std::vector<Verdict>& verdicts) {
  for (const auto& p : points) {
    if (p.failed) continue;
    for (size_t i = 0; i < spec.c_values.size(); ++i)
      for (size_t j = i + 1; j < spec.c_values.size(); ++j) {
        const std::string ni = "cross[c=" + num(spec.c_values[i]) + "]";
        const std::string nj = "cross[c=" + num(spec.c_values[j]) + "]";
        const auto it_i = p.series.find(ni);
        const auto it_j = p.series.find(nj);
        if (it_i == p.series.end() || it_j == p.series.end()) continue;
        std::vector<double> diff(it_i->second.size());
        for (size_t t = 0; t < diff.size(); ++t)
          diff[t] = it_i->second[t] - it_j->second[t];
        const auto est = estimate_series(diff, spec.n_blocks);
        Verdict v;
        v.name = "crossing_flat[c=" + num(spec.c_values[i]) + ",c=" +
                 num(spec.c_values[j]) + "][" + p.point.label + "]";
        v.value = est.error > 0 ? std::abs(est.mean) / est.error : 0.0;
        v.threshold = 3.0;
        v.pass = v.value <= v.threshold;
        v.detail = "mean diff " + num(est.mean) + "+-" + num(est.error);
        verdicts.push_back(v);
      }
  }
}

// ---------------------------------------------------------------- output

void write_lines(const std::string& path, const std::string& header,
                 const std::vector<std::string>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << header << "\n";
  for (const auto& r : rows) out << r << "\n";
}

nlohmann::json spec_json(const ExperimentSpec& s) {
  return {
      {"recipe", s.recipe},
      {"kind", kind_name(s.kind)},
      {"n", s.n},
      {"variant", variant_name(s.variant)},
      {"beta", s.beta_values},
      {"epsilon", s.epsilon_values},
      {"b", s.b},
      {"L", s.L_values},
      {"dilution", s.dilution},
      {"thermalization", s.thermalization},
      {"measurement", s.measurement},
      {"interval", s.interval},
      {"cluster_every", s.cluster_every},
      {"start", s.start == StartKind::hot ? "hot" : "cold"},
      {"seed", s.seed},
      {"n_blocks", s.n_blocks},
      {"workers", s.workers},
      {"c", s.c_values},
      {"two_point", s.emit_two_point},
      {"debug_checks", s.debug_checks},
      {"output_dir", s.output_dir},
  };
}

// quick-oracle composite: enumeration identity, independent-spin geometry,
// wrap-rate equivalence against direct site percolation
void run_validate(const ExperimentSpec& spec, ExperimentResult& result) {
  // exact enumeration vs the bond-realization chain on a 3x3 graph
  {
    const LatticeGraph graph = build_lattice_unchecked(spec.kind, 3);
    const BondMask mask = full_mask(graph);
    const double beta = 0.7;
    const std::vector<double> k_pattern = {0.9,  0.4, 0.7,  0.55, 0.8,
                                           0.3, 0.65, 0.45, 0.75};
    const double exact =
        exact_sign_susceptibility(graph, mask, k_pattern, beta);

    ModelParams params;
    params.n = 3;
    params.beta = beta;
    const auto u = params.axis();
    SpinConfig config = make_config(3, graph.n_sites);
    Rng rng(derive_seed(spec.seed, 901));
    for (int i = 0; i < graph.n_sites; ++i) {
      auto s = config.spin(i);
      const double perp = std::sqrt(1.0 - k_pattern[i] * k_pattern[i]);
      const double phi = rng.uniform(0.0, 2.0 * M_PI);
      s[0] = perp * std::cos(phi);
      s[1] = perp * std::sin(phi);
      s[2] = k_pattern[i];
    }
    const long steps = 4000;
    std::vector<double> chi_series, size_series;
    for (long t = 0; t < steps; ++t) {
      const auto proj = hemisphere_decompose(config, u);
      const auto h = cluster_like_sigma(graph, proj, &mask);
      const auto fkr =
          fk_realize(config, graph, params, h, proj, mask, rng);
      size_series.push_back(mean_cluster_size(fkr.clusters));
      chi_series.push_back(chi_ising_value(proj.sigma));
      flip_partition_clusters(config, fkr.clusters, u, rng);
    }
    const auto size_est = estimate_series(size_series, spec.n_blocks);
    const auto chi_est = estimate_series(chi_series, spec.n_blocks);
    Verdict v;
    v.name = "enumeration_identity";
    v.value = size_est.error > 0
                  ? std::abs(size_est.mean - exact) / size_est.error
                  : 0.0;
    v.threshold = 3.0;
    v.pass = v.value <= v.threshold;
    v.detail = "exact=" + num(exact) + " fk=" + num(size_est.mean) + "+-" +
               num(size_est.error) + " chi=" + num(chi_est.mean) + "+-" +
               num(chi_est.error);
    result.verdicts.push_back(v);
  }

  // independent spins: region occupancies and the ergodicity report
  {
    const int L = 32;
    const LatticeGraph graph = build_lattice(spec.kind, L);
    const BondMask mask = full_mask(graph);
    ModelParams params;
    params.n = 3;
    params.beta = 0.0;
    params.variant = Variant::cut;  // epsilon = 2: constraint never binds
    const auto u = params.axis();
    ChainState chain =
        init_chain(params, graph, mask, derive_seed(spec.seed, 902));
    for (int t = 0; t < 100; ++t)
      tune_proposal_width(chain, metropolis_sweep(chain, params, graph, mask));
    chain.tune_delta = false;
    auto hemi = RegionSpec::hemisphere({0.0, 0.0, 1.0});
    hemi.name = "hemisphere";
    auto cap = RegionSpec::cap_of_area(kCapArea);
    cap.name = "cap";
    const std::vector<RegionSpec> regions = {hemi, cap};
    std::map<std::string, std::vector<double>> series;
    std::map<std::string, double> late;
    const long n_cfg = 1000;
    const long n_present = graph.n_bonds();
    for (long m = 0; m < n_cfg; ++m) {
      metropolis_sweep(chain, params, graph, mask);
      for (const auto& r : regions) {
        const double occ = region_occupancy(chain.config, r);
        series["occ[" + r.name + "]"].push_back(occ);
        late["occ[" + r.name + "]"] = occ;
      }
      const double energy =
          total_action(chain.config, graph, params, mask) / n_present;
      series["energy"].push_back(energy);
      late["energy"] = energy;
    }
    const std::vector<std::vector<double>> occ_series = {
        series["occ[hemisphere]"], series["occ[cap]"]};
    const auto report = area_test(regions, occ_series, spec.n_blocks);
    for (const auto& e : report.entries) {
      Verdict v;
      v.name = "area[" + e.region + "]";
      v.value = std::abs(e.z);
      v.threshold = 3.0;
      v.pass = e.pass;
      v.detail = "occ=" + num(e.mean) + "+-" + num(e.error) + " expected=" +
                 num(e.expected);
      result.verdicts.push_back(v);
    }
    const auto diag = ergodicity_diagnostics(series, late, 0.05);
    Verdict v;
    v.name = "ergodicity_report_beta0";
    v.pass = diag.all_pass && diag.sufficient;
    v.value = diag.all_pass ? 1.0 : 0.0;
    v.threshold = 1.0;
    for (const auto& e : diag.entries)
      if (!e.p1_pass || !e.p2_pass) v.detail += e.observable + " ";
    result.verdicts.push_back(v);
  }

  // wrap-rate equivalence: independent signs vs direct site percolation
  {
    const int L = 64;
    const LatticeGraph graph = build_lattice(spec.kind, L);
    const BondMask mask = full_mask(graph);
    ModelParams params;
    params.n = 3;
    params.beta = 0.0;
    params.variant = Variant::cut;
    const auto u = params.axis();
    ChainState chain =
        init_chain(params, graph, mask, derive_seed(spec.seed, 903));
    for (int t = 0; t < 100; ++t)
      tune_proposal_width(chain, metropolis_sweep(chain, params, graph, mask));
    chain.tune_delta = false;
    const long n_cfg = 1000;
    long wrap_spin = 0;
    for (long m = 0; m < n_cfg; ++m) {
      metropolis_sweep(chain, params, graph, mask);
      const auto proj = hemisphere_decompose(chain.config, u);
      const auto part = clusters_by_predicate(
          chain.config, graph, [&](int i) { return proj.sigma[i] > 0; },
          &mask);
      wrap_spin += part.any_wrap() ? 1 : 0;
    }
    Rng rng(derive_seed(spec.seed, 904));
    long wrap_bernoulli = 0;
    for (long m = 0; m < n_cfg; ++m) {
      const auto part = bernoulli_site_mode(graph, 0.5, rng);
      wrap_bernoulli += part.any_wrap() ? 1 : 0;
    }
    const auto test =
        proportion_two_sample(wrap_spin, n_cfg, wrap_bernoulli, n_cfg);
    Verdict v;
    v.name = "bernoulli_wrap_equivalence";
    v.value = test.p_value;
    v.threshold = 0.05;
    v.pass = test.p_value >= v.threshold;
    v.detail = "spin " + std::to_string(wrap_spin) + "/" +
               std::to_string(n_cfg) + " vs site " +
               std::to_string(wrap_bernoulli) + "/" + std::to_string(n_cfg);
    result.verdicts.push_back(v);
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  namespace fs = std::filesystem;
  fs::create_directories(spec.output_dir);

  ExperimentResult result;
  result.spec = spec;
  std::vector<std::string> output_files;
  const auto t0 = std::chrono::steady_clock::now();

  if (spec.recipe == "validate") {
    run_validate(spec, result);
  } else {
    const MeasurePlan plan = plan_for(spec);
    const auto points = build_grid(spec);
    auto outputs = run_pool(spec, plan, points);

    std::vector<std::string> estimate_rows;
    for (auto& out : outputs) {
      const auto& label = out.summary.point.label;
      if (!out.summary.failed) {
        const std::string obs_path =
            spec.output_dir + "/" + label + "_observables.csv";
        write_lines(obs_path, "config_index,name,value", out.obs_rows);
        output_files.push_back(obs_path);
        if (!out.cluster_rows.empty()) {
          const std::string cl_path =
              spec.output_dir + "/" + label + "_clusters.csv";
          write_lines(cl_path,
                      "config_index,predicate,cluster_count,mean_size,"
                      "largest_fraction,wraps_x,wraps_y",
                      out.cluster_rows);
          output_files.push_back(cl_path);
        }
        if (!out.twopoint.empty()) {
          const auto table = two_point(out.twopoint, spec.n_blocks);
          std::vector<std::string> rows;
          for (size_t r = 0; r < table.r.size(); ++r)
            rows.push_back(format_g17(table.r[r]) + "," +
                           format_g17(table.g[r]) + "," +
                           format_g17(table.err[r]));
          const std::string tp_path =
              spec.output_dir + "/" + label + "_twopoint.csv";
          write_lines(tp_path, "r,g,err", rows);
          output_files.push_back(tp_path);
        }
        for (const auto& [name, est] : out.summary.estimates)
          estimate_rows.push_back(label + "," + name + "," +
                                  format_g17(est.mean) + "," +
                                  format_g17(est.error) + "," +
                                  format_g17(est.tau) + "," +
                                  std::to_string(est.n_samples));
      }
      result.points.push_back(std::move(out.summary));
    }
    const std::string est_path = spec.output_dir + "/estimates.csv";
    write_lines(est_path, "label,observable,mean,error,tau,n_samples",
                estimate_rows);
    output_files.push_back(est_path);

    if (spec.recipe == "fk_identity")
      fk_identity_verdicts(result.points, result.verdicts);
    else if (spec.recipe == "c6_cap_vs_strip")
      c6_verdicts(result.points, result.verdicts);
    else if (spec.recipe == "richard_discriminator")
      richard_verdicts(result.points, result.verdicts);
    else if (spec.recipe == "crossing_flatness")
      crossing_verdicts(spec, result.points, result.verdicts);
  }

  for (const auto& p : result.points)
    if (p.failed) result.all_pass = false;
  for (const auto& v : result.verdicts)
    if (!v.pass) result.all_pass = false;

  {
    std::vector<std::string> rows;
    for (const auto& v : result.verdicts)
      rows.push_back(v.name + "," + (v.pass ? "1" : "0") + "," +
                     format_g17(v.value) + "," + format_g17(v.threshold) +
                     "," + v.detail);
    const std::string path = spec.output_dir + "/verdicts.csv";
    write_lines(path, "name,pass,value,threshold,detail", rows);
    output_files.push_back(path);
  }

  nlohmann::json manifest;
  manifest["version"] = kVersion;
  manifest["recipe"] = spec.recipe;
  manifest["spec"] = spec_json(spec);
  manifest["all_pass"] = result.all_pass;
  manifest["elapsed_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  {
    auto& pts = manifest["points"] = nlohmann::json::array();
    for (const auto& p : result.points) {
      nlohmann::json j;
      j["label"] = p.point.label;
      j["chain_seed"] = p.chain_seed;
      j["mask_seed"] = p.mask_seed;
      j["status"] = p.failed ? "failed" : "ok";
      if (p.failed) j["error"] = p.error;
      j["seconds"] = p.seconds;
      j["n_configs"] = p.n_configs;
      j["acceptance"] = p.acceptance;
      j["delta"] = p.delta;
      j["violations"] = p.violations;
      auto& est = j["estimates"] = nlohmann::json::object();
      for (const auto& [name, e] : p.estimates)
        est[name] = {{"mean", e.mean},
                     {"error", e.error},
                     {"tau", e.tau},
                     {"n", e.n_samples}};
      j["diagnostics"] = {{"all_pass", p.diagnostics.all_pass},
                          {"sufficient", p.diagnostics.sufficient}};
      pts.push_back(std::move(j));
    }
    auto& vj = manifest["verdicts"] = nlohmann::json::array();
    for (const auto& v : result.verdicts)
      vj.push_back({{"name", v.name},
                    {"pass", v.pass},
                    {"value", v.value},
                    {"threshold", v.threshold},
                    {"detail", v.detail}});
    auto& outs = manifest["outputs"] = nlohmann::json::array();
    for (const auto& f : output_files)
      outs.push_back({{"path", f}, {"digest", fnv1a64_hex(f)}});
  }
  result.manifest_path = spec.output_dir + "/manifest.json";
  {
    std::ofstream out(result.manifest_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + result.manifest_path);
    out << manifest.dump(2) << "\n";
  }
  return result;
}

}  // namespace onp
