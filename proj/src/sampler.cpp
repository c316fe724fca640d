// sampler.cpp

#include "onperc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace onp {

namespace {

bool site_feasible(std::span<const double> s, const ModelParams& params,
                   std::span<const double> u) {
  if (!params.has_site_constraint()) return true;
  return std::abs(dot(s, u)) < 1.0 - params.b;
}

void normalize(std::span<double> s) {
  double norm2 = 0.0;
  for (double c : s) norm2 += c * c;
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& c : s) c *= inv;
}

// small union-find for the cluster flips (no winding bookkeeping needed)
class Forest {
 public:
  explicit Forest(int n) : parent_(n) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
  }
  int find(int i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[a] = b;
    return true;
  }

 private:
  std::vector<int32_t> parent_;
};

}  // namespace

ChainState init_chain(const ModelParams& params, const LatticeGraph& graph,
                      const BondMask& mask, uint64_t seed, StartKind start) {
  params.validate();
  ChainState chain{Rng(seed)};
  chain.config = make_config(params.n, graph.n_sites);
  const auto u = params.axis();

  // cold configuration: everything at one feasible point
  const std::vector<double> cold_point =
      params.has_site_constraint() ? perpendicular_axis(u) : u;
  for (int i = 0; i < graph.n_sites; ++i)
    std::copy(cold_point.begin(), cold_point.end(), chain.config.spin(i).begin());

  const bool constrained =
      params.has_bond_constraint() || params.has_site_constraint();
  if (start == StartKind::hot) {
    if (!constrained) {
      for (int i = 0; i < graph.n_sites; ++i)
        chain.rng.unit_vector(chain.config.spin(i));
    } else {
      // randomize with wide constraint-respecting moves at beta = 0
      ModelParams hot = params;
      hot.beta = 0.0;
      chain.delta = M_PI;
      for (int k = 0; k < 100; ++k) {
        const auto st = metropolis_sweep(chain, hot, graph, mask);
        tune_proposal_width(chain, st);
      }
      chain.sweeps = 0;
      chain.total_proposals = chain.total_accepts = 0;
      chain.config.generation = 0;
    }
  }
  return chain;
}

SweepStats metropolis_sweep(ChainState& chain, const ModelParams& params,
                            const LatticeGraph& graph, const BondMask& mask) {
  SpinConfig& cfg = chain.config;
  const int n = cfg.n;
  const auto u = params.axis();
  const bool bond_constrained = params.has_bond_constraint();
  const double eps2 = params.epsilon * params.epsilon;
  const double beta = params.beta;

  if (chain.sweeps == 0 &&
      count_violations(cfg, graph, params, mask) > 0)
    throw std::runtime_error("metropolis_sweep: infeasible input configuration");

  std::vector<double> prop(n);
  SweepStats stats;

  auto update_site = [&](int i) {
    ++stats.proposals;
    const auto cur = cfg.spin(i);
    chain.rng.cap_vector(cur, chain.delta, prop);
    if (!site_feasible(prop, params, u)) return;

    double dE = 0.0;
    const auto nbrs = graph.neighbors_of(i);
    const auto nbonds = graph.bonds_of(i);
    for (int k = 0; k < graph.coordination; ++k) {
      if (!mask.is_present(nbonds[k])) continue;
      const auto snb = cfg.spin(nbrs[k]);
      if (bond_constrained && dist2(prop, snb) >= eps2) return;
      for (int c = 0; c < n; ++c) dE += (prop[c] - cur[c]) * snb[c];
    }
    if (dE < 0.0 && chain.rng.uniform() >= std::exp(beta * dE)) return;
    std::copy(prop.begin(), prop.end(), cfg.spin(i).begin());
    ++stats.accepts;
  };

  if (chain.order == SweepOrder::sequential) {
    for (int i = 0; i < cfg.n_sites; ++i) update_site(i);
  } else {
    const int L = graph.L;
    for (int parity = 0; parity < 2; ++parity)
      for (int y = 0; y < L; ++y)
        for (int x = (y + parity) % 2; x < L; x += 2)
          update_site(y * L + x);
  }

  ++chain.sweeps;
  ++cfg.generation;
  chain.total_proposals += stats.proposals;
  chain.total_accepts += stats.accepts;
  return stats;
}

void tune_proposal_width(ChainState& chain, const SweepStats& stats) {
  if (!chain.tune_delta) return;
  const double acc = stats.acceptance();
  if (acc > 0.55)
    chain.delta = std::min(chain.delta * 1.05, M_PI);
  else if (acc < 0.45)
    chain.delta = std::max(chain.delta * 0.95, 1e-3);
}

void global_rotation_update(ChainState& chain, const ModelParams& params) {
  const int n = params.n;
  std::vector<double> e1(n), e2(n);
  if (params.has_site_constraint()) {
    const auto plane = perpendicular_plane(params.axis());
    e1 = plane.first;
    e2 = plane.second;
  } else {
    // random 2-plane from two Gaussian vectors
    double n1 = 0.0;
    for (int k = 0; k < n; ++k) {
      e1[k] = chain.rng.normal();
      n1 += e1[k] * e1[k];
    }
    n1 = std::sqrt(n1);
    for (int k = 0; k < n; ++k) e1[k] /= n1;
    double proj = 0.0, n2 = 0.0;
    for (int k = 0; k < n; ++k) e2[k] = chain.rng.normal();
    for (int k = 0; k < n; ++k) proj += e2[k] * e1[k];
    for (int k = 0; k < n; ++k) e2[k] -= proj * e1[k];
    for (int k = 0; k < n; ++k) n2 += e2[k] * e2[k];
    if (n2 < 1e-12) return;  // essentially parallel draw, skip
    n2 = std::sqrt(n2);
    for (int k = 0; k < n; ++k) e2[k] /= n2;
  }
  const double theta = chain.rng.uniform() * 2.0 * M_PI;
  const double c = std::cos(theta), s = std::sin(theta);
  for (int i = 0; i < chain.config.n_sites; ++i) {
    auto si = chain.config.spin(i);
    double a = 0.0, b = 0.0;
    for (int k = 0; k < n; ++k) {
      a += si[k] * e1[k];
      b += si[k] * e2[k];
    }
    const double ar = a * c - b * s;
    const double br = a * s + b * c;
    double norm = 0.0;
    for (int k = 0; k < n; ++k) {
      si[k] += (ar - a) * e1[k] + (br - b) * e2[k];
      norm += si[k] * si[k];
    }
    norm = std::sqrt(norm);
    for (int k = 0; k < n; ++k) si[k] /= norm;
  }
}

EmbeddedUpdateRecord embedded_cluster_update(ChainState& chain,
                                             const ModelParams& params,
                                             const LatticeGraph& graph,
                                             const BondMask& mask) {
  SpinConfig& cfg = chain.config;
  const auto u = params.axis();
  const auto proj = hemisphere_decompose(cfg, u);
  const bool constrained = params.has_bond_constraint();
  const double eps = params.epsilon;
  const double beta = params.beta;

  EmbeddedUpdateRecord rec;
  Forest forest(cfg.n_sites);
  int unions = 0;
  for (int b = 0; b < graph.n_bonds(); ++b) {
    if (!mask.is_present(b)) continue;
    const Bond& bd = graph.bonds[b];
    if (proj.sigma[bd.i] != proj.sigma[bd.j]) continue;
    bool occ;
    if (constrained && bond_frozen(cfg.spin(bd.i), cfg.spin(bd.j),
                                   proj.s_parallel[bd.i],
                                   proj.s_parallel[bd.j], eps)) {
      ++rec.frozen_bonds;
      occ = true;
    } else {
      occ = chain.rng.bernoulli(fk_bond_probability(
          beta, proj.s_parallel[bd.i], proj.s_parallel[bd.j]));
    }
    if (occ) {
      ++rec.occupied_bonds;
      if (forest.unite(bd.i, bd.j)) ++unions;
    }
  }
  rec.fk_clusters = cfg.n_sites - unions;

  // one fair coin per FK cluster, drawn at the first site scanned
  std::vector<int8_t> coin(cfg.n_sites, -1);
  const int n = cfg.n;
  for (int i = 0; i < cfg.n_sites; ++i) {
    const int r = forest.find(i);
    if (coin[r] < 0) coin[r] = chain.rng.bernoulli(0.5) ? 1 : 0;
    if (coin[r]) {
      auto s = cfg.spin(i);
      const double su = dot(s, u);
      for (int c = 0; c < n; ++c) s[c] -= 2.0 * su * u[c];
      normalize(s);
      ++rec.flipped_sites;
    }
  }
  ++cfg.generation;

  if (constrained || params.has_site_constraint()) {
    if (count_violations(cfg, graph, params, mask) > 0)
      throw std::logic_error(
          "embedded_cluster_update: flip broke the constraint "
          "(freezing rule failure)");
  }
  return rec;
}

void flip_partition_clusters(SpinConfig& config,
                             const ClusterPartition& clusters,
                             std::span<const double> u, Rng& rng) {
  std::vector<int8_t> coin(clusters.cluster_count());
  for (auto& c : coin) c = rng.bernoulli(0.5) ? 1 : 0;
  const int n = config.n;
  for (int i = 0; i < config.n_sites; ++i) {
    const int c = clusters.cluster_of[i];
    if (c < 0 || !coin[c]) continue;
    auto s = config.spin(i);
    const double su = dot(s, u);
    for (int k = 0; k < n; ++k) s[k] -= 2.0 * su * u[k];
    normalize(s);
  }
  ++config.generation;
}

QuenchedFrame make_quenched_frame(const SpinConfig& config,
                                  std::span<const double> u) {
  QuenchedFrame frame;
  frame.k.resize(config.n_sites);
  frame.phi.resize(config.n_sites);
  if (config.n == 2) {
    // already an O(2) model: unit amplitudes, the spin's own angle
    for (int i = 0; i < config.n_sites; ++i) {
      frame.k[i] = 1.0;
      const auto s = config.spin(i);
      frame.phi[i] = std::atan2(s[1], s[0]);
    }
    return frame;
  }
  const auto [e1, e2] = perpendicular_plane(u);
  for (int i = 0; i < config.n_sites; ++i) {
    const auto s = config.spin(i);
    const double su = dot(s, u);
    frame.k[i] = std::sqrt(std::max(0.0, 1.0 - su * su));
    frame.phi[i] = std::atan2(dot(s, std::span<const double>(e2)),
                              dot(s, std::span<const double>(e1)));
  }
  return frame;
}

SweepStats quenched_phi_sweep(QuenchedFrame& frame, double beta,
                              const LatticeGraph& graph, const BondMask& mask,
                              Rng& rng) {
  SweepStats stats;
  for (int i = 0; i < graph.n_sites; ++i) {
    ++stats.proposals;
    const double cur = frame.phi[i];
    const double prop = cur + rng.uniform(-frame.delta, frame.delta);
    double dE = 0.0;
    const auto nbrs = graph.neighbors_of(i);
    const auto nbonds = graph.bonds_of(i);
    for (int k = 0; k < graph.coordination; ++k) {
      if (!mask.is_present(nbonds[k])) continue;
      const int j = nbrs[k];
      const double kk = frame.k[i] * frame.k[j];
      dE += kk * (std::cos(prop - frame.phi[j]) - std::cos(cur - frame.phi[j]));
    }
    if (dE < 0.0 && rng.uniform() >= std::exp(beta * dE)) continue;
    frame.phi[i] = std::remainder(prop, 2.0 * M_PI);
    ++stats.accepts;
  }
  if (frame.tune_delta) {
    const double acc = stats.acceptance();
    if (acc > 0.55)
      frame.delta = std::min(frame.delta * 1.05, M_PI);
    else if (acc < 0.45)
      frame.delta = std::max(frame.delta * 0.95, 1e-3);
  }
  return stats;
}

DiagnosticsReport ergodicity_diagnostics(
    const std::map<std::string, std::vector<double>>& series,
    const std::map<std::string, double>& late_spatial, double significance) {
  DiagnosticsReport report;
  // family-wise significance across the tracked observables
  long n_tested = 0;
  for (const auto& [name, values] : series)
    if (values.size() >= 20) ++n_tested;
  const double alpha = significance / std::max<long>(1, n_tested);
  for (const auto& [name, values] : series) {
    DiagnosticsEntry entry;
    entry.observable = name;
    const long n = static_cast<long>(values.size());
    if (n < 20) {
      report.sufficient = false;
      report.all_pass = false;
      entry.p2_pass = false;
      report.entries.push_back(entry);
      continue;
    }

    // P1: spatial average of the last configuration against the ensemble
    if (auto it = late_spatial.find(name); it != late_spatial.end()) {
      entry.p1_checked = true;
      const double m = mean_of(values);
      const double sd = std::sqrt(variance_of(values));
      entry.p1_z = sd > 0.0 ? (it->second - m) / sd : 0.0;
      entry.p1_pass = std::abs(entry.p1_z) <= 3.0;
    }

    // P2: first half vs second half, KS on block means; the block length
    // follows the autocorrelation time but is capped so each half keeps
    // enough blocks for the test to have power
    const double tau = integrated_autocorrelation(values);
    const long block = std::clamp<long>(std::lround(6.0 * tau), 1,
                                        std::max<long>(1, n / 20));
    auto block_means = [&](long lo, long hi) {
      std::vector<double> out;
      for (long t = lo; t + block <= hi; t += block) {
        double s = 0.0;
        for (long k = t; k < t + block; ++k) s += values[k];
        out.push_back(s / block);
      }
      return out;
    };
    auto first = block_means(0, n / 2);
    auto second = block_means(n / 2, n);
    if (first.size() < 5 || second.size() < 5) {
      report.sufficient = false;
      entry.p2_pass = false;
    } else {
      const auto ks = ks_two_sample(first, second);
      entry.p2_statistic = ks.statistic;
      entry.p2_p_value = ks.p_value;
      entry.p2_pass = ks.p_value >= alpha;
    }
    report.all_pass = report.all_pass && entry.p1_pass && entry.p2_pass;
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace onp
