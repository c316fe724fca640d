// sampler.hpp
//
// Markov chains over spin configurations: Metropolis sweeps for all action
// variants, the embedded cluster update driven by the FK bond rules, the
// quenched-angle O(2) chain, and equilibration diagnostics.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "onperc/lattice.hpp"
#include "onperc/percolation.hpp"
#include "onperc/rng.hpp"
#include "onperc/spin.hpp"
#include "onperc/stats.hpp"

namespace onp {

enum class SweepOrder : uint8_t { checkerboard = 0, sequential = 1 };
enum class StartKind : uint8_t { hot = 0, cold = 1 };

struct SweepStats {
  uint64_t proposals = 0;
  uint64_t accepts = 0;
  double acceptance() const {
    return proposals ? double(accepts) / proposals : 0.0;
  }
};

struct ChainState {
  SpinConfig config;
  Rng rng;
  uint64_t sweeps = 0;
  uint64_t total_proposals = 0, total_accepts = 0;
  double delta = 1.0;        // proposal cap angular radius
  bool tune_delta = true;    // frozen after thermalization
  SweepOrder order = SweepOrder::checkerboard;

  ChainState() : rng(0) {}
  explicit ChainState(Rng r) : rng(r) {}
};

// hot: randomized feasible configuration (uniform spins for the standard
// variant; for constrained variants a feasible start randomized by
// wide-proposal constraint-respecting sweeps at beta = 0).
// cold: all spins at the reference axis (equatorial axis for richard).
ChainState init_chain(const ModelParams& params, const LatticeGraph& graph,
                      const BondMask& mask, uint64_t seed,
                      StartKind start = StartKind::hot);

// one full pass over sites; proposal is uniform in a geodesic cap of radius
// delta around the current spin; hard error on an infeasible input config
SweepStats metropolis_sweep(ChainState& chain, const ModelParams& params,
                            const LatticeGraph& graph, const BondMask& mask);

// retune delta toward ~50% acceptance (thermalization only)
void tune_proposal_width(ChainState& chain, const SweepStats& stats);

// rotate every spin by a random angle in a random 2-plane (for the richard
// variant, in the plane perpendicular to u). The bond action and the bond
// constraint are invariant, so the move is always accepted; it decorrelates
// the global frame, which local moves only relax diffusively.
void global_rotation_update(ChainState& chain, const ModelParams& params);

struct EmbeddedUpdateRecord {
  int fk_clusters = 0;
  int occupied_bonds = 0;
  int frozen_bonds = 0;
  int flipped_sites = 0;
};

// FK construction on the Ising projection, then each FK cluster's sign is
// flipped with probability 1/2 (s -> s - 2(s.u)u). Feasibility of the
// result is a hard postcondition for constrained variants.
EmbeddedUpdateRecord embedded_cluster_update(ChainState& chain,
                                             const ModelParams& params,
                                             const LatticeGraph& graph,
                                             const BondMask& mask);

// flip each cluster's hemisphere with probability 1/2 (one coin per
// cluster); used where the bond realization must be shared between a
// measurement and the sign update
void flip_partition_clusters(SpinConfig& config,
                             const ClusterPartition& clusters,
                             std::span<const double> u, Rng& rng);

struct QuenchedFrame {
  std::vector<double> k;    // frozen coupling amplitudes sin(theta_bar)
  std::vector<double> phi;  // dynamical angles, kept reduced mod 2pi
  double delta = 1.0;       // proposal half-width
  bool tune_delta = true;
};

// freeze the polar structure of a configuration, keep the azimuths dynamic
QuenchedFrame make_quenched_frame(const SpinConfig& config,
                                  std::span<const double> u);

SweepStats quenched_phi_sweep(QuenchedFrame& frame, double beta,
                              const LatticeGraph& graph, const BondMask& mask,
                              Rng& rng);

// spatial-vs-ensemble (P1) and first-half-vs-second-half (P2) checks
struct DiagnosticsEntry {
  std::string observable;
  bool p1_checked = false;
  double p1_z = 0.0;        // late-config spatial average vs ensemble
  bool p1_pass = true;
  double p2_statistic = 0.0;
  double p2_p_value = 1.0;  // two-sample KS on block means
  bool p2_pass = true;
};

struct DiagnosticsReport {
  std::vector<DiagnosticsEntry> entries;
  bool all_pass = true;
  bool sufficient = true;  // enough samples for the tests
};

// series: per-configuration values of each tracked observable.
// late_spatial: for P1-checked observables, the spatial average in the final
// configuration (keyed by observable name; absent keys skip P1).
DiagnosticsReport ergodicity_diagnostics(
    const std::map<std::string, std::vector<double>>& series,
    const std::map<std::string, double>& late_spatial,
    double significance = 0.05);

}  // namespace onp
