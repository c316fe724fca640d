// percolation.hpp
//
// Cluster identification for arbitrary site predicates and FK bond
// realizations. Wrapping (the finite-volume percolation proxy) is detected
// with a displacement union-find: every site carries an integer offset to
// its root on the covering plane, and a union that closes a cycle with an
// offset mismatch of a nonzero multiple of L marks the cluster as winding.

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "onperc/lattice.hpp"
#include "onperc/spin.hpp"

namespace onp {

struct ClusterPartition {
  int n_sites = 0;       // |Lambda|, including sites outside the set
  int64_t member_count = 0;
  std::vector<int32_t> cluster_of;  // per site, -1 = not in set
  std::vector<int32_t> offset_x, offset_y;  // displacement to cluster root
  std::vector<int64_t> sizes;               // per cluster
  std::vector<uint8_t> wraps_x, wraps_y;    // per cluster

  int cluster_count() const { return static_cast<int>(sizes.size()); }
  bool any_wrap() const;
  int64_t largest_size() const;
  // largest cluster size / |Lambda|
  double largest_fraction() const;
};

// expected size of the cluster containing a uniformly random site;
// sites outside the set contribute size 0
double mean_cluster_size(const ClusterPartition& partition);

// same estimator with the largest cluster removed (scaling variant)
double mean_cluster_size_excluding_largest(const ClusterPartition& partition);

// connects member sites across bonds present in mask (pass nullptr for the
// full lattice adjacency)
ClusterPartition cluster_sites(const LatticeGraph& graph,
                               const std::vector<uint8_t>& member,
                               const BondMask* mask = nullptr);

using SitePredicate = std::function<bool(int site)>;

ClusterPartition clusters_by_predicate(const SpinConfig& config,
                                       const LatticeGraph& graph,
                                       const SitePredicate& predicate,
                                       const BondMask* mask = nullptr);

// H-partition: all sites are members, neighbors joined iff their Ising
// signs agree and the bond is present
ClusterPartition cluster_like_sigma(const LatticeGraph& graph,
                                    const IsingProjection& proj,
                                    const BondMask* mask = nullptr);

struct BondRealization {
  std::vector<uint8_t> occupied;  // per bond
  std::vector<uint8_t> frozen;    // per bond, occupied with probability 1
  int occupied_count = 0;
  int frozen_count = 0;
};

// true if flipping one endpoint of a same-sigma bond would break the bond
// constraint; such bonds must stay in one FK cluster
inline bool bond_frozen(std::span<const double> si, std::span<const double> sj,
                        double s_par_i, double s_par_j, double epsilon) {
  // flipping either endpoint alone raises |s_i - s_j|^2 by 4 s_par_i s_par_j
  return dist2(si, sj) + 4.0 * s_par_i * s_par_j >= epsilon * epsilon;
}

// FK2 bond occupation probability, 1 - exp(-2 beta s_par_i s_par_j)
inline double fk_bond_probability(double beta, double s_par_i,
                                  double s_par_j) {
  return -std::expm1(-2.0 * beta * s_par_i * s_par_j);
}

struct FkRealization {
  BondRealization bonds;
  ClusterPartition clusters;  // FK clusters over all sites
};

// stochastic bond occupation within like-sigma pairs; constraint-binding
// bonds are frozen. The resulting partition refines h_partition.
FkRealization fk_realize(const SpinConfig& config, const LatticeGraph& graph,
                         const ModelParams& params,
                         const ClusterPartition& h_partition,
                         const IsingProjection& proj, const BondMask& mask,
                         Rng& rng);

struct RussoReport {
  bool set_wraps = false, complement_wraps = false;
  double mean_size_set = 0.0, mean_size_complement = 0.0;
  double largest_fraction_set = 0.0, largest_fraction_complement = 0.0;
};

// one-configuration wrap/size report for a predicate and its complement
RussoReport russo_report(const SpinConfig& config, const LatticeGraph& graph,
                         const SitePredicate& predicate);

// i.i.d. site occupation with probability p; the validation channel
ClusterPartition bernoulli_site_mode(const LatticeGraph& graph, double p,
                                     Rng& rng);

// true iff every cluster of fine lies inside a single cluster of coarse
bool refines(const ClusterPartition& fine, const ClusterPartition& coarse);

}  // namespace onp
