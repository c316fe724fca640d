// percolation.cpp

#include "onperc/percolation.hpp"

#include <algorithm>
#include <stdexcept>

namespace onp {

bool ClusterPartition::any_wrap() const {
  for (size_t c = 0; c < sizes.size(); ++c)
    if (wraps_x[c] || wraps_y[c]) return true;
  return false;
}

int64_t ClusterPartition::largest_size() const {
  int64_t best = 0;
  for (int64_t s : sizes) best = std::max(best, s);
  return best;
}

double ClusterPartition::largest_fraction() const {
  return n_sites > 0 ? static_cast<double>(largest_size()) / n_sites : 0.0;
}

double mean_cluster_size(const ClusterPartition& p) {
  double sum = 0.0;
  for (int64_t s : p.sizes) sum += static_cast<double>(s) * s;
  return p.n_sites > 0 ? sum / p.n_sites : 0.0;
}

double mean_cluster_size_excluding_largest(const ClusterPartition& p) {
  double sum = 0.0;
  for (int64_t s : p.sizes) sum += static_cast<double>(s) * s;
  const int64_t big = p.largest_size();
  sum -= static_cast<double>(big) * big;
  return p.n_sites > 0 ? sum / p.n_sites : 0.0;
}

namespace {

// union-find over member sites with per-site displacement to the parent
class DisplacedForest {
 public:
  explicit DisplacedForest(int n)
      : parent_(n), off_x_(n, 0), off_y_(n, 0), rank_(n, 0),
        wrap_x_(n, 0), wrap_y_(n, 0) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
  }

  // root of i; path halving keeps offsets consistent
  int find(int i) {
    while (parent_[i] != i) {
      const int p = parent_[i];
      const int g = parent_[p];
      if (g != p) {
        off_x_[i] += off_x_[p];
        off_y_[i] += off_y_[p];
        parent_[i] = g;
      }
      i = parent_[i];
    }
    return i;
  }

  void offset_to_root(int i, int64_t& ox, int64_t& oy) {
    find(i);  // shorten the path first
    ox = oy = 0;
    while (parent_[i] != i) {
      ox += off_x_[i];
      oy += off_y_[i];
      i = parent_[i];
    }
  }

  // claim position(b) - position(a) = (dx,dy) on the covering plane
  void unite(int a, int b, int dx, int dy) {
    int64_t ax, ay, bx, by;
    offset_to_root(a, ax, ay);
    offset_to_root(b, bx, by);
    const int ra = find(a), rb = find(b);
    if (ra == rb) {
      // a closed cycle: offset mismatch is the winding, a multiple of L
      const int64_t mx = bx - ax - dx;
      const int64_t my = by - ay - dy;
      if (mx != 0) wrap_x_[ra] = 1;
      if (my != 0) wrap_y_[ra] = 1;
      return;
    }
    // attach the smaller tree; offsets keep pos(b) - pos(a) = (dx,dy)
    if (rank_[ra] < rank_[rb]) {
      parent_[ra] = rb;
      off_x_[ra] = static_cast<int32_t>(bx - ax - dx);
      off_y_[ra] = static_cast<int32_t>(by - ay - dy);
      wrap_x_[rb] |= wrap_x_[ra];
      wrap_y_[rb] |= wrap_y_[ra];
    } else {
      parent_[rb] = ra;
      off_x_[rb] = static_cast<int32_t>(ax - bx + dx);
      off_y_[rb] = static_cast<int32_t>(ay - by + dy);
      wrap_x_[ra] |= wrap_x_[rb];
      wrap_y_[ra] |= wrap_y_[rb];
      if (rank_[ra] == rank_[rb]) ++rank_[ra];
    }
  }

  bool root_wraps_x(int r) const { return wrap_x_[r] != 0; }
  bool root_wraps_y(int r) const { return wrap_y_[r] != 0; }

 private:
  std::vector<int32_t> parent_;
  std::vector<int32_t> off_x_, off_y_;
  std::vector<uint8_t> rank_;
  std::vector<uint8_t> wrap_x_, wrap_y_;
};

ClusterPartition finalize(const LatticeGraph& graph,
                          const std::vector<uint8_t>& member,
                          DisplacedForest& forest) {
  ClusterPartition part;
  part.n_sites = graph.n_sites;
  part.cluster_of.assign(graph.n_sites, -1);
  part.offset_x.assign(graph.n_sites, 0);
  part.offset_y.assign(graph.n_sites, 0);
  std::vector<int32_t> label_of_root(graph.n_sites, -1);
  for (int i = 0; i < graph.n_sites; ++i) {
    if (!member[i]) continue;
    ++part.member_count;
    const int r = forest.find(i);
    int32_t label = label_of_root[r];
    if (label < 0) {
      label = static_cast<int32_t>(part.sizes.size());
      label_of_root[r] = label;
      part.sizes.push_back(0);
      part.wraps_x.push_back(forest.root_wraps_x(r) ? 1 : 0);
      part.wraps_y.push_back(forest.root_wraps_y(r) ? 1 : 0);
    }
    part.cluster_of[i] = label;
    ++part.sizes[label];
    int64_t ox, oy;
    forest.offset_to_root(i, ox, oy);
    part.offset_x[i] = static_cast<int32_t>(ox);
    part.offset_y[i] = static_cast<int32_t>(oy);
  }
  return part;
}

}  // namespace

ClusterPartition cluster_sites(const LatticeGraph& graph,
                               const std::vector<uint8_t>& member,
                               const BondMask* mask) {
  if (static_cast<int>(member.size()) != graph.n_sites)
    throw std::invalid_argument("membership length mismatch");
  DisplacedForest forest(graph.n_sites);
  for (int b = 0; b < graph.n_bonds(); ++b) {
    if (mask && !mask->is_present(b)) continue;
    const Bond& bd = graph.bonds[b];
    if (member[bd.i] && member[bd.j])
      forest.unite(bd.i, bd.j, bd.dx, bd.dy);
  }
  return finalize(graph, member, forest);
}

ClusterPartition clusters_by_predicate(const SpinConfig&,
                                       const LatticeGraph& graph,
                                       const SitePredicate& predicate,
                                       const BondMask* mask) {
  std::vector<uint8_t> member(graph.n_sites);
  for (int i = 0; i < graph.n_sites; ++i) member[i] = predicate(i) ? 1 : 0;
  return cluster_sites(graph, member, mask);
}

ClusterPartition cluster_like_sigma(const LatticeGraph& graph,
                                    const IsingProjection& proj,
                                    const BondMask* mask) {
  DisplacedForest forest(graph.n_sites);
  for (int b = 0; b < graph.n_bonds(); ++b) {
    if (mask && !mask->is_present(b)) continue;
    const Bond& bd = graph.bonds[b];
    if (proj.sigma[bd.i] == proj.sigma[bd.j])
      forest.unite(bd.i, bd.j, bd.dx, bd.dy);
  }
  std::vector<uint8_t> all(graph.n_sites, 1);
  return finalize(graph, all, forest);
}

FkRealization fk_realize(const SpinConfig& config, const LatticeGraph& graph,
                         const ModelParams& params,
                         const ClusterPartition& h_partition,
                         const IsingProjection& proj, const BondMask& mask,
                         Rng& rng) {
  FkRealization fk;
  fk.bonds.occupied.assign(graph.bonds.size(), 0);
  fk.bonds.frozen.assign(graph.bonds.size(), 0);
  const bool constrained = params.has_bond_constraint();
  const double eps = params.epsilon;

  DisplacedForest forest(graph.n_sites);
  for (int b = 0; b < graph.n_bonds(); ++b) {
    if (!mask.is_present(b)) continue;
    const Bond& bd = graph.bonds[b];
    if (h_partition.cluster_of[bd.i] != h_partition.cluster_of[bd.j]) continue;
    bool occ;
    if (constrained && bond_frozen(config.spin(bd.i), config.spin(bd.j),
                                   proj.s_parallel[bd.i],
                                   proj.s_parallel[bd.j], eps)) {
      fk.bonds.frozen[b] = 1;
      ++fk.bonds.frozen_count;
      occ = true;
    } else {
      occ = rng.bernoulli(fk_bond_probability(
          params.beta, proj.s_parallel[bd.i], proj.s_parallel[bd.j]));
    }
    if (occ) {
      fk.bonds.occupied[b] = 1;
      ++fk.bonds.occupied_count;
      forest.unite(bd.i, bd.j, bd.dx, bd.dy);
    }
  }
  std::vector<uint8_t> all(graph.n_sites, 1);
  fk.clusters = finalize(graph, all, forest);
  return fk;
}

RussoReport russo_report(const SpinConfig&, const LatticeGraph& graph,
                         const SitePredicate& predicate) {
  std::vector<uint8_t> in_set(graph.n_sites), in_comp(graph.n_sites);
  for (int i = 0; i < graph.n_sites; ++i) {
    in_set[i] = predicate(i) ? 1 : 0;
    in_comp[i] = 1 - in_set[i];
  }
  const auto part_e = cluster_sites(graph, in_set, nullptr);
  const auto part_c = cluster_sites(graph, in_comp, nullptr);
  RussoReport rep;
  rep.set_wraps = part_e.any_wrap();
  rep.complement_wraps = part_c.any_wrap();
  rep.mean_size_set = mean_cluster_size(part_e);
  rep.mean_size_complement = mean_cluster_size(part_c);
  rep.largest_fraction_set = part_e.largest_fraction();
  rep.largest_fraction_complement = part_c.largest_fraction();
  return rep;
}

ClusterPartition bernoulli_site_mode(const LatticeGraph& graph, double p,
                                     Rng& rng) {
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("occupation probability must be in [0,1]");
  std::vector<uint8_t> member(graph.n_sites);
  for (auto& m : member) m = rng.bernoulli(p) ? 1 : 0;
  return cluster_sites(graph, member, nullptr);
}

bool refines(const ClusterPartition& fine, const ClusterPartition& coarse) {
  if (fine.n_sites != coarse.n_sites) return false;
  std::vector<int32_t> image(fine.cluster_count(), -2);
  for (int i = 0; i < fine.n_sites; ++i) {
    const int32_t f = fine.cluster_of[i];
    if (f < 0) continue;
    const int32_t c = coarse.cluster_of[i];
    if (image[f] == -2)
      image[f] = c;
    else if (image[f] != c)
      return false;
  }
  return true;
}

}  // namespace onp
