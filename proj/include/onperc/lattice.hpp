// lattice.hpp
//
// Periodic 2D lattices on a torus. The triangular lattice is realized on a
// square index grid with two extra diagonal neighbors per site (+x+y and
// -x-y), which gives the usual 6-neighbor topology while keeping row-major
// indexing: site = y*L + x.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "onperc/rng.hpp"

namespace onp {

enum class LatticeKind : uint8_t { triangular = 0, square = 1 };

const char* to_string(LatticeKind k);
LatticeKind lattice_kind_from_string(const std::string& s);

// canonical bond: i < j; (dx,dy) is the lattice step from i to j on the
// covering plane, (wrap_x,wrap_y) the periodic image offset crossed.
struct Bond {
  uint32_t i, j;
  int8_t dx, dy;
  int8_t wrap_x, wrap_y;
};

struct LatticeGraph {
  LatticeKind kind;
  int L = 0;
  int n_sites = 0;
  int coordination = 0;  // 6 triangular, 4 square
  std::vector<uint32_t> neighbors;      // n_sites * coordination
  std::vector<uint32_t> neighbor_bond;  // bond index per neighbor slot
  std::vector<Bond> bonds;

  int x_of(int s) const { return s % L; }
  int y_of(int s) const { return s / L; }
  int site_at(int x, int y) const {
    x %= L;
    if (x < 0) x += L;
    y %= L;
    if (y < 0) y += L;
    return y * L + x;
  }
  int n_bonds() const { return static_cast<int>(bonds.size()); }
  std::span<const uint32_t> neighbors_of(int s) const {
    return {neighbors.data() + static_cast<size_t>(s) * coordination,
            static_cast<size_t>(coordination)};
  }
  std::span<const uint32_t> bonds_of(int s) const {
    return {neighbor_bond.data() + static_cast<size_t>(s) * coordination,
            static_cast<size_t>(coordination)};
  }
};

// rejects L < 4 or odd L
LatticeGraph build_lattice(LatticeKind kind, int L);

// validation channel for exact-enumeration runs on tiny lattices (L >= 3);
// same topology, no parity/size guard
LatticeGraph build_lattice_unchecked(LatticeKind kind, int L);

struct BondMask {
  std::vector<uint8_t> present;  // one flag per bond
  double removal_probability = 0.0;

  bool all_present() const;
  int removed_count() const;
  bool is_present(int b) const { return present[b] != 0; }
};

// full mask, nothing removed
BondMask full_mask(const LatticeGraph& graph);

// i.i.d. bond removal with the given probability
BondMask dilute_bonds(const LatticeGraph& graph, double removal_probability,
                      Rng& rng);

}  // namespace onp
