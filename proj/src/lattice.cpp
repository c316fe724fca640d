// lattice.cpp

#include "onperc/lattice.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace onp {

const char* to_string(LatticeKind k) {
  return k == LatticeKind::triangular ? "triangular" : "square";
}

LatticeKind lattice_kind_from_string(const std::string& s) {
  if (s == "triangular") return LatticeKind::triangular;
  if (s == "square") return LatticeKind::square;
  throw std::invalid_argument("unknown lattice kind: " + s);
}

namespace {

LatticeGraph build_impl(LatticeKind kind, int L) {
  LatticeGraph g;
  g.kind = kind;
  g.L = L;
  g.n_sites = L * L;
  g.coordination = kind == LatticeKind::triangular ? 6 : 4;

  // forward steps per site; the reverse directions come from the partner site
  static const int tri_steps[3][2] = {{1, 0}, {0, 1}, {1, 1}};
  static const int sq_steps[2][2] = {{1, 0}, {0, 1}};
  const auto* steps = kind == LatticeKind::triangular ? tri_steps : sq_steps;
  const int n_steps = kind == LatticeKind::triangular ? 3 : 2;

  g.bonds.reserve(static_cast<size_t>(g.n_sites) * n_steps);
  for (int y = 0; y < L; ++y)
    for (int x = 0; x < L; ++x) {
      const uint32_t a = static_cast<uint32_t>(y * L + x);
      for (int k = 0; k < n_steps; ++k) {
        const int dx = steps[k][0], dy = steps[k][1];
        const int wx = (x + dx >= L) ? 1 : 0;
        const int wy = (y + dy >= L) ? 1 : 0;
        const uint32_t b =
            static_cast<uint32_t>(((y + dy) % L) * L + (x + dx) % L);
        Bond bond;
        if (a < b) {
          bond = {a, b, int8_t(dx), int8_t(dy), int8_t(wx), int8_t(wy)};
        } else {
          bond = {b, a, int8_t(-dx), int8_t(-dy), int8_t(-wx), int8_t(-wy)};
        }
        g.bonds.push_back(bond);
      }
    }

  // deterministic bond enumeration: sort by (i, j, dx, dy)
  std::sort(g.bonds.begin(), g.bonds.end(), [](const Bond& a, const Bond& b) {
    if (a.i != b.i) return a.i < b.i;
    if (a.j != b.j) return a.j < b.j;
    if (a.dx != b.dx) return a.dx < b.dx;
    return a.dy < b.dy;
  });

  // neighbor tables; slots ordered +x, -x, +y, -y (+x+y, -x-y for triangular)
  g.neighbors.assign(static_cast<size_t>(g.n_sites) * g.coordination, 0);
  g.neighbor_bond.assign(static_cast<size_t>(g.n_sites) * g.coordination, 0);
  auto slot_of = [&](int dx, int dy) {
    if (dx == 1 && dy == 0) return 0;
    if (dx == -1 && dy == 0) return 1;
    if (dx == 0 && dy == 1) return 2;
    if (dx == 0 && dy == -1) return 3;
    if (dx == 1 && dy == 1) return 4;
    return 5;  // (-1,-1)
  };
  for (int b = 0; b < g.n_bonds(); ++b) {
    const Bond& bd = g.bonds[b];
    const size_t si = static_cast<size_t>(bd.i) * g.coordination +
                      slot_of(bd.dx, bd.dy);
    const size_t sj = static_cast<size_t>(bd.j) * g.coordination +
                      slot_of(-bd.dx, -bd.dy);
    g.neighbors[si] = bd.j;
    g.neighbor_bond[si] = static_cast<uint32_t>(b);
    g.neighbors[sj] = bd.i;
    g.neighbor_bond[sj] = static_cast<uint32_t>(b);
  }
  return g;
}

}  // namespace

LatticeGraph build_lattice(LatticeKind kind, int L) {
  if (L < 4) throw std::invalid_argument("lattice size must be >= 4");
  if (L % 2 != 0) throw std::invalid_argument("lattice size must be even");
  return build_impl(kind, L);
}

LatticeGraph build_lattice_unchecked(LatticeKind kind, int L) {
  if (L < 3) throw std::invalid_argument("lattice size must be >= 3");
  return build_impl(kind, L);
}

bool BondMask::all_present() const {
  for (uint8_t p : present)
    if (!p) return false;
  return true;
}

int BondMask::removed_count() const {
  int n = 0;
  for (uint8_t p : present) n += p ? 0 : 1;
  return n;
}

BondMask full_mask(const LatticeGraph& graph) {
  BondMask m;
  m.present.assign(graph.bonds.size(), 1);
  m.removal_probability = 0.0;
  return m;
}

BondMask dilute_bonds(const LatticeGraph& graph, double removal_probability,
                      Rng& rng) {
  if (removal_probability < 0.0 || removal_probability >= 1.0)
    throw std::invalid_argument("removal probability must be in [0,1)");
  BondMask m;
  m.removal_probability = removal_probability;
  m.present.resize(graph.bonds.size());
  for (auto& p : m.present)
    p = rng.bernoulli(removal_probability) ? 0 : 1;
  return m;
}

}  // namespace onp
