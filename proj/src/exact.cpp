// exact.cpp

#include "onperc/exact.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace onp {

double exact_sign_susceptibility(const LatticeGraph& graph,
                                 const BondMask& mask,
                                 std::span<const double> k, double beta) {
  const int n = graph.n_sites;
  if (n > 24)
    throw std::invalid_argument("exact_sign_susceptibility: graph too large");
  if (static_cast<int>(k.size()) != n)
    throw std::invalid_argument("exact_sign_susceptibility: k size mismatch");

  struct Coupling {
    uint32_t i, j;
    double w;  // exp(2 beta k_i k_j)
  };
  std::vector<Coupling> couplings;
  for (int b = 0; b < graph.n_bonds(); ++b) {
    if (!mask.is_present(b)) continue;
    const Bond& bd = graph.bonds[b];
    couplings.push_back({bd.i, bd.j, std::exp(2.0 * beta * k[bd.i] * k[bd.j])});
  }

  double z = 0.0, acc = 0.0;
  const uint32_t n_states = 1u << n;
  for (uint32_t state = 0; state < n_states; ++state) {
    double w = 1.0;
    for (const auto& c : couplings)
      if (((state >> c.i) & 1u) == ((state >> c.j) & 1u)) w *= c.w;
    const int mag = 2 * __builtin_popcount(state) - n;
    z += w;
    acc += w * mag * mag;
  }
  return acc / (z * n);
}

}  // namespace onp
