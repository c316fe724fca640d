#pragma once

// Exact susceptibility of the sign variable on small graphs by full
// enumeration of the 2^n sign assignments at quenched couplings.

#include <span>

#include "onperc/lattice.hpp"

namespace onp {

// chi = <(sum_i sigma_i)^2> / n under the weight
//   prod_{present bonds (i,j)} exp(2 beta k_i k_j [sigma_i == sigma_j]);
// k holds the per-site quenched amplitudes; n_sites <= 24
double exact_sign_susceptibility(const LatticeGraph& graph,
                                 const BondMask& mask,
                                 std::span<const double> k, double beta);

}  // namespace onp
