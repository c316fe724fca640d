#pragma once

// Bit-exact chain checkpoints: parameters, bond mask, generator state,
// and the spin configuration, digest-protected.

#include <cstdint>
#include <string>

#include "onperc/lattice.hpp"
#include "onperc/sampler.hpp"
#include "onperc/spin.hpp"

namespace onp {

struct Checkpoint {
  ModelParams params;
  LatticeKind kind = LatticeKind::triangular;
  int L = 0;
  BondMask mask;
  ChainState chain;
  uint64_t master_seed = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& cp);
Checkpoint load_checkpoint(const std::string& path);

// rejects resuming under different physics or lattice
void require_same_run(const Checkpoint& cp, const ModelParams& params,
                      LatticeKind kind, int L);

}  // namespace onp
