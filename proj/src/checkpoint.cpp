// checkpoint.cpp

#include "onperc/checkpoint.hpp"

#include <cmath>
#include <stdexcept>

#include "onperc/binio.hpp"

namespace onp {

namespace {
constexpr uint64_t kMagic = 0x4f4e5043484b5031ull;  // "ONPCHKP1"
constexpr uint32_t kVersion = 1;
}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& cp) {
  BinWriter w;
  w.put(kMagic);
  w.put(kVersion);
  w.put(static_cast<uint8_t>(cp.kind));
  w.put(static_cast<uint32_t>(cp.L));
  w.put(static_cast<uint32_t>(cp.params.n));
  w.put(static_cast<uint8_t>(cp.params.variant));
  w.put(cp.params.beta);
  w.put(cp.params.epsilon);
  w.put(cp.params.b);
  w.put(static_cast<uint32_t>(cp.params.u.size()));
  w.put_bytes(cp.params.u.data(), cp.params.u.size() * sizeof(double));
  w.put(cp.master_seed);

  w.put(cp.mask.removal_probability);
  w.put(static_cast<uint32_t>(cp.mask.present.size()));
  w.put_bytes(cp.mask.present.data(), cp.mask.present.size());

  const RngState rs = cp.chain.rng.state();
  w.put(rs.seed);
  w.put(rs.draws);
  for (uint64_t word : rs.s) w.put(word);
  w.put(cp.chain.sweeps);
  w.put(cp.chain.total_proposals);
  w.put(cp.chain.total_accepts);
  w.put(cp.chain.delta);
  w.put(static_cast<uint8_t>(cp.chain.tune_delta));
  w.put(static_cast<uint8_t>(cp.chain.order));

  w.put(cp.chain.config.generation);
  w.put_bytes(cp.chain.config.s.data(),
              cp.chain.config.s.size() * sizeof(double));
  w.put(w.digest());
  w.write_file(path);
}

Checkpoint load_checkpoint(const std::string& path) {
  BinReader r = BinReader::read_file(path);
  if (r.get<uint64_t>() != kMagic)
    throw std::runtime_error("not a checkpoint file: " + path);
  if (r.get<uint32_t>() != kVersion)
    throw std::runtime_error("checkpoint version mismatch: " + path);

  Checkpoint cp;
  cp.kind = static_cast<LatticeKind>(r.get<uint8_t>());
  cp.L = static_cast<int>(r.get<uint32_t>());
  const int n = static_cast<int>(r.get<uint32_t>());
  cp.params.n = n;
  cp.params.variant = static_cast<Variant>(r.get<uint8_t>());
  cp.params.beta = r.get<double>();
  cp.params.epsilon = r.get<double>();
  cp.params.b = r.get<double>();
  const auto n_axis = r.get<uint32_t>();
  cp.params.u.resize(n_axis);
  r.get_bytes(cp.params.u.data(), n_axis * sizeof(double));
  cp.master_seed = r.get<uint64_t>();

  cp.mask.removal_probability = r.get<double>();
  const auto n_bonds = r.get<uint32_t>();
  cp.mask.present.resize(n_bonds);
  r.get_bytes(cp.mask.present.data(), n_bonds);

  RngState rs;
  rs.seed = r.get<uint64_t>();
  rs.draws = r.get<uint64_t>();
  for (auto& word : rs.s) word = r.get<uint64_t>();
  cp.chain.rng = Rng::from_state(rs);
  cp.chain.sweeps = r.get<uint64_t>();
  cp.chain.total_proposals = r.get<uint64_t>();
  cp.chain.total_accepts = r.get<uint64_t>();
  cp.chain.delta = r.get<double>();
  cp.chain.tune_delta = r.get<uint8_t>() != 0;
  cp.chain.order = static_cast<SweepOrder>(r.get<uint8_t>());

  cp.chain.config = make_config(n, cp.L * cp.L);
  cp.chain.config.generation = r.get<uint64_t>();
  r.get_bytes(cp.chain.config.s.data(),
              cp.chain.config.s.size() * sizeof(double));

  const size_t payload = r.pos();
  if (r.get<uint64_t>() != r.digest_prefix(payload))
    throw std::runtime_error("checkpoint digest mismatch: " + path);
  return cp;
}

void require_same_run(const Checkpoint& cp, const ModelParams& params,
                      LatticeKind kind, int L) {
  auto reject = [&](const char* what) {
    throw std::invalid_argument(
        std::string("checkpoint belongs to a different run: ") + what);
  };
  if (cp.kind != kind) reject("lattice kind");
  if (cp.L != L) reject("lattice size");
  if (cp.params.n != params.n) reject("spin dimension");
  if (cp.params.variant != params.variant) reject("model variant");
  if (cp.params.beta != params.beta) reject("beta");
  if (cp.params.epsilon != params.epsilon) reject("epsilon");
  if (cp.params.b != params.b) reject("b");
  if (cp.params.u != params.u) reject("axis");
}

}  // namespace onp
