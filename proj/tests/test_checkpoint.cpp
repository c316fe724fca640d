#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "onperc/checkpoint.hpp"

using namespace onp;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("onperc_ckpt_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

Checkpoint make_run(uint64_t seed, int sweeps) {
  Checkpoint cp;
  cp.params.variant = Variant::cut;
  cp.params.epsilon = 0.8;
  cp.params.beta = 0.4;
  cp.kind = LatticeKind::triangular;
  cp.L = 6;
  cp.master_seed = seed;
  const auto g = build_lattice(cp.kind, cp.L);
  Rng mask_rng(derive_seed(seed, 1));
  cp.mask = dilute_bonds(g, 0.05, mask_rng);
  cp.chain = init_chain(cp.params, g, cp.mask, derive_seed(seed, 0));
  for (int t = 0; t < sweeps; ++t) {
    const auto st = metropolis_sweep(cp.chain, cp.params, g, cp.mask);
    tune_proposal_width(cp.chain, st);
    embedded_cluster_update(cp.chain, cp.params, g, cp.mask);
  }
  return cp;
}

void advance(Checkpoint& cp, int sweeps) {
  const auto g = build_lattice(cp.kind, cp.L);
  for (int t = 0; t < sweeps; ++t) {
    const auto st = metropolis_sweep(cp.chain, cp.params, g, cp.mask);
    tune_proposal_width(cp.chain, st);
    embedded_cluster_update(cp.chain, cp.params, g, cp.mask);
  }
}

std::vector<char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), (std::streamsize)bytes.size());
}

}  // namespace

TEST_CASE("roundtrip preserves every field") {
  TempDir tmp;
  auto cp = make_run(42, 7);
  cp.params.u = {0.0, 1.0, 0.0};
  const auto path = tmp.file("a.bin");
  save_checkpoint(path, cp);
  const auto back = load_checkpoint(path);
  CHECK(back.params.n == cp.params.n);
  CHECK(back.params.beta == cp.params.beta);
  CHECK(back.params.variant == cp.params.variant);
  CHECK(back.params.epsilon == cp.params.epsilon);
  CHECK(back.params.b == cp.params.b);
  CHECK(back.params.u == cp.params.u);
  CHECK(back.kind == cp.kind);
  CHECK(back.L == cp.L);
  CHECK(back.master_seed == cp.master_seed);
  CHECK(back.mask.present == cp.mask.present);
  CHECK(back.mask.removal_probability == cp.mask.removal_probability);
  CHECK(back.chain.config.s == cp.chain.config.s);
  CHECK(back.chain.config.generation == cp.chain.config.generation);
  CHECK(back.chain.sweeps == cp.chain.sweeps);
  CHECK(back.chain.total_proposals == cp.chain.total_proposals);
  CHECK(back.chain.total_accepts == cp.chain.total_accepts);
  CHECK(back.chain.delta == cp.chain.delta);
  CHECK(back.chain.tune_delta == cp.chain.tune_delta);
  CHECK(back.chain.order == cp.chain.order);
  CHECK(back.chain.rng.state().s == cp.chain.rng.state().s);
  CHECK(back.chain.rng.state().draws == cp.chain.rng.state().draws);
  CHECK(back.chain.rng.state().seed == cp.chain.rng.state().seed);
}

TEST_CASE("resumed trajectory is bit-identical to a straight one") {
  TempDir tmp;
  auto straight = make_run(9, 80);
  auto head = make_run(9, 50);
  const auto path = tmp.file("head.bin");
  save_checkpoint(path, head);
  auto resumed = load_checkpoint(path);
  advance(resumed, 30);
  CHECK(resumed.chain.sweeps == straight.chain.sweeps);
  CHECK(resumed.chain.total_accepts == straight.chain.total_accepts);
  CHECK(resumed.chain.delta == straight.chain.delta);
  CHECK(resumed.chain.config.s == straight.chain.config.s);
  CHECK(resumed.chain.rng.state().s == straight.chain.rng.state().s);
  CHECK(resumed.chain.rng.state().draws == straight.chain.rng.state().draws);
  // and the serialized forms agree byte for byte
  const auto pa = tmp.file("resumed.bin"), pb = tmp.file("straight.bin");
  save_checkpoint(pa, resumed);
  save_checkpoint(pb, straight);
  CHECK(slurp(pa) == slurp(pb));
}

TEST_CASE("corruption is detected") {
  TempDir tmp;
  const auto cp = make_run(3, 4);
  const auto path = tmp.file("c.bin");
  save_checkpoint(path, cp);
  auto bytes = slurp(path);
  REQUIRE(bytes.size() > 200);

  SUBCASE("flipped payload byte breaks the digest") {
    bytes[bytes.size() / 2] ^= 0x40;
    spit(path, bytes);
    CHECK_THROWS_AS(load_checkpoint(path), std::runtime_error);
  }
  SUBCASE("truncated file") {
    bytes.resize(bytes.size() - 9);
    spit(path, bytes);
    CHECK_THROWS_AS(load_checkpoint(path), std::runtime_error);
  }
  SUBCASE("wrong magic") {
    bytes[0] ^= 0x01;
    spit(path, bytes);
    CHECK_THROWS_AS(load_checkpoint(path), std::runtime_error);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_checkpoint(tmp.file("nope.bin")), std::runtime_error);
  }
}

TEST_CASE("require_same_run guards physics and lattice") {
  const auto cp = make_run(5, 2);
  CHECK_NOTHROW(require_same_run(cp, cp.params, cp.kind, cp.L));
  auto beta_changed = cp.params;
  beta_changed.beta += 0.1;
  CHECK_THROWS_AS(require_same_run(cp, beta_changed, cp.kind, cp.L),
                  std::invalid_argument);
  auto eps_changed = cp.params;
  eps_changed.epsilon = 0.5;
  CHECK_THROWS_AS(require_same_run(cp, eps_changed, cp.kind, cp.L),
                  std::invalid_argument);
  CHECK_THROWS_AS(require_same_run(cp, cp.params, LatticeKind::square, cp.L),
                  std::invalid_argument);
  CHECK_THROWS_AS(require_same_run(cp, cp.params, cp.kind, cp.L + 2),
                  std::invalid_argument);
}
