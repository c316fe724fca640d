#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <vector>

#include "onperc/observables.hpp"
#include "onperc/percolation.hpp"
#include "onperc/sampler.hpp"

using namespace onp;

namespace {

const LatticeGraph& tri8() {
  static const LatticeGraph g = build_lattice(LatticeKind::triangular, 8);
  return g;
}

}  // namespace

TEST_CASE("same seed gives the same trajectory") {
  const auto& g = tri8();
  const auto mask = full_mask(g);
  ModelParams p;
  p.beta = 1.0;
  auto a = init_chain(p, g, mask, 5);
  auto b = init_chain(p, g, mask, 5);
  for (int t = 0; t < 20; ++t) {
    metropolis_sweep(a, p, g, mask);
    metropolis_sweep(b, p, g, mask);
    embedded_cluster_update(a, p, g, mask);
    embedded_cluster_update(b, p, g, mask);
    global_rotation_update(a, p);
    global_rotation_update(b, p);
  }
  CHECK(a.sweeps == b.sweeps);
  CHECK(a.total_accepts == b.total_accepts);
  CHECK(a.config.s == b.config.s);
  auto c = init_chain(p, g, mask, 6);
  metropolis_sweep(c, p, g, mask);
  metropolis_sweep(a, p, g, mask);
  CHECK(a.config.s != c.config.s);
}

TEST_CASE("cold starts") {
  const auto& g = tri8();
  const auto mask = full_mask(g);
  ModelParams p;
  auto chain = init_chain(p, g, mask, 1, StartKind::cold);
  const auto u = p.axis();
  for (int i = 0; i < g.n_sites; ++i)
    CHECK(dot(chain.config.spin(i), u) == doctest::Approx(1.0));

  // richard cold start must satisfy |s.u| < 1 - b: it sits on the equator
  ModelParams r;
  r.variant = Variant::richard;
  r.b = 0.5;
  r.epsilon = 0.8;
  auto rc = init_chain(r, g, mask, 1, StartKind::cold);
  CHECK(count_violations(rc.config, g, r, mask) == 0);
  for (int i = 0; i < g.n_sites; ++i)
    CHECK(std::abs(dot(rc.config.spin(i), u)) < 1.0 - r.b);
}

TEST_CASE("hot starts are feasible for constrained variants") {
  const auto& g = tri8();
  const auto mask = full_mask(g);
  ModelParams cut;
  cut.variant = Variant::cut;
  cut.epsilon = 0.5;
  cut.beta = 0.7;
  auto cc = init_chain(cut, g, mask, 3, StartKind::hot);
  CHECK(count_violations(cc.config, g, cut, mask) == 0);
  CHECK(cc.sweeps == 0);  // randomization does not count as trajectory

  ModelParams rich;
  rich.variant = Variant::richard;
  rich.b = 0.5;
  rich.epsilon = 0.8;
  rich.beta = 1.2;
  auto rc = init_chain(rich, g, mask, 3, StartKind::hot);
  CHECK(count_violations(rc.config, g, rich, mask) == 0);

  // unconstrained hot start is i.i.d. uniform: the mean z-component of
  // 64 spins has sd 1/sqrt(3*64)
  ModelParams std_p;
  auto sc = init_chain(std_p, g, mask, 3, StartKind::hot);
  double mz = 0.0;
  for (int i = 0; i < g.n_sites; ++i) mz += sc.config.spin(i)[2];
  CHECK(std::abs(mz / g.n_sites) < 5.0 / std::sqrt(3.0 * g.n_sites));
}

TEST_CASE("beta zero unconstrained accepts every proposal") {
  const auto& g = tri8();
  const auto mask = full_mask(g);
  ModelParams p;
  p.beta = 0.0;
  auto chain = init_chain(p, g, mask, 9);
  const auto st = metropolis_sweep(chain, p, g, mask);
  CHECK(st.proposals == (uint64_t)g.n_sites);
  CHECK(st.accepts == st.proposals);
  CHECK(chain.sweeps == 1);
  CHECK(chain.config.generation == 1);
}

TEST_CASE("infeasible input configuration is a hard error") {
  const auto& g = tri8();
  const auto mask = full_mask(g);
  ModelParams p;
  p.variant = Variant::cut;
  p.epsilon = 0.3;
  auto chain = init_chain(p, g, mask, 2);
  // corrupt one spin to violate the bond constraint
  chain.config.spin(0)[0] = 0.0;
  chain.config.spin(0)[1] = 0.0;
  chain.config.spin(0)[2] = -1.0;
  for (int i = 1; i < g.n_sites; ++i) {
    chain.config.spin(i)[0] = 0.0;
    chain.config.spin(i)[1] = 0.0;
    chain.config.spin(i)[2] = 1.0;
  }
  chain.sweeps = 0;
  CHECK_THROWS_AS(metropolis_sweep(chain, p, g, mask), std::runtime_error);
}

TEST_CASE("tuning pushes delta toward the target window") {
  ChainState chain;
  chain.delta = 1.0;
  SweepStats hot;
  hot.proposals = 100;
  hot.accepts = 100;
  tune_proposal_width(chain, hot);
  CHECK(chain.delta == doctest::Approx(1.05));
  for (int i = 0; i < 200; ++i) tune_proposal_width(chain, hot);
  CHECK(chain.delta == doctest::Approx(M_PI));

  SweepStats cold;
  cold.proposals = 100;
  cold.accepts = 10;
  for (int i = 0; i < 500; ++i) tune_proposal_width(chain, cold);
  CHECK(chain.delta >= 1e-3);
  chain.tune_delta = false;
  const double frozen = chain.delta;
  tune_proposal_width(chain, hot);
  CHECK(chain.delta == frozen);
}

TEST_CASE("metropolis preserves feasibility under the cut") {
  const auto& g = tri8();
  const auto mask = full_mask(g);
  ModelParams p;
  p.variant = Variant::cut;
  p.epsilon = 0.65;
  p.beta = 0.0;
  auto chain = init_chain(p, g, mask, 11);
  for (int t = 0; t < 50; ++t) {
    metropolis_sweep(chain, p, g, mask);
    REQUIRE(count_violations(chain.config, g, p, mask) == 0);
  }
  CHECK(max_norm_error(chain.config) < 1e-9);
}

TEST_CASE("embedded update flips signs but not magnitudes") {
  const auto& g = tri8();
  const auto mask = full_mask(g);
  ModelParams p;
  p.beta = 0.9;
  auto chain = init_chain(p, g, mask, 13);
  for (int t = 0; t < 10; ++t) metropolis_sweep(chain, p, g, mask);
  const auto u = p.axis();
  const auto before = hemisphere_decompose(chain.config, u);
  const auto rec = embedded_cluster_update(chain, p, g, mask);
  const auto after = hemisphere_decompose(chain.config, u);
  for (int i = 0; i < g.n_sites; ++i) {
    CHECK(after.s_parallel[i] == doctest::Approx(before.s_parallel[i]));
    CHECK(after.s_perp_norm[i] == doctest::Approx(before.s_perp_norm[i]));
  }
  CHECK(rec.fk_clusters >= 1);
  CHECK(rec.occupied_bonds >= rec.frozen_bonds);
}

TEST_CASE("embedded update at beta zero flips independent signs") {
  const auto& g = tri8();
  const auto mask = full_mask(g);
  ModelParams p;
  p.beta = 0.0;
  auto chain = init_chain(p, g, mask, 17);
  const auto u = p.axis();
  long flips = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const auto before = hemisphere_decompose(chain.config, u);
    embedded_cluster_update(chain, p, g, mask);
    const auto after = hemisphere_decompose(chain.config, u);
    for (int i = 0; i < g.n_sites; ++i)
      if (before.sigma[i] != after.sigma[i]) ++flips;
  }
  // FK occupation probability is zero: every site is its own cluster and
  // flips with probability 1/2
  const double n = (double)trials * g.n_sites;
  CHECK(std::abs(flips / n - 0.5) < 5.0 * std::sqrt(0.25 / n));
}

TEST_CASE("embedded update respects the cut constraint") {
  const auto& g = tri8();
  const auto mask = full_mask(g);
  ModelParams p;
  p.variant = Variant::cut;
  p.epsilon = 0.65;
  p.beta = 0.0;
  auto chain = init_chain(p, g, mask, 19);
  for (int t = 0; t < 30; ++t) {
    metropolis_sweep(chain, p, g, mask);
    embedded_cluster_update(chain, p, g, mask);
    REQUIRE(count_violations(chain.config, g, p, mask) == 0);
  }
}

TEST_CASE("flip_partition_clusters flips whole clusters coherently") {
  const auto& g = tri8();
  const auto mask = full_mask(g);
  ModelParams p;
  auto chain = init_chain(p, g, mask, 23);
  const auto u = p.axis();
  const auto before = hemisphere_decompose(chain.config, u);
  const auto h = cluster_like_sigma(g, before, &mask);
  Rng rng(99);
  flip_partition_clusters(chain.config, h, u, rng);
  const auto after = hemisphere_decompose(chain.config, u);
  std::map<int32_t, int> cluster_outcome;  // 0 = kept, 1 = flipped
  for (int i = 0; i < g.n_sites; ++i) {
    const int flipped = before.sigma[i] != after.sigma[i] ? 1 : 0;
    auto [it, fresh] = cluster_outcome.emplace(h.cluster_of[i], flipped);
    if (!fresh) CHECK(it->second == flipped);  // same coin per cluster
    CHECK(after.s_parallel[i] == doctest::Approx(before.s_parallel[i]));
  }
  CHECK(cluster_outcome.size() == (size_t)h.cluster_count());
}

TEST_CASE("global rotation preserves chords, norms, and constraints") {
  const auto& g = tri8();
  const auto mask = full_mask(g);
  ModelParams p;
  p.variant = Variant::cut;
  p.epsilon = 0.65;
  p.beta = 0.0;
  auto chain = init_chain(p, g, mask, 29);
  for (int t = 0; t < 10; ++t) metropolis_sweep(chain, p, g, mask);
  std::vector<double> chords;
  for (const auto& b : g.bonds)
    chords.push_back(dist2(chain.config.spin(b.i), chain.config.spin(b.j)));
  const double action_before = total_action(chain.config, g, p, mask);
  for (int t = 0; t < 25; ++t) global_rotation_update(chain, p);
  for (size_t bi = 0; bi < chords.size(); ++bi) {
    const auto& b = g.bonds[bi];
    CHECK(dist2(chain.config.spin(b.i), chain.config.spin(b.j)) ==
          doctest::Approx(chords[bi]).epsilon(1e-9));
  }
  CHECK(total_action(chain.config, g, p, mask) ==
        doctest::Approx(action_before));
  CHECK(max_norm_error(chain.config) < 1e-12);
  CHECK(count_violations(chain.config, g, p, mask) == 0);
}

TEST_CASE("global rotation for richard keeps the polar component") {
  const auto& g = tri8();
  const auto mask = full_mask(g);
  ModelParams p;
  p.variant = Variant::richard;
  p.b = 0.5;
  p.epsilon = 0.8;
  p.beta = 1.2;
  auto chain = init_chain(p, g, mask, 31);
  for (int t = 0; t < 5; ++t) metropolis_sweep(chain, p, g, mask);
  const auto u = p.axis();
  std::vector<double> pol(g.n_sites);
  for (int i = 0; i < g.n_sites; ++i) pol[i] = dot(chain.config.spin(i), u);
  for (int t = 0; t < 10; ++t) global_rotation_update(chain, p);
  for (int i = 0; i < g.n_sites; ++i)
    CHECK(dot(chain.config.spin(i), u) == doctest::Approx(pol[i]));
  CHECK(count_violations(chain.config, g, p, mask) == 0);
}

TEST_CASE("quenched frame reconstructs the perpendicular field") {
  const auto& g = tri8();
  const auto mask = full_mask(g);
  ModelParams p;
  p.beta = 1.5;
  auto chain = init_chain(p, g, mask, 37);
  for (int t = 0; t < 20; ++t) metropolis_sweep(chain, p, g, mask);
  const auto u = p.axis();
  const auto frame = make_quenched_frame(chain.config, u);
  const auto proj = hemisphere_decompose(chain.config, u);
  const auto [e1, e2] = perpendicular_plane(u);
  for (int i = 0; i < g.n_sites; ++i) {
    CHECK(frame.k[i] == doctest::Approx(proj.s_perp_norm[i]));
    const auto s = chain.config.spin(i);
    CHECK(frame.k[i] * std::cos(frame.phi[i]) ==
          doctest::Approx(dot(s, e1)).epsilon(1e-9));
    CHECK(frame.k[i] * std::sin(frame.phi[i]) ==
          doctest::Approx(dot(s, e2)).epsilon(1e-9));
  }
}

TEST_CASE("quenched phi sweep keeps couplings frozen and moves angles") {
  const auto& g = tri8();
  const auto mask = full_mask(g);
  ModelParams p;
  p.beta = 1.5;
  auto chain = init_chain(p, g, mask, 41);
  for (int t = 0; t < 10; ++t) metropolis_sweep(chain, p, g, mask);
  auto frame = make_quenched_frame(chain.config, p.axis());
  const auto k0 = frame.k;
  const auto phi0 = frame.phi;
  Rng rng(43);
  const auto st = quenched_phi_sweep(frame, p.beta, g, mask, rng);
  CHECK(st.proposals == (uint64_t)g.n_sites);
  CHECK(st.accepts > 0);
  CHECK(frame.k == k0);
  CHECK(frame.phi != phi0);
  int out_of_range = 0;
  for (double phi : frame.phi)
    if (!std::isfinite(phi) || std::abs(phi) > 2.0 * M_PI) ++out_of_range;
  CHECK(out_of_range == 0);
}

TEST_CASE("diagnostics pass stationary series and flag drifting ones") {
  Rng rng(47);
  std::map<std::string, std::vector<double>> series;
  std::map<std::string, double> late;
  const int n = 400;
  for (int i = 0; i < n; ++i) {
    series["flat"].push_back(rng.normal());
    series["drift"].push_back(0.01 * i + 0.3 * rng.normal());
  }
  late["flat"] = series["flat"].back();
  const auto rep = ergodicity_diagnostics(series, late);
  REQUIRE(rep.entries.size() == 2);
  CHECK(rep.sufficient);
  CHECK(!rep.all_pass);
  for (const auto& e : rep.entries) {
    if (e.observable == "flat") {
      CHECK(e.p1_checked);
      CHECK(e.p1_pass);
      CHECK(e.p2_pass);
    } else {
      CHECK(!e.p1_checked);
      CHECK(!e.p2_pass);  // halves differ
    }
  }
}

TEST_CASE("diagnostics report insufficient data") {
  std::map<std::string, std::vector<double>> series;
  series["short"] = std::vector<double>(10, 1.0);
  const auto rep = ergodicity_diagnostics(series, {});
  CHECK(!rep.sufficient);
  CHECK(!rep.all_pass);
}
