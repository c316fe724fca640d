#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "onperc/rng.hpp"
#include "onperc/stats.hpp"

using namespace onp;

TEST_CASE("mean and variance on hand values") {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  CHECK(mean_of(v) == doctest::Approx(2.5));
  CHECK(variance_of(v) == doctest::Approx(5.0 / 3.0));  // unbiased
}

TEST_CASE("iid series: jackknife error tracks sigma over sqrt n") {
  Rng rng(101);
  const int n = 20000;
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  const auto est = estimate_series(v);
  CHECK(std::abs(est.mean) < 5.0 / std::sqrt((double)n));
  const double ref = 1.0 / std::sqrt((double)n);
  CHECK(est.error == doctest::Approx(ref).epsilon(0.35));
  CHECK(est.tau == doctest::Approx(0.5).epsilon(0.4));
  CHECK(est.n_samples == n);
}

TEST_CASE("ar1 series: tau matches the analytic value") {
  // x_{t+1} = rho x_t + sqrt(1-rho^2) xi; tau_int = (1+rho)/(2(1-rho))
  const double rho = 0.8;
  Rng rng(55);
  const int n = 200000;
  std::vector<double> v(n);
  double x = 0.0;
  for (auto& out : v) {
    x = rho * x + std::sqrt(1.0 - rho * rho) * rng.normal();
    out = x;
  }
  const double tau = integrated_autocorrelation(v);
  CHECK(tau == doctest::Approx((1.0 + rho) / (2.0 * (1.0 - rho))).epsilon(0.15));

  // error must blow up accordingly: sqrt(2 tau) times the naive error
  const auto est = estimate_series(v);
  const double naive = 1.0 / std::sqrt((double)n);
  CHECK(est.error > 2.0 * naive);
}

TEST_CASE("estimate_series rejects too-short input") {
  std::vector<double> v(5, 1.0);
  CHECK_THROWS_AS(estimate_series(v), std::invalid_argument);
}

TEST_CASE("ks two-sample on separated and identical samples") {
  std::vector<double> a = {1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> b = {11.0, 12.0, 13.0, 14.0, 15.0};
  auto ks = ks_two_sample(a, b);
  CHECK(ks.statistic == doctest::Approx(1.0));
  CHECK(ks.p_value < 0.05);

  ks = ks_two_sample(a, a);
  CHECK(ks.statistic == doctest::Approx(0.0));
  CHECK(ks.p_value == doctest::Approx(1.0));
}

TEST_CASE("ks calibration: iid gaussians rarely reject") {
  Rng rng(77);
  int rejects = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> a(100), b(100);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal();
    if (ks_two_sample(a, b).p_value < 0.05) ++rejects;
  }
  // 5% nominal rate; the asymptotic p-value is conservative at n = 100
  CHECK(rejects < 0.1 * trials);
}

TEST_CASE("proportion test on hand counts") {
  auto r = proportion_two_sample(50, 100, 50, 100);
  CHECK(r.z == doctest::Approx(0.0));
  CHECK(r.p_value == doctest::Approx(1.0));
  r = proportion_two_sample(10, 100, 90, 100);
  CHECK(std::abs(r.z) > 10.0);
  CHECK(r.p_value < 1e-10);
}

TEST_CASE("consistent_within") {
  CHECK(consistent_within(1.0, 0.1, 1.2, 0.1, 3.0));
  CHECK(!consistent_within(1.0, 0.1, 2.0, 0.1, 3.0));
}

TEST_CASE("rng uniform and bernoulli moments") {
  Rng rng(13);
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  long hits = 0;
  int out_of_range = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    if (u < 0.0 || u >= 1.0) ++out_of_range;
    sum += u;
    sum2 += u * u;
  }
  for (int i = 0; i < n; ++i) hits += rng.bernoulli(0.3);
  CHECK(out_of_range == 0);
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sum2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
  CHECK(std::abs((double)hits / n - 0.3) < 5.0 * std::sqrt(0.21 / n));
}

TEST_CASE("rng normal moments") {
  Rng rng(29);
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / n) < 5.0 / std::sqrt((double)n));
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("unit vectors are unit and isotropic") {
  Rng rng(31);
  for (int n_dim : {2, 3, 4}) {
    std::vector<double> v(n_dim), acc(n_dim, 0.0);
    const int n = 20000;
    double worst_norm = 0.0;
    for (int i = 0; i < n; ++i) {
      rng.unit_vector(v);
      double norm2 = 0.0;
      for (double c : v) norm2 += c * c;
      worst_norm = std::max(worst_norm, std::abs(norm2 - 1.0));
      for (int k = 0; k < n_dim; ++k) acc[k] += v[k];
    }
    CHECK(worst_norm < 1e-12);
    for (int k = 0; k < n_dim; ++k)
      CHECK(std::abs(acc[k] / n) < 5.0 / std::sqrt((double)n));
  }
}

TEST_CASE("cap vectors stay in the cap") {
  Rng rng(37);
  const std::vector<double> axis = {0.0, 0.6, 0.8};
  std::vector<double> v(3);
  const double delta = 0.7;
  double min_dot = 1.0, worst_norm = 0.0;
  for (int i = 0; i < 5000; ++i) {
    rng.cap_vector(axis, delta, v);
    double d = 0.0, norm2 = 0.0;
    for (int k = 0; k < 3; ++k) {
      d += v[k] * axis[k];
      norm2 += v[k] * v[k];
    }
    worst_norm = std::max(worst_norm, std::abs(norm2 - 1.0));
    min_dot = std::min(min_dot, d);
  }
  CHECK(worst_norm < 1e-12);
  CHECK(min_dot >= std::cos(delta) - 1e-12);
  // the cap is actually filled out to its rim
  CHECK(min_dot < std::cos(0.9 * delta));
}

TEST_CASE("rng state roundtrip continues bit-exactly") {
  Rng a(991);
  for (int i = 0; i < 57; ++i) a.uniform();
  const auto st = a.state();
  CHECK(st.draws == 57);
  Rng b = Rng::from_state(st);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  RngState bad = st;
  bad.algorithm = "mt19937";
  CHECK_THROWS_AS(Rng::from_state(bad), std::runtime_error);
}

TEST_CASE("derive_seed separates chains") {
  std::set<uint64_t> seen;
  for (uint64_t i = 0; i < 1000; ++i)
    CHECK(seen.insert(derive_seed(42, i)).second);
  CHECK(derive_seed(42, 0) != derive_seed(43, 0));
  CHECK(derive_seed(42, 7) == derive_seed(42, 7));
}
