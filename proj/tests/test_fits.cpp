#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "onperc/fits.hpp"
#include "onperc/rng.hpp"

using namespace onp;

TEST_CASE("power law recovered exactly from clean data") {
  std::vector<double> x, y;
  for (int i = 1; i <= 12; ++i) {
    x.push_back(i);
    y.push_back(3.0 * std::pow(double(i), 1.75));
  }
  const auto fit = fit_power_law(x, y);
  CHECK(fit.converged);
  CHECK(fit.params.at("amplitude") == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(fit.params.at("exponent") == doctest::Approx(1.75).epsilon(1e-9));
  CHECK(fit.params.at("eta") == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(fit.goodness < 1e-12);
  CHECK(fit.dof == 10);
  CHECK(fit.x_min == doctest::Approx(1.0));
  CHECK(fit.x_max == doctest::Approx(12.0));
}

TEST_CASE("power law with errors recovers within quoted uncertainty") {
  Rng rng(7);
  std::vector<double> x, y, e;
  for (int i = 1; i <= 20; ++i) {
    const double clean = 0.8 * std::pow(double(i), 1.6);
    const double sigma = 0.01 * clean;
    x.push_back(i);
    y.push_back(clean + sigma * rng.normal());
    e.push_back(sigma);
  }
  const auto fit = fit_power_law(x, y, e);
  CHECK(fit.converged);
  const double de = fit.errors.at("exponent");
  CHECK(de > 0.0);
  CHECK(std::abs(fit.params.at("exponent") - 1.6) < 4.0 * de);
  CHECK(fit.goodness < 3.0);
}

TEST_CASE("power law input guards") {
  std::vector<double> x{1.0, 2.0}, y{1.0, 2.0};
  CHECK_THROWS_AS(fit_power_law(x, y), std::invalid_argument);
  std::vector<double> x3{1.0, 2.0, 3.0}, bad{1.0, -2.0, 3.0};
  CHECK_THROWS_AS(fit_power_law(x3, bad), std::invalid_argument);
  std::vector<double> mismatched{1.0, 2.0, 3.0, 4.0};
  CHECK_THROWS_AS(fit_power_law(x3, mismatched), std::invalid_argument);
}

TEST_CASE("exponential decay recovered from clean data") {
  std::vector<double> r, g;
  for (int i = 1; i <= 14; ++i) {
    r.push_back(i);
    g.push_back(2.0 * std::exp(-0.5 * i) / std::sqrt(double(i)));
  }
  const auto fit = fit_exponential(r, g);
  CHECK(fit.converged);
  CHECK(fit.params.at("a") == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(fit.params.at("m") == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(fit.goodness < 1e-10);
}

TEST_CASE("mixed model recovery from noisy synthetic data") {
  // a e^{-m r}/sqrt(r) + b r^{-eta} with 1% relative noise
  const double a = 1.4, m = 0.35, b = 0.25, eta = 0.22;
  Rng rng(19);
  std::vector<double> r, g, e;
  for (int i = 1; i <= 32; ++i) {
    const double clean =
        a * std::exp(-m * i) / std::sqrt(double(i)) + b * std::pow(double(i), -eta);
    const double sigma = 0.01 * clean;
    r.push_back(i);
    g.push_back(clean + sigma * rng.normal());
    e.push_back(sigma);
  }
  const auto fit = fit_eq7(r, g, e);
  REQUIRE(fit.mixed.converged);
  CHECK(std::abs(fit.mixed.params.at("a") - a) <
        4.0 * fit.mixed.errors.at("a") + 1e-9);
  CHECK(std::abs(fit.mixed.params.at("m") - m) <
        4.0 * fit.mixed.errors.at("m") + 1e-9);
  CHECK(std::abs(fit.mixed.params.at("b") - b) <
        4.0 * fit.mixed.errors.at("b") + 1e-9);
  CHECK(std::abs(fit.mixed.params.at("eta") - eta) <
        4.0 * fit.mixed.errors.at("eta") + 1e-9);
  CHECK(fit.mixed.goodness < 3.0);
  // both pure models miss badly on genuinely mixed data
  CHECK(fit.preferred == "eq7");
}

TEST_CASE("preferred model selection on pure data") {
  std::vector<double> r, gp, ge, err;
  Rng rng(23);
  for (int i = 1; i <= 16; ++i) {
    r.push_back(i);
    const double p = 0.9 * std::pow(double(i), -0.25);
    const double x = 1.8 * std::exp(-0.6 * i) / std::sqrt(double(i));
    gp.push_back(p * (1.0 + 0.002 * rng.normal()));
    ge.push_back(x * (1.0 + 0.002 * rng.normal()));
    err.push_back(0.002 * p);
  }
  const auto fp = fit_eq7(r, gp, err);
  CHECK(fp.preferred == "power_law");

  std::vector<double> err_e;
  for (int i = 1; i <= 16; ++i)
    err_e.push_back(0.002 * 1.8 * std::exp(-0.6 * i) / std::sqrt(double(i)));
  const auto fe = fit_eq7(r, ge, err_e);
  CHECK(fe.preferred == "exponential");
}

TEST_CASE("eq7 needs at least eight points at r >= 1") {
  std::vector<double> r{1, 2, 3, 4, 5, 6, 7}, g{1, .8, .7, .6, .55, .5, .47};
  CHECK_THROWS_AS(fit_eq7(r, g), std::invalid_argument);
}
