// stats.hpp
//
// Error-barred estimates from Markov chain time series: blocked jackknife,
// integrated autocorrelation time with a self-consistent window, and the
// two-sample tests used by the equilibration diagnostics.

#pragma once

#include <span>
#include <vector>

namespace onp {

struct Estimate {
  double mean = 0.0;
  double error = 0.0;   // blocked jackknife standard error
  long n_samples = 0;
  double tau = 0.0;     // integrated autocorrelation time, >= 0
};

// blocked jackknife mean/error over >= 10 blocks; throws if the series is
// too short to form them
Estimate estimate_series(std::span<const double> series, int n_blocks = 20);

// integrated autocorrelation time, windowed self-consistently
// (tau = 1/2 for an uncorrelated series)
double integrated_autocorrelation(std::span<const double> series);

double mean_of(std::span<const double> series);
double variance_of(std::span<const double> series);  // unbiased

// two-sample Kolmogorov-Smirnov test; returns the asymptotic p-value
struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// two-proportion z-test for binary outcomes (pooled variance)
struct ProportionResult {
  double z = 0.0;
  double p_value = 0.0;  // two-sided, normal approximation
};
ProportionResult proportion_two_sample(long hits_a, long n_a, long hits_b,
                                       long n_b);

// |a - b| within k combined standard errors
bool consistent_within(double a, double err_a, double b, double err_b,
                       double k_sigma);

}  // namespace onp
