// stats.cpp

#include "onperc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace onp {

double mean_of(std::span<const double> series) {
  double s = 0.0;
  for (double x : series) s += x;
  return series.empty() ? 0.0 : s / series.size();
}

double variance_of(std::span<const double> series) {
  const size_t n = series.size();
  if (n < 2) return 0.0;
  const double m = mean_of(series);
  double s = 0.0;
  for (double x : series) s += (x - m) * (x - m);
  return s / (n - 1);
}

double integrated_autocorrelation(std::span<const double> series) {
  const long n = static_cast<long>(series.size());
  if (n < 4) return 0.5;
  const double m = mean_of(series);
  double c0 = 0.0;
  for (double x : series) c0 += (x - m) * (x - m);
  c0 /= n;
  if (c0 <= 0.0) return 0.5;  // constant series

  // self-consistent window: smallest W with W >= 6 tau(W)
  double tau = 0.5;
  const long wmax = n / 2;
  for (long w = 1; w <= wmax; ++w) {
    double c = 0.0;
    for (long t = 0; t < n - w; ++t)
      c += (series[t] - m) * (series[t + w] - m);
    c /= (n - w);
    tau += c / c0;
    if (w >= 6.0 * tau) break;
  }
  return std::max(tau, 0.0);
}

Estimate estimate_series(std::span<const double> series, int n_blocks) {
  const long n = static_cast<long>(series.size());
  if (n_blocks < 10) n_blocks = 10;
  if (n < n_blocks)
    throw std::invalid_argument(
        "insufficient samples: need at least " + std::to_string(n_blocks));

  const long block = n / n_blocks;
  const long used = block * n_blocks;
  std::vector<double> block_sums(n_blocks, 0.0);
  double total = 0.0;
  for (long k = 0; k < used; ++k) {
    block_sums[k / block] += series[k];
    total += series[k];
  }

  // jackknife over blocks
  std::vector<double> leave_out(n_blocks);
  for (int b = 0; b < n_blocks; ++b)
    leave_out[b] = (total - block_sums[b]) / (used - block);
  const double jk_mean = mean_of(leave_out);
  double var = 0.0;
  for (double v : leave_out) var += (v - jk_mean) * (v - jk_mean);
  var *= static_cast<double>(n_blocks - 1) / n_blocks;

  Estimate e;
  e.mean = total / used;
  e.error = std::sqrt(std::max(var, 0.0));
  e.n_samples = n;
  e.tau = integrated_autocorrelation(series);
  return e;
}

namespace {

// asymptotic Kolmogorov survival function
double ks_survival(double lambda) {
  if (lambda < 1e-10) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term =
        2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks test needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const size_t na = a.size(), nb = b.size();
  size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < na && ib < nb) {
    const double x = std::min(a[ia], b[ib]);
    while (ia < na && a[ia] <= x) ++ia;
    while (ib < nb && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(double(ia) / na - double(ib) / nb));
  }
  const double ne = std::sqrt(double(na) * nb / (na + nb));
  KsResult r;
  r.statistic = d;
  r.p_value = ks_survival((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

ProportionResult proportion_two_sample(long hits_a, long n_a, long hits_b,
                                       long n_b) {
  if (n_a <= 0 || n_b <= 0)
    throw std::invalid_argument("proportion test needs nonempty samples");
  const double pa = double(hits_a) / n_a;
  const double pb = double(hits_b) / n_b;
  const double pooled = double(hits_a + hits_b) / (n_a + n_b);
  const double var = pooled * (1.0 - pooled) * (1.0 / n_a + 1.0 / n_b);
  ProportionResult r;
  if (var <= 0.0) {
    r.z = 0.0;
    r.p_value = 1.0;
    return r;
  }
  r.z = (pa - pb) / std::sqrt(var);
  r.p_value = std::erfc(std::abs(r.z) / std::sqrt(2.0));
  return r;
}

bool consistent_within(double a, double err_a, double b, double err_b,
                       double k_sigma) {
  const double combined = std::sqrt(err_a * err_a + err_b * err_b);
  return std::abs(a - b) <= k_sigma * combined;
}

}  // namespace onp
