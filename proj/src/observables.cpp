// observables.cpp

#include "onperc/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace onp {

double chi_ising_value(std::span<const int8_t> sigma) {
  long sum = 0;
  for (int8_t s : sigma) sum += s;
  return static_cast<double>(sum) * static_cast<double>(sum) / sigma.size();
}

double chi_phi_value(std::span<const double> phi) {
  double c = 0.0, s = 0.0;
  for (double p : phi) {
    c += std::cos(p);
    s += std::sin(p);
  }
  return (c * c + s * s) / phi.size();
}

std::vector<double> azimuth_field(const SpinConfig& config,
                                  std::span<const double> u) {
  std::vector<double> phi(config.n_sites);
  if (config.n == 2) {
    for (int i = 0; i < config.n_sites; ++i) {
      const auto s = config.spin(i);
      phi[i] = std::atan2(s[1], s[0]);
    }
    return phi;
  }
  const auto [e1, e2] = perpendicular_plane(u);
  for (int i = 0; i < config.n_sites; ++i) {
    const auto s = config.spin(i);
    phi[i] = std::atan2(dot(s, std::span<const double>(e2)),
                        dot(s, std::span<const double>(e1)));
  }
  return phi;
}

Estimate chi_ising(const std::vector<std::vector<int8_t>>& sigma_ensemble,
                   int n_blocks) {
  std::vector<double> series(sigma_ensemble.size());
  for (size_t k = 0; k < sigma_ensemble.size(); ++k)
    series[k] = chi_ising_value(sigma_ensemble[k]);
  return estimate_series(series, n_blocks);
}

Estimate chi_phi(const std::vector<std::vector<double>>& phi_ensemble,
                 int n_blocks) {
  std::vector<double> series(phi_ensemble.size());
  for (size_t k = 0; k < phi_ensemble.size(); ++k)
    series[k] = chi_phi_value(phi_ensemble[k]);
  return estimate_series(series, n_blocks);
}

std::vector<double> two_point_value(const SpinConfig& config,
                                    const LatticeGraph& graph) {
  const int L = graph.L;
  const int n = config.n;
  std::vector<double> g(L / 2 + 1, 0.0);
  for (int r = 0; r <= L / 2; ++r) {
    double acc = 0.0;
    for (int y = 0; y < L; ++y)
      for (int x = 0; x < L; ++x) {
        const auto s0 = config.spin(y * L + x);
        const auto sx = config.spin(y * L + (x + r) % L);
        const auto sy = config.spin(((y + r) % L) * L + x);
        for (int c = 0; c < n; ++c) acc += s0[c] * (sx[c] + sy[c]);
      }
    g[r] = acc / (2.0 * graph.n_sites);
  }
  return g;
}

std::vector<double> two_point_phi_value(std::span<const double> phi,
                                        const LatticeGraph& graph) {
  const int L = graph.L;
  std::vector<double> g(L / 2 + 1, 0.0);
  for (int r = 0; r <= L / 2; ++r) {
    double acc = 0.0;
    for (int y = 0; y < L; ++y)
      for (int x = 0; x < L; ++x) {
        const double p0 = phi[y * L + x];
        acc += std::cos(p0 - phi[y * L + (x + r) % L]) +
               std::cos(p0 - phi[((y + r) % L) * L + x]);
      }
    g[r] = acc / (2.0 * graph.n_sites);
  }
  return g;
}

TwoPointTable two_point(const std::vector<std::vector<double>>& per_config,
                        int n_blocks) {
  if (per_config.empty())
    throw std::invalid_argument("two_point: empty ensemble");
  const size_t n_r = per_config.front().size();
  TwoPointTable table;
  table.r.resize(n_r);
  table.g.resize(n_r);
  table.err.resize(n_r);
  std::vector<double> series(per_config.size());
  for (size_t r = 0; r < n_r; ++r) {
    for (size_t k = 0; k < per_config.size(); ++k) series[k] = per_config[k][r];
    const auto est = estimate_series(series, n_blocks);
    table.r[r] = static_cast<double>(r);
    table.g[r] = est.mean;
    table.err[r] = est.error;
  }
  return table;
}

std::vector<double> crossing_normal(double c) {
  if (c < 0.0 || c >= 1.0)
    throw std::invalid_argument("crossing_normal: c must lie in [0,1)");
  return {-c, 0.0, std::sqrt(1.0 - c * c)};
}

int crossing_count(const SpinConfig& config, const LatticeGraph& graph,
                   const BondMask& mask, double c) {
  if (config.n != 3)
    throw std::invalid_argument("crossing_count: defined for n = 3");
  if (c < 0.0 || c > 0.9)
    throw std::invalid_argument("crossing_count: c must lie in [0, 0.9]");
  const auto nc = crossing_normal(c);
  std::vector<double> h(config.n_sites);
  for (int i = 0; i < config.n_sites; ++i) {
    const auto s = config.spin(i);
    h[i] = nc[0] * s[0] + nc[2] * s[2];
  }
  int count = 0;
  for (int b = 0; b < graph.n_bonds(); ++b) {
    if (!mask.is_present(b)) continue;
    const Bond& bd = graph.bonds[b];
    if (h[bd.i] * h[bd.j] < 0.0) ++count;
  }
  return count;
}

double region_occupancy(const SpinConfig& config, const RegionSpec& region) {
  std::vector<double> u(config.n, 0.0);
  u.back() = 1.0;
  int count = 0;
  for (int i = 0; i < config.n_sites; ++i)
    if (region_membership(config.spin(i), region, u)) ++count;
  return static_cast<double>(count) / config.n_sites;
}

AreaTestReport area_test(const std::vector<RegionSpec>& regions,
                         const std::vector<std::vector<double>>& occupancy_series,
                         int n_blocks) {
  if (regions.size() != occupancy_series.size())
    throw std::invalid_argument("area_test: one series per region required");
  AreaTestReport report;
  for (size_t k = 0; k < regions.size(); ++k) {
    AreaTestEntry entry;
    entry.region = regions[k].name;
    entry.expected = regions[k].volume() / (4.0 * M_PI);
    const auto est = estimate_series(occupancy_series[k], n_blocks);
    entry.mean = est.mean;
    entry.error = est.error;
    if (est.error > 0.0) {
      entry.z = (est.mean - entry.expected) / est.error;
      entry.pass = std::abs(entry.z) <= 3.0;
    } else {
      entry.z = 0.0;
      entry.pass = std::abs(est.mean - entry.expected) < 1e-12;
    }
    report.all_pass = report.all_pass && entry.pass;
    report.entries.push_back(entry);
  }
  return report;
}

double nearest_site_distance(const SpinConfig& config, const LatticeGraph& graph,
                             std::span<const double> p1,
                             std::span<const double> p2, double radius) {
  const double cos_r = std::cos(radius);
  std::vector<int> a, b;
  for (int i = 0; i < config.n_sites; ++i) {
    const auto s = config.spin(i);
    if (dot(s, p1) >= cos_r) a.push_back(i);
    if (dot(s, p2) >= cos_r) b.push_back(i);
  }
  if (a.empty() || b.empty()) return -1.0;
  const int L = graph.L;
  double best = 2.0 * L;
  for (int i : a) {
    const int xi = graph.x_of(i), yi = graph.y_of(i);
    for (int j : b) {
      int dx = std::abs(xi - graph.x_of(j));
      int dy = std::abs(yi - graph.y_of(j));
      dx = std::min(dx, L - dx);
      dy = std::min(dy, L - dy);
      const double d = std::sqrt(double(dx) * dx + double(dy) * dy);
      best = std::min(best, d);
      if (best == 0.0) return 0.0;
    }
  }
  return best;
}

GradientTestReport gradient_test(const std::vector<PointPair>& pairs,
                                 const std::vector<std::vector<double>>& distance_series,
                                 int n_blocks) {
  if (pairs.size() != distance_series.size())
    throw std::invalid_argument("gradient_test: one series per pair required");
  GradientTestReport report;
  std::vector<bool> has_estimate(pairs.size(), false);
  for (size_t k = 0; k < pairs.size(); ++k) {
    GradientTestEntry entry;
    entry.pair = pairs[k].name;
    std::vector<double> used;
    for (double d : distance_series[k])
      (d >= 0.0 ? used.push_back(d) : void(++entry.n_empty));
    entry.n_used = static_cast<long>(used.size());
    if (entry.n_used >= n_blocks) {
      const auto est = estimate_series(used, n_blocks);
      entry.mean = est.mean;
      entry.error = est.error;
      has_estimate[k] = true;
    } else {
      report.comparable = false;
      if (!used.empty()) entry.mean = mean_of(used);
    }
    report.entries.push_back(entry);
  }
  for (size_t i = 0; i < pairs.size(); ++i)
    for (size_t j = i + 1; j < pairs.size(); ++j) {
      if (!has_estimate[i] || !has_estimate[j]) continue;
      if (!consistent_within(report.entries[i].mean, report.entries[i].error,
                             report.entries[j].mean, report.entries[j].error,
                             3.0))
        report.all_pass = false;
    }
  if (!report.comparable) report.all_pass = false;
  return report;
}

}  // namespace onp
