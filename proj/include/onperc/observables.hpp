#pragma once

// Susceptibilities, two-point tables, crossing counts, and the two
// symmetry checks (region occupancy, nearest-site distance isotropy).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "onperc/lattice.hpp"
#include "onperc/spin.hpp"
#include "onperc/stats.hpp"

namespace onp {

// (sum sigma)^2 / n_sites for one configuration
double chi_ising_value(std::span<const int8_t> sigma);

// ((sum cos phi)^2 + (sum sin phi)^2) / n_sites for one configuration
double chi_phi_value(std::span<const double> phi);

// azimuthal angle of each spin about u (for n = 2 the spin's own angle)
std::vector<double> azimuth_field(const SpinConfig& config,
                                  std::span<const double> u);

Estimate chi_ising(const std::vector<std::vector<int8_t>>& sigma_ensemble,
                   int n_blocks = 20);
Estimate chi_phi(const std::vector<std::vector<double>>& phi_ensemble,
                 int n_blocks = 20);

// G(r) = <s_0 . s_r>, r = 0..L/2, averaged over all sites and both axes
std::vector<double> two_point_value(const SpinConfig& config,
                                    const LatticeGraph& graph);
// same displacement average for a phase field, <cos(phi_0 - phi_r)>
std::vector<double> two_point_phi_value(std::span<const double> phi,
                                        const LatticeGraph& graph);

struct TwoPointTable {
  std::vector<double> r;
  std::vector<double> g;
  std::vector<double> err;
};

// aggregates per-configuration tables (outer index = configuration)
TwoPointTable two_point(const std::vector<std::vector<double>>& per_config,
                        int n_blocks = 20);

// great-circle normal (-c, 0, sqrt(1 - c^2)); at c = 0 the equator about z
std::vector<double> crossing_normal(double c);

// bonds whose endpoints fall on opposite sides of the tilted great circle
int crossing_count(const SpinConfig& config, const LatticeGraph& graph,
                   const BondMask& mask, double c);

// fraction of sites whose spin lies in the region
double region_occupancy(const SpinConfig& config, const RegionSpec& region);

struct AreaTestEntry {
  std::string region;
  double expected = 0.0;
  double mean = 0.0;
  double error = 0.0;
  double z = 0.0;
  bool pass = false;
};

struct AreaTestReport {
  std::vector<AreaTestEntry> entries;
  bool all_pass = true;
};

// occupancy_series[k] holds the per-configuration fractions for regions[k]
AreaTestReport area_test(const std::vector<RegionSpec>& regions,
                         const std::vector<std::vector<double>>& occupancy_series,
                         int n_blocks = 20);

struct PointPair {
  std::string name;
  std::vector<double> p1, p2;  // unit vectors on the target sphere
};

// torus distance between the nearest sites whose spins fall within geodesic
// radius `radius` of p1 and of p2; negative if either neighborhood is empty
double nearest_site_distance(const SpinConfig& config, const LatticeGraph& graph,
                             std::span<const double> p1,
                             std::span<const double> p2, double radius);

struct GradientTestEntry {
  std::string pair;
  double mean = 0.0;
  double error = 0.0;
  long n_used = 0;
  long n_empty = 0;  // configurations with an empty neighborhood
};

struct GradientTestReport {
  std::vector<GradientTestEntry> entries;
  bool all_pass = true;    // pairwise agreement at 3 sigma
  bool comparable = true;  // every pair kept enough configurations
};

// distance_series[k]: per-configuration nearest distances for pairs[k],
// empty-neighborhood configurations recorded as negative entries
GradientTestReport gradient_test(const std::vector<PointPair>& pairs,
                                 const std::vector<std::vector<double>>& distance_series,
                                 int n_blocks = 20);

}  // namespace onp
