// spin.hpp
//
// O(N) spin configurations, the three action variants (standard, cut,
// richard), the hemisphere decomposition into Ising sign / parallel /
// perpendicular parts, and spherical region specifications.

#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "onperc/lattice.hpp"

namespace onp {

enum class Variant : uint8_t { standard = 0, cut = 1, richard = 2 };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct ModelParams {
  int n = 3;           // spin dimension
  double beta = 1.0;   // inverse temperature, Gibbs weight exp(+beta sum s_i.s_j)
  Variant variant = Variant::standard;
  double epsilon = 2.0;  // bond constraint |s_i - s_j| < epsilon (cut, richard)
  double b = 0.0;        // site constraint |s.u| < 1 - b (richard only, N = 3)
  std::vector<double> u;  // unit reference axis; empty means last coordinate axis

  double d() const { return 0.5 * epsilon; }
  bool has_bond_constraint() const {
    return variant != Variant::standard && epsilon < 2.0;
  }
  bool has_site_constraint() const { return variant == Variant::richard; }

  std::vector<double> axis() const;  // resolved u
  void validate() const;             // throws on invalid combinations
};

struct SpinConfig {
  int n = 0;        // spin dimension
  int n_sites = 0;
  std::vector<double> s;     // n_sites * n, unit vectors
  uint64_t generation = 0;   // sweeps applied

  std::span<double> spin(int i) {
    return {s.data() + static_cast<size_t>(i) * n, static_cast<size_t>(n)};
  }
  std::span<const double> spin(int i) const {
    return {s.data() + static_cast<size_t>(i) * n, static_cast<size_t>(n)};
  }
};

SpinConfig make_config(int n, int n_sites);

inline double dot(std::span<const double> a, std::span<const double> b) {
  double r = 0.0;
  for (size_t k = 0; k < a.size(); ++k) r += a[k] * b[k];
  return r;
}

inline double dist2(std::span<const double> a, std::span<const double> b) {
  double r = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    double d = a[k] - b[k];
    r += d * d;
  }
  return r;
}

struct IsingProjection {
  std::vector<int8_t> sigma;        // +1 / -1, tie s.u = 0 resolved to +1
  std::vector<double> s_parallel;   // |s.u|
  std::vector<double> s_perp_norm;  // |s - (s.u)u|
};

IsingProjection hemisphere_decompose(const SpinConfig& config,
                                     std::span<const double> u);

// strict |s_i - s_j| < epsilon
inline bool cut_feasible(std::span<const double> si,
                         std::span<const double> sj, double epsilon) {
  return dist2(si, sj) < epsilon * epsilon;
}

// sum of s_i.s_j over present bonds; throws std::domain_error if the
// configuration violates the variant's constraints
double total_action(const SpinConfig& config, const LatticeGraph& graph,
                    const ModelParams& params, const BondMask& mask);

// number of violated constraints (bond + site), zero for a feasible config
int count_violations(const SpinConfig& config, const LatticeGraph& graph,
                     const ModelParams& params, const BondMask& mask);

// largest | |s_i| - 1 | over sites
double max_norm_error(const SpinConfig& config);

struct RegionSpec {
  enum class Shape : uint8_t { cap, strip, hemisphere, tilted_band };

  Shape shape = Shape::cap;
  double theta0 = 0.0;       // cap: s.u > cos(theta0)
  double d = 0.0;            // strip: |s.u| < d
  double c1 = 0.0, c2 = 0.0; // tilted_band: c1 < s.u < c2
  std::vector<double> axis;  // hemisphere: s.axis > 0

  std::string name;

  // closed forms on S^2 (steradians / boundary length); throws for other N
  double volume() const;
  double boundary() const;

  static RegionSpec cap(double theta0);
  static RegionSpec cap_of_area(double area);     // theta0 from 2pi(1-cos t0)
  static RegionSpec strip(double d);
  static RegionSpec strip_of_area(double area);   // d from 4 pi d
  static RegionSpec hemisphere(std::vector<double> axis);
  static RegionSpec tilted_band(double c1, double c2);
};

bool region_membership(std::span<const double> s, const RegionSpec& region,
                       std::span<const double> u);

// deterministic unit vector orthogonal to u
std::vector<double> perpendicular_axis(std::span<const double> u);
// orthonormal pair spanning a plane perpendicular to u (needs n >= 3)
std::pair<std::vector<double>, std::vector<double>> perpendicular_plane(
    std::span<const double> u);

// binary snapshot of a configuration (versioned header + spin array)
void save_config(const std::string& path, const SpinConfig& config,
                 const ModelParams& params, LatticeKind kind, int L,
                 uint64_t seed);
struct ConfigSnapshot {
  SpinConfig config;
  ModelParams params;
  LatticeKind kind;
  int L;
  uint64_t seed;
};
ConfigSnapshot load_config(const std::string& path);

}  // namespace onp
