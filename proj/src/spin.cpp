// spin.cpp

#include "onperc/spin.hpp"

#include <stdexcept>

#include "onperc/binio.hpp"

namespace onp {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::standard: return "standard";
    case Variant::cut: return "cut";
    case Variant::richard: return "richard";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  if (s == "standard") return Variant::standard;
  if (s == "cut") return Variant::cut;
  if (s == "richard") return Variant::richard;
  throw std::invalid_argument("unknown variant: " + s);
}

std::vector<double> ModelParams::axis() const {
  if (!u.empty()) return u;
  std::vector<double> a(n, 0.0);
  a[n - 1] = 1.0;
  return a;
}

void ModelParams::validate() const {
  if (n < 2) throw std::invalid_argument("spin dimension must be >= 2");
  if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
  if (!u.empty()) {
    if (static_cast<int>(u.size()) != n)
      throw std::invalid_argument("axis dimension mismatch");
    double norm = 0.0;
    for (double c : u) norm += c * c;
    if (std::abs(norm - 1.0) > 1e-12)
      throw std::invalid_argument("axis must be a unit vector");
  }
  switch (variant) {
    case Variant::standard:
      break;
    case Variant::cut:
      if (!(epsilon > 0.0 && epsilon <= 2.0))
        throw std::invalid_argument("cut variant needs epsilon in (0,2]");
      break;
    case Variant::richard:
      if (n != 3) throw std::invalid_argument("richard variant needs N = 3");
      if (!(b > 0.0 && b < 1.0))
        throw std::invalid_argument("richard variant needs b in (0,1)");
      if (!(epsilon > 0.0 && epsilon <= 2.0))
        throw std::invalid_argument("richard variant needs epsilon in (0,2]");
      break;
  }
}

SpinConfig make_config(int n, int n_sites) {
  SpinConfig c;
  c.n = n;
  c.n_sites = n_sites;
  c.s.assign(static_cast<size_t>(n) * n_sites, 0.0);
  return c;
}

IsingProjection hemisphere_decompose(const SpinConfig& config,
                                     std::span<const double> u) {
  IsingProjection p;
  p.sigma.resize(config.n_sites);
  p.s_parallel.resize(config.n_sites);
  p.s_perp_norm.resize(config.n_sites);
  for (int i = 0; i < config.n_sites; ++i) {
    const double su = dot(config.spin(i), u);
    p.sigma[i] = su >= 0.0 ? 1 : -1;  // tie s.u = 0 counts as +1
    p.s_parallel[i] = std::abs(su);
    const double perp2 = std::max(0.0, 1.0 - su * su);
    p.s_perp_norm[i] = std::sqrt(perp2);
  }
  return p;
}

int count_violations(const SpinConfig& config, const LatticeGraph& graph,
                     const ModelParams& params, const BondMask& mask) {
  int bad = 0;
  if (params.has_bond_constraint()) {
    const double eps2 = params.epsilon * params.epsilon;
    for (int b = 0; b < graph.n_bonds(); ++b) {
      if (!mask.is_present(b)) continue;
      const Bond& bd = graph.bonds[b];
      if (dist2(config.spin(bd.i), config.spin(bd.j)) >= eps2) ++bad;
    }
  }
  if (params.has_site_constraint()) {
    const auto u = params.axis();
    const double cutoff = 1.0 - params.b;
    for (int i = 0; i < config.n_sites; ++i)
      if (std::abs(dot(config.spin(i), u)) >= cutoff) ++bad;
  }
  return bad;
}

double total_action(const SpinConfig& config, const LatticeGraph& graph,
                    const ModelParams& params, const BondMask& mask) {
  if (count_violations(config, graph, params, mask) > 0)
    throw std::domain_error("configuration violates the variant constraint");
  double sum = 0.0;
  for (int b = 0; b < graph.n_bonds(); ++b) {
    if (!mask.is_present(b)) continue;
    const Bond& bd = graph.bonds[b];
    sum += dot(config.spin(bd.i), config.spin(bd.j));
  }
  return sum;
}

double max_norm_error(const SpinConfig& config) {
  double worst = 0.0;
  for (int i = 0; i < config.n_sites; ++i) {
    const auto s = config.spin(i);
    worst = std::max(worst, std::abs(std::sqrt(dot(s, s)) - 1.0));
  }
  return worst;
}

RegionSpec RegionSpec::cap(double theta0) {
  RegionSpec r;
  r.shape = Shape::cap;
  r.theta0 = theta0;
  r.name = "cap";
  return r;
}

RegionSpec RegionSpec::cap_of_area(double area) {
  return cap(std::acos(1.0 - area / (2.0 * M_PI)));
}

RegionSpec RegionSpec::strip(double d) {
  RegionSpec r;
  r.shape = Shape::strip;
  r.d = d;
  r.name = "strip";
  return r;
}

RegionSpec RegionSpec::strip_of_area(double area) {
  return strip(area / (4.0 * M_PI));
}

RegionSpec RegionSpec::hemisphere(std::vector<double> axis) {
  RegionSpec r;
  r.shape = Shape::hemisphere;
  r.axis = std::move(axis);
  r.name = "hemisphere";
  return r;
}

RegionSpec RegionSpec::tilted_band(double c1, double c2) {
  RegionSpec r;
  r.shape = Shape::tilted_band;
  r.c1 = c1;
  r.c2 = c2;
  r.name = "tilted_band";
  return r;
}

double RegionSpec::volume() const {
  switch (shape) {
    case Shape::cap: return 2.0 * M_PI * (1.0 - std::cos(theta0));
    case Shape::strip: return 4.0 * M_PI * d;
    case Shape::hemisphere: return 2.0 * M_PI;
    case Shape::tilted_band: return 2.0 * M_PI * (c2 - c1);
  }
  return 0.0;
}

double RegionSpec::boundary() const {
  switch (shape) {
    case Shape::cap: return 2.0 * M_PI * std::sin(theta0);
    case Shape::strip: return 4.0 * M_PI * std::sqrt(1.0 - d * d);
    case Shape::hemisphere: return 2.0 * M_PI;
    case Shape::tilted_band:
      return 2.0 * M_PI *
             (std::sqrt(1.0 - c1 * c1) + std::sqrt(1.0 - c2 * c2));
  }
  return 0.0;
}

bool region_membership(std::span<const double> s, const RegionSpec& region,
                       std::span<const double> u) {
  switch (region.shape) {
    case RegionSpec::Shape::cap: return dot(s, u) > std::cos(region.theta0);
    case RegionSpec::Shape::strip: return std::abs(dot(s, u)) < region.d;
    case RegionSpec::Shape::hemisphere: return dot(s, region.axis) > 0.0;
    case RegionSpec::Shape::tilted_band: {
      const double su = dot(s, u);
      return region.c1 < su && su < region.c2;
    }
  }
  return false;
}

namespace {
constexpr uint64_t kConfigMagic = 0x4f4e50434e464731ull;  // "ONPCNFG1"
constexpr uint32_t kConfigVersion = 1;
}  // namespace

void save_config(const std::string& path, const SpinConfig& config,
                 const ModelParams& params, LatticeKind kind, int L,
                 uint64_t seed) {
  BinWriter w;
  w.put(kConfigMagic);
  w.put(kConfigVersion);
  w.put(static_cast<uint8_t>(kind));
  w.put(static_cast<uint32_t>(L));
  w.put(static_cast<uint32_t>(config.n));
  w.put(static_cast<uint8_t>(params.variant));
  w.put(params.beta);
  w.put(params.epsilon);
  w.put(params.b);
  const auto u = params.axis();
  w.put_bytes(u.data(), u.size() * sizeof(double));
  w.put(seed);
  w.put(config.generation);
  w.put_bytes(config.s.data(), config.s.size() * sizeof(double));
  w.put(w.digest());
  w.write_file(path);
}

std::vector<double> perpendicular_axis(std::span<const double> u) {
  const int n = static_cast<int>(u.size());
  if (n < 2) throw std::invalid_argument("perpendicular_axis: need n >= 2");
  int k_min = 0;
  for (int k = 1; k < n; ++k)
    if (std::abs(u[k]) < std::abs(u[k_min])) k_min = k;
  std::vector<double> v(n, 0.0);
  v[k_min] = 1.0;
  const double proj = u[k_min];
  double norm2 = 0.0;
  for (int k = 0; k < n; ++k) {
    v[k] -= proj * u[k];
    norm2 += v[k] * v[k];
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& c : v) c *= inv;
  return v;
}

std::pair<std::vector<double>, std::vector<double>> perpendicular_plane(
    std::span<const double> u) {
  const int n = static_cast<int>(u.size());
  if (n < 3) throw std::invalid_argument("perpendicular_plane: need n >= 3");
  auto e1 = perpendicular_axis(u);
  std::vector<double> e2(n, 0.0);
  int k_min = -1;
  for (int k = 0; k < n; ++k) {
    const double overlap = std::abs(u[k]) + std::abs(e1[k]);
    if (k_min < 0 || overlap < std::abs(u[k_min]) + std::abs(e1[k_min]))
      k_min = k;
  }
  e2[k_min] = 1.0;
  const double pu = dot(e2, u);
  const double p1 = dot(e2, std::span<const double>(e1));
  double norm2 = 0.0;
  for (int k = 0; k < n; ++k) {
    e2[k] -= pu * u[k] + p1 * e1[k];
    norm2 += e2[k] * e2[k];
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& c : e2) c *= inv;
  return {std::move(e1), std::move(e2)};
}

ConfigSnapshot load_config(const std::string& path) {
  BinReader r = BinReader::read_file(path);
  if (r.get<uint64_t>() != kConfigMagic)
    throw std::runtime_error("not a configuration snapshot: " + path);
  const auto version = r.get<uint32_t>();
  if (version != kConfigVersion)
    throw std::runtime_error("unsupported snapshot version");
  ConfigSnapshot snap;
  snap.kind = static_cast<LatticeKind>(r.get<uint8_t>());
  snap.L = static_cast<int>(r.get<uint32_t>());
  const int n = static_cast<int>(r.get<uint32_t>());
  snap.params.n = n;
  snap.params.variant = static_cast<Variant>(r.get<uint8_t>());
  snap.params.beta = r.get<double>();
  snap.params.epsilon = r.get<double>();
  snap.params.b = r.get<double>();
  snap.params.u.resize(n);
  r.get_bytes(snap.params.u.data(), n * sizeof(double));
  snap.seed = r.get<uint64_t>();
  snap.config = make_config(n, snap.L * snap.L);
  snap.config.generation = r.get<uint64_t>();
  r.get_bytes(snap.config.s.data(), snap.config.s.size() * sizeof(double));
  const size_t payload = r.pos();
  if (r.get<uint64_t>() != r.digest_prefix(payload))
    throw std::runtime_error("snapshot digest mismatch: " + path);
  return snap;
}

}  // namespace onp
