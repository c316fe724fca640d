// rng.hpp
//
// Checkpointable random number generator (xoshiro256++) plus the sphere
// sampling helpers used by the samplers. The full generator state is a
// plain struct of integers, so checkpoints restore draws bit-exactly.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace onp {

inline uint64_t splitmix64(uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// deterministic per-chain seed from a master seed and a grid/chain index
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
  uint64_t x = master ^ (0x9e3779b97f4a7c15ull * (index + 1));
  return splitmix64(x);
}

struct RngState {
  std::string algorithm = "xoshiro256++";
  uint64_t seed = 0;
  uint64_t draws = 0;  // 64-bit outputs consumed
  std::array<uint64_t, 4> s{};
};

class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed) {
    uint64_t x = seed;
    for (auto& w : s_) w = splitmix64(x);
  }

  static Rng from_state(const RngState& st) {
    if (st.algorithm != "xoshiro256++")
      throw std::runtime_error("unknown rng algorithm: " + st.algorithm);
    Rng r(st.seed);
    r.s_ = st.s;
    r.draws_ = st.draws;
    return r;
  }

  RngState state() const {
    RngState st;
    st.seed = seed_;
    st.draws = draws_;
    st.s = s_;
    return st;
  }

  uint64_t next_u64() {
    auto rotl = [](uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    ++draws_;
    return result;
  }

  // uniform in [0,1)
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // uniform index in [0,n)
  uint32_t uniform_index(uint32_t n) {
    uint32_t k = static_cast<uint32_t>(uniform() * n);
    return k < n ? k : n - 1;
  }

  // standard normal, Marsaglia polar without caching the spare value
  double normal() {
    for (;;) {
      double u = uniform(-1.0, 1.0);
      double v = uniform(-1.0, 1.0);
      double r = u * u + v * v;
      if (r > 0.0 && r < 1.0) return u * std::sqrt(-2.0 * std::log(r) / r);
    }
  }

  // uniform on the unit sphere S^{n-1}
  void unit_vector(std::span<double> out) {
    for (;;) {
      double norm2 = 0.0;
      for (auto& c : out) {
        c = normal();
        norm2 += c * c;
      }
      if (norm2 > 1e-24) {
        double inv = 1.0 / std::sqrt(norm2);
        for (auto& c : out) c *= inv;
        return;
      }
    }
  }

  // uniform on the geodesic cap of angular radius delta around axis.
  // axis must be unit; out may not alias axis.
  void cap_vector(std::span<const double> axis, double delta,
                  std::span<double> out) {
    const int n = static_cast<int>(axis.size());
    if (delta >= M_PI) {  // full sphere
      unit_vector(out);
      return;
    }
    if (n == 2) {
      double theta = std::atan2(axis[1], axis[0]) + uniform(-delta, delta);
      out[0] = std::cos(theta);
      out[1] = std::sin(theta);
      return;
    }
    const double c = std::cos(delta);
    double t;
    if (n == 3) {
      t = 1.0 - uniform() * (1.0 - c);  // cos(angle) uniform on [c,1]
    } else {
      // density on [c,1] is (1-t^2)^{(n-3)/2}; rejection from uniform
      const double tpeak = std::max(0.0, c);
      const double bound = std::pow(1.0 - tpeak * tpeak, 0.5 * (n - 3));
      for (;;) {
        t = uniform(c, 1.0);
        double w = std::pow(1.0 - t * t, 0.5 * (n - 3));
        if (uniform() * bound <= w) break;
      }
    }
    // uniform direction in the orthogonal complement of axis
    double norm2 = 0.0;
    for (;;) {
      double dot = 0.0;
      for (int k = 0; k < n; ++k) {
        out[k] = normal();
        dot += out[k] * axis[k];
      }
      norm2 = 0.0;
      for (int k = 0; k < n; ++k) {
        out[k] -= dot * axis[k];
        norm2 += out[k] * out[k];
      }
      if (norm2 > 1e-24) break;
    }
    const double scale = std::sqrt(1.0 - t * t) / std::sqrt(norm2);
    for (int k = 0; k < n; ++k) out[k] = t * axis[k] + scale * out[k];
  }

 private:
  std::array<uint64_t, 4> s_{};
  uint64_t seed_ = 0;
  uint64_t draws_ = 0;
};

}  // namespace onp
