#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace doco::rng {

// splitmix64 finalizer; also used to fold tags/indices into stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Deterministic, platform-stable random stream (splitmix64 core).
///
/// Streams are derived by name so that every consumer of randomness gets an
/// independent sub-stream of the master seed: identical (seed, tag, indices)
/// always reproduces the identical draw sequence, regardless of what other
/// streams were consumed in between.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  static Stream derive(std::uint64_t master, std::string_view tag,
                       std::uint64_t a = 0, std::uint64_t b = 0,
                       std::uint64_t c = 0) {
    std::uint64_t s = mix64(master ^ hash_tag(tag));
    s = mix64(s ^ a);
    s = mix64(s ^ b);
    s = mix64(s ^ c);
    return Stream(s);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). bound > 0.
  std::uint64_t uniform_below(std::uint64_t bound) { return next_u64() % bound; }

  /// Standard normal via Box-Muller (pair cached).
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  /// Uniform point on the unit sphere in R^d.
  Eigen::VectorXd unit_sphere(int d) {
    Eigen::VectorXd u(d);
    double nrm = 0.0;
    do {
      for (int i = 0; i < d; ++i) u[i] = normal();
      nrm = u.norm();
    } while (nrm < 1e-300);
    return u / nrm;
  }

  /// Random sign, +1 or -1.
  double sign() { return (next_u64() & 1u) ? 1.0 : -1.0; }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace doco::rng
