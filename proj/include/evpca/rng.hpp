#pragma once

#include <cstdint>
#include <random>

#include "evpca/linalg.hpp"

namespace evpca {

/// splitmix64 step; used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e9b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream seed for (seed, a, b, c); fixed splitting rule so parallel
/// and serial runs agree.
inline std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t a,
                                  std::uint64_t b, std::uint64_t c) {
  std::uint64_t s = seed;
  std::uint64_t z = splitmix64(s) ^ a;
  z = (s = z, splitmix64(s)) ^ b;
  z = (s = z, splitmix64(s)) ^ c;
  s = z;
  return splitmix64(s);
}

/// Standard normal stream: mt19937_64 + explicit Box-Muller, so the
/// byte stream is pinned independent of the standard library.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01_open();
    const double u2 = uniform01_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  Vector vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = (*this)();
    return v;
  }

 private:
  double uniform01_open() {
    // in (0, 1]: never feeds log() a zero
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
  }

  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0;
};

}  // namespace evpca
