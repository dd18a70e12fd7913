// Randomness helpers. std::mt19937_64 output is fully specified by the
// standard, but the std distributions are not, so every draw we need is
// implemented here by hand to keep runs byte-reproducible across compilers.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace ia {

// splitmix64 finalizer, used to derive independent stream seeds from one
// master seed without correlating the streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// uniform double in [0, 1) with 53 random bits
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// categorical draw by CDF scan; weights need not be exactly normalized
inline int categorical(std::mt19937_64& g, std::span<const double> w) {
  double total = 0.0;
  for (double v : w) total += v;
  double u = uniform01(g) * total;
  double acc = 0.0;
  for (int i = 0; i + 1 < static_cast<int>(w.size()); ++i) {
    acc += w[i];
    if (u < acc) return i;
  }
  return static_cast<int>(w.size()) - 1;
}

// uniform point on the probability simplex (Dirichlet(1,...,1)) via
// normalized exponentials; entries are almost surely positive
inline void simplex_draw(std::mt19937_64& g, std::span<double> out) {
  double total = 0.0;
  for (double& v : out) {
    v = -std::log(1.0 - uniform01(g));
    total += v;
  }
  for (double& v : out) v /= total;
}

}  // namespace ia
