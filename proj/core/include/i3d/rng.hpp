#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace i3d {

// splitmix64; used to derive independent per-sample seeds from a master seed.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t mix64(uint64_t a, uint64_t b) { return mix64(mix64(a) ^ b); }

inline uint64_t mix64(uint64_t a, uint64_t b, uint64_t c) {
  return mix64(mix64(a, b) ^ c);
}

inline std::mt19937_64 make_rng(uint64_t seed) { return std::mt19937_64(mix64(seed)); }

// Portable draws on top of the engine's raw 64-bit stream; the standard
// distributions are implementation-defined and would break seed-stable
// outputs across library versions.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);  // [0,1)
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

inline double gaussian(std::mt19937_64& rng) {
  // Box-Muller; the sine half of each pair is discarded for statelessness.
  const double u1 = 1.0 - uniform01(rng);  // (0,1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  // Rejection sampling; unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x > limit);
  return x % n;
}

template <typename T>
void fisher_yates(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[bounded(rng, i)]);
  }
}

// Hash of a 2D lattice point, for procedural value noise.
inline double lattice_hash01(uint64_t seed, int64_t ix, int64_t iy) {
  uint64_t h = mix64(seed, static_cast<uint64_t>(ix) * 0x8da6b343ULL,
                     static_cast<uint64_t>(iy) * 0xd8163841ULL);
  return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);  // [0,1)
}

// Smooth value noise in [0,1]: bilinear blend of lattice hashes with a
// quintic fade. Deterministic in (seed, position).
inline double value_noise(uint64_t seed, double x, double y) {
  const double fx = std::floor(x), fy = std::floor(y);
  const int64_t ix = static_cast<int64_t>(fx), iy = static_cast<int64_t>(fy);
  double tx = x - fx, ty = y - fy;
  auto fade = [](double t) { return t * t * t * (t * (t * 6 - 15) + 10); };
  tx = fade(tx);
  ty = fade(ty);
  const double v00 = lattice_hash01(seed, ix, iy);
  const double v10 = lattice_hash01(seed, ix + 1, iy);
  const double v01 = lattice_hash01(seed, ix, iy + 1);
  const double v11 = lattice_hash01(seed, ix + 1, iy + 1);
  const double a = v00 + (v10 - v00) * tx;
  const double b = v01 + (v11 - v01) * tx;
  return a + (b - a) * ty;
}

}  // namespace i3d
