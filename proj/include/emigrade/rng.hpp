#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace emigrade {

// splitmix64 finalizer. Used to turn arbitrary 64-bit ids into well-mixed
// stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a master seed and a tuple of ids
// (e.g. {purpose, level, split, frame index}). Folding order matters and is
// part of the on-disk reproducibility contract.
inline std::uint64_t derive_stream(std::uint64_t seed,
                                   std::initializer_list<std::uint64_t> ids) {
  std::uint64_t s = mix64(seed);
  for (std::uint64_t id : ids) s = mix64(s ^ id);
  return s;
}

// Stream ids for the different consumers of randomness. Keeping them distinct
// guarantees e.g. weight init never shares draws with data shuffling.
enum StreamId : std::uint64_t {
  kStreamFrame = 1,    // (level, split, frame index)
  kStreamInit = 2,     // weight initialisation
  kStreamShuffle = 3,  // (epoch)
  kStreamAugment = 4,  // (epoch, sample index)
  kStreamDropout = 5,  // (epoch, sample index)
};

// Deterministic random source. The generator is std::mt19937_64, whose output
// sequence is pinned by the C++ standard; all distributions below are
// hand-rolled on top of it (std::*_distribution is implementation-defined),
// so a given seed produces the same draws on every platform and compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t stream_seed) : gen_(stream_seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n >= 1. Multiply-shift with rejection, no
  // modulo bias.
  std::uint64_t uniform_index(std::uint64_t n) {
    using u128 = unsigned __int128;
    std::uint64_t x = next_u64();
    u128 m = static_cast<u128>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t threshold = -n % n;
      while (lo < threshold) {
        x = next_u64();
        m = static_cast<u128>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller; the spare value is cached, so draws come
  // in deterministic pairs.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  // Fisher-Yates. std::shuffle is implementation-defined, this is not.
  template <class RandomIt>
  void shuffle(RandomIt first, RandomIt last) {
    auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      std::uint64_t j = uniform_index(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace emigrade
