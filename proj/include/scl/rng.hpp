// Deterministic random utilities.
//
// Every stochastic step in the library (splits, shuffles, weight init,
// random pivot sampling, synthetic data) draws from these helpers so that a
// run is reproducible from a single 64-bit seed on any platform. std::mt19937_64
// has a standard-mandated output sequence; the bounded/unit transforms below are
// written out explicitly instead of going through std::uniform_*_distribution,
// whose algorithms are implementation-defined.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace scl::rng {

using Engine = std::mt19937_64;

// splitmix64 finalizer; used to derive independent stream seeds from one
// base seed without correlated low bits.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
  return Engine(mix(seed, stream));
}

// Unbiased draw in [0, bound) by rejection.
inline std::uint64_t next_below(Engine& eng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return x % bound;
}

// Uniform in [0, 1) with 53 random bits.
inline double next_unit(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform in [-limit, limit).
inline double next_symmetric(Engine& eng, double limit) {
  return (2.0 * next_unit(eng) - 1.0) * limit;
}

inline bool next_bernoulli(Engine& eng, double p) { return next_unit(eng) < p; }

// Fisher-Yates; identical results on every platform for a given engine state.
template <typename T>
void shuffle(std::vector<T>& values, Engine& eng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(next_below(eng, i));
    std::swap(values[i - 1], values[j]);
  }
}

// 0..n-1 permuted.
inline std::vector<std::size_t> permutation(std::size_t n, Engine& eng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  shuffle(order, eng);
  return order;
}

// Sample k distinct values from 0..n-1, ascending. Selection-sampling keeps
// the draw order independent of k's relation to n.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                           Engine& eng) {
  std::vector<std::size_t> picked;
  if (k > n) k = n;
  picked.reserve(k);
  std::size_t needed = k;
  for (std::size_t i = 0; i < n && needed > 0; ++i) {
    const std::uint64_t remaining = n - i;
    if (next_below(eng, remaining) < needed) {
      picked.push_back(i);
      --needed;
    }
  }
  return picked;
}

}  // namespace scl::rng
