#pragma once

// Test-only helpers: a deterministic CSPRNG bit source and brute-force oracles
// that share no code with the library routines they check.

#include <sodium.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringtrng/bitseq.hpp"

namespace oracle {

inline void init_sodium() {
  if (sodium_init() < 0) throw std::runtime_error("libsodium init failed");
}

// ChaCha20-based deterministic bytes keyed by (seed, stream).
inline std::vector<std::uint8_t> csprng_bytes(std::size_t n, std::uint64_t seed, std::uint64_t stream = 0) {
  init_sodium();
  std::array<unsigned char, randombytes_SEEDBYTES> key{};
  std::memcpy(key.data(), &seed, sizeof seed);
  std::memcpy(key.data() + 8, &stream, sizeof stream);
  key[31] = 0x5a;
  std::vector<std::uint8_t> out(n);
  randombytes_buf_deterministic(out.data(), n, key.data());
  return out;
}

inline ringtrng::BitSequence random_bits(std::size_t n, std::uint64_t seed) {
  const auto bytes = csprng_bytes((n + 7) / 8, seed);
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) bits[i] = (bytes[i / 8] >> (i % 8)) & 1U;
  return ringtrng::BitSequence(bits);
}

// i.i.d. bits with P(1) = p1, resolved to 2^-32.
inline ringtrng::BitSequence biased_bits(std::size_t n, double p1, std::uint64_t seed) {
  const auto bytes = csprng_bytes(4 * n, seed, 1);
  const auto cut = static_cast<std::uint64_t>(p1 * 4294967296.0);
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t u = 0;
    std::memcpy(&u, bytes.data() + 4 * i, 4);
    bits[i] = u < cut;
  }
  return ringtrng::BitSequence(bits);
}

// All 2^n sequences of length n, bit i of the mask is s_{i+1}.
inline ringtrng::BitSequence from_mask(std::uint32_t mask, std::size_t n) {
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) bits[i] = (mask >> i) & 1U;
  return ringtrng::BitSequence(bits);
}

inline int sign(const ringtrng::BitSequence& s, std::size_t i) { return s[i] ? -1 : 1; }

inline long long lag_sum(const ringtrng::BitSequence& s, std::size_t tau) {
  long long acc = 0;
  for (std::size_t i = 0; i + tau < s.size(); ++i) acc += sign(s, i) * sign(s, i + tau);
  return acc;
}

struct CkResult {
  double value = -1.0;
  std::vector<std::size_t> lags;
  std::size_t window = 0;
};

// Every lag subset of size k-1 from [1, max_lag] (enumerated in lexicographic
// order) and every window M; each sum recomputed from scratch.
inline CkResult brute_ck(const ringtrng::BitSequence& s, int k, std::size_t max_lag,
                         std::size_t min_window, bool maximal_only = false) {
  const std::size_t n = s.size();
  CkResult best;
  std::vector<std::size_t> d(static_cast<std::size_t>(k - 1));
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = j + 1;
  while (true) {
    const std::size_t top = d.back();
    if (top <= max_lag && top < n) {
      const std::size_t hi = n - top;
      for (std::size_t m = maximal_only ? hi : min_window; m <= hi && m >= 1; ++m) {
        if (m < min_window) continue;
        long long acc = 0;
        for (std::size_t i = 0; i < m; ++i) {
          int p = sign(s, i);
          for (auto lag : d) p *= sign(s, i + lag);
          acc += p;
        }
        const double v = static_cast<double>(std::llabs(acc)) / static_cast<double>(m);
        if (v > best.value + 1e-12) best = {v, d, m};
      }
    }
    // next combination of size k-1 from [1, max_lag]
    int j = static_cast<int>(d.size()) - 1;
    while (j >= 0 && d[static_cast<std::size_t>(j)] == max_lag - (d.size() - 1 - static_cast<std::size_t>(j))) --j;
    if (j < 0) break;
    ++d[static_cast<std::size_t>(j)];
    for (std::size_t t = static_cast<std::size_t>(j) + 1; t < d.size(); ++t) d[t] = d[t - 1] + 1;
  }
  return best;
}

// Occurrences of pattern v (first bit most significant) among windows
// starting at 1..M-k+1.
inline std::size_t brute_pattern_count(const ringtrng::BitSequence& s, std::size_t m, int k, std::uint32_t v) {
  std::size_t c = 0;
  for (std::size_t start = 0; start + static_cast<std::size_t>(k) <= m; ++start) {
    std::uint32_t x = 0;
    for (int j = 0; j < k; ++j) x = (x << 1) | (s[start + static_cast<std::size_t>(j)] ? 1U : 0U);
    c += x == v;
  }
  return c;
}

inline double brute_nk(const ringtrng::BitSequence& s, int k, std::size_t min_window) {
  double best = 0.0;
  for (std::size_t m = min_window; m <= s.size(); ++m) {
    for (std::uint32_t v = 0; v < (1U << k); ++v) {
      const double f = static_cast<double>(brute_pattern_count(s, m, k, v)) / static_cast<double>(m);
      best = std::max(best, std::fabs(f - std::ldexp(1.0, -k)));
    }
  }
  return best;
}

// Moments of log2 A for a geometric spacing A with success 2^-b, by summation
// by parts: E[g(A)] = sum_{i>=1} q^i (g(i+1) - g(i)) for g(1) = 0.
struct Moments {
  double mean = 0.0;
  double second = 0.0;
};

inline Moments spacing_moments_by_parts(int b) {
  const double q = 1.0 - std::ldexp(1.0, -b);
  Moments m;
  double qi = q;
  for (std::size_t i = 1; i < 200'000'000; ++i) {
    const double g0 = std::log2(static_cast<double>(i));
    const double g1 = std::log2(static_cast<double>(i + 1));
    m.mean += qi * (g1 - g0);
    m.second += qi * (g1 * g1 - g0 * g0);
    qi *= q;
    if (qi * (g1 * g1 + 1.0) * static_cast<double>(1U << b) * 64.0 < 1e-15) break;
  }
  return m;
}

inline double mean_of(std::vector<double> v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace oracle
