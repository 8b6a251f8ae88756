#pragma once

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <vector>

namespace sage::rng {

// SplitMix64. Used everywhere instead of std:: distributions so that
// sampled sequences are identical across standard libraries and platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). Rejection sampling keeps the draw unbiased.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

  // k distinct indices from [0, n), returned sorted ascending.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::uint64_t state_;
};

// Derives an independent stream for a named pipeline stage, so parallel
// stages cannot perturb one another's draws.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  SplitMix64 mix(master ^ (0x6a09e667f3bcc909ull + stream * 0x9e3779b97f4a7c15ull));
  return mix.next_u64();
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return derive_seed(derive_seed(master, a), b);
}

inline std::vector<std::size_t> SplitMix64::sample_without_replacement(std::size_t n, std::size_t k) {
  // Floyd's algorithm; result sorted for deterministic downstream order.
  std::vector<std::size_t> out;
  if (k >= n) {
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = i;
    return out;
  }
  out.reserve(k);
  for (std::size_t j = n - k; j < n; ++j) {
    std::size_t t = static_cast<std::size_t>(uniform_index(j + 1));
    bool seen = false;
    for (std::size_t x : out) {
      if (x == t) { seen = true; break; }
    }
    out.push_back(seen ? j : t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sage::rng
