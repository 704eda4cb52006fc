#pragma once

// Brute-force references used as independent oracles: every outcome vector of
// N Bernoulli variables is enumerated in long double and conditioned on the
// sample size directly, without any of the library's convolution code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rejective/design.hpp"
#include "rejective/rng.hpp"

namespace support {

using rejective::Design;
using rejective::UnitIndex;

/// Poisson parameters in (lo, hi) summing to n, by bisection on a common
/// logit shift of random starting values. The last unit absorbs rounding.
inline Design random_design(rejective::Rng& rng, std::size_t N, std::size_t n, double lo = 0.03,
                            double hi = 0.97) {
  for (;;) {
    std::vector<double> logit(N);
    for (auto& v : logit) {
      const double q = lo + (hi - lo) * rng.uniform();
      v = std::log(q / (1.0 - q));
    }
    double a = -40.0, b = 40.0;
    std::vector<double> p(N);
    for (int it = 0; it < 200; ++it) {
      const double c = 0.5 * (a + b);
      double s = 0.0;
      for (std::size_t i = 0; i < N; ++i) s += 1.0 / (1.0 + std::exp(-(logit[i] + c)));
      (s < static_cast<double>(n) ? a : b) = c;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      p[i] = 1.0 / (1.0 + std::exp(-(logit[i] + 0.5 * (a + b))));
      if (i + 1 < N) s += p[i];
    }
    p[N - 1] = static_cast<double>(n) - s;
    if (p[N - 1] > 0.0 && p[N - 1] < 1.0) return rejective::validate_design(p, static_cast<std::int64_t>(n));
  }
}

/// Rejective probability of every size-n outcome mask.
struct BruteForce {
  std::vector<std::uint32_t> masks;
  std::vector<long double> probs;
  long double size_probability = 0.0L;

  explicit BruteForce(const Design& design) {
    const std::size_t N = design.population_size();
    long double total = 0.0L;
    for (std::uint32_t mask = 0; mask < (1U << N); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) != design.sample_size()) continue;
      long double w = 1.0L;
      for (std::size_t i = 0; i < N; ++i) {
        const long double p = design.p(i);
        w *= ((mask >> i) & 1U) ? p : 1.0L - p;
      }
      masks.push_back(mask);
      probs.push_back(w);
      total += w;
    }
    size_probability = total;
    for (auto& v : probs) v /= total;
  }

  template <typename F>
  long double expect(F&& f) const {
    long double acc = 0.0L;
    for (std::size_t s = 0; s < masks.size(); ++s) acc += probs[s] * f(masks[s]);
    return acc;
  }

  double inclusion(const std::vector<UnitIndex>& units) const {
    std::uint32_t want = 0;
    for (UnitIndex u : units) want |= 1U << u;
    return static_cast<double>(expect([&](std::uint32_t m) { return (m & want) == want ? 1.0L : 0.0L; }));
  }

  double central_moment(const std::vector<UnitIndex>& units, const std::vector<int>& powers) const {
    std::vector<long double> pi;
    for (UnitIndex u : units) pi.push_back(inclusion({u}));
    return static_cast<double>(expect([&](std::uint32_t m) {
      long double v = 1.0L;
      for (std::size_t j = 0; j < units.size(); ++j) {
        const long double b = ((m >> units[j]) & 1U) ? 1.0L : 0.0L;
        for (int e = 0; e < powers[j]; ++e) v *= b - pi[j];
      }
      return v;
    }));
  }
};

/// n(n-1)...(n-k+1) / (N(N-1)...(N-k+1)).
inline double srswor_inclusion(std::size_t N, std::size_t n, std::size_t k) {
  double v = 1.0;
  for (std::size_t j = 0; j < k; ++j) v *= static_cast<double>(n - j) / static_cast<double>(N - j);
  return v;
}

/// All subsets of {0..N-1} with 1..kmax members.
inline std::vector<std::vector<UnitIndex>> subsets_up_to(std::size_t N, std::size_t kmax) {
  std::vector<std::vector<UnitIndex>> out;
  for (std::uint32_t mask = 1; mask < (1U << N); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) > kmax) continue;
    std::vector<UnitIndex> s;
    for (std::size_t i = 0; i < N; ++i) {
      if ((mask >> i) & 1U) s.push_back(i);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace support
