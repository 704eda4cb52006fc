#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "rejective/compensated_sum.hpp"
#include "rejective/design.hpp"

namespace rejective {

/// Law of K = I_1 + ... + I_N under Poisson sampling; probs[l] = P(K = l).
struct PoissonBinomialPMF {
  std::vector<double> probs;

  double at(std::size_t l) const noexcept { return l < probs.size() ? probs[l] : 0.0; }
  double total() const;
  double mean() const;
  double variance() const;
};

/// Convolution one unit at a time. Units with p in {0,1} only shift the support.
PoissonBinomialPMF pmf(const Design& design);

/// Law of the sum over units outside `excluded` (length N - |excluded| + 1).
PoissonBinomialPMF pmf_excluding(const Design& design, std::span<const UnitIndex> excluded);

enum class Method { ExactDp, Enumeration, Theorem1P, Theorem1Pi, Hajek2 };
std::string_view to_string(Method method) noexcept;

struct InclusionResult {
  std::vector<UnitIndex> units;
  double value = 0.0;
  Method method = Method::ExactDp;
  double d_used = 0.0;
};

/// pi_A from the conditioning identity, with the leave-out law rebuilt from
/// scratch for this subset. Subsets larger than n get 0.
InclusionResult exact_inclusion(const Design& design, std::span<const UnitIndex> units);

/// P_RS(all of included in s, none of excluded in s).
double exact_exclusion_pattern(const Design& design, std::span<const UnitIndex> included,
                               std::span<const UnitIndex> excluded);

inline constexpr std::size_t kMaxEnumerationUnits = 20;

/// Every size-n sample with its rejective probability. Samples are bitmasks
/// over units (bit i = unit i), in increasing numeric order.
struct RejectiveEnumeration {
  std::vector<std::uint32_t> samples;
  std::vector<double> probs;

  /// Sum of probabilities of samples that contain every unit in `units`.
  double inclusion(std::span<const UnitIndex> units) const;

  /// Expectation of f(sample mask) under the design.
  template <typename F>
  double expectation(F&& f) const;
};

/// Throws Error{TooLarge} when N > 20.
RejectiveEnumeration enumerate_rejective(const Design& design);

/// Precomputed prefix and suffix laws of the random part of K, so that any
/// leave-out probability needs only the units between the first and last
/// excluded unit plus one reversed dot product. First-order inclusion
/// probabilities cost O(N) each after the O(N^2) setup; the full pair table
/// is a sweep costing O(N^3) in total.
///
/// Memory is O(N * min(n, N - n)). Instances are immutable after
/// construction and may be queried concurrently.
class ExactOracle {
 public:
  explicit ExactOracle(const Design& design);

  const Design& design() const noexcept { return design_; }

  /// P(K = n) under Poisson sampling.
  double size_probability() const noexcept { return size_probability_; }

  /// pi for an arbitrary unit set (empty set gives 1).
  double inclusion(std::span<const UnitIndex> units) const;

  double exclusion_pattern(std::span<const UnitIndex> included,
                           std::span<const UnitIndex> excluded) const;

  /// Rejective probabilities of all 2^k inclusion patterns of `units`
  /// (k <= 20). Entry `mask` has units[j] included iff bit j of mask is set.
  std::vector<double> pattern_probabilities(std::span<const UnitIndex> units) const;

  std::vector<double> first_order() const;

  /// Row-major N x N table of pi_ij with pi_i on the diagonal.
  std::vector<double> pair_table(unsigned workers = 1) const;

 private:
  struct Window {
    std::size_t first = 0;
    std::vector<double> mass;
    double at(std::ptrdiff_t l) const noexcept;
    std::ptrdiff_t last() const noexcept {
      return static_cast<std::ptrdiff_t>(first + mass.size()) - 1;
    }
    void swap(Window& other) noexcept {
      std::swap(first, other.first);
      mass.swap(other.mass);
    }
  };

  static constexpr std::size_t kNotRandom = static_cast<std::size_t>(-1);

  void convolve(const Window& src, double p, std::ptrdiff_t lo, std::ptrdiff_t hi,
                Window& dst) const;
  double combine(const Window& left, const Window& right, std::ptrdiff_t target) const;

  // c[j] = P(sum of random units outside `positions` = n_R - j), j = 0..k.
  // `positions` are sorted random-unit positions.
  std::vector<double> leave_out(std::span<const std::size_t> positions) const;

  Design design_;
  std::vector<std::size_t> position_;  // unit -> random position or kNotRandom
  std::vector<double> random_p_;       // p of random units in unit order
  std::size_t target_ = 0;             // n_R = n - #certain units
  std::vector<Window> prefix_;         // prefix_[r]: first r random units
  std::vector<Window> suffix_;         // suffix_[s]: random units s..R-1
  double size_probability_ = 0.0;

  friend class SequentialSampler;
};

template <typename F>
double RejectiveEnumeration::expectation(F&& f) const {
  CompensatedSum acc;
  for (std::size_t i = 0; i < samples.size(); ++i) acc += probs[i] * f(samples[i]);
  return acc.value();
}

}  // namespace rejective
