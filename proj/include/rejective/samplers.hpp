#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rejective/correlation.hpp"
#include "rejective/design.hpp"
#include "rejective/exact_oracle.hpp"
#include "rejective/rng.hpp"

namespace rejective {

enum class SamplerMethod { Poisson, Rejection, Sequential };
std::string_view to_string(SamplerMethod method) noexcept;
/// "poisson", "rejection" or "sequential"; throws Error{BadInput}.
SamplerMethod parse_sampler_method(std::string_view name);

struct Sample {
  std::vector<UnitIndex> included;  // ascending
  SamplerMethod method = SamplerMethod::Poisson;
  std::uint64_t attempts = 1;
};

Sample sample_poisson(const Design& design, Rng& rng);

/// 1000 * ceil(1 / max(P(K = n), 1e-6)), capped at 1e8.
std::uint64_t default_max_attempts(const Design& design);

/// Poisson draws until one has exactly n units. Throws
/// Error{MaxAttemptsExceeded}.
Sample sample_rejective_rejection(const Design& design, Rng& rng, std::uint64_t max_attempts);

/// Exact rejective draws by walking units in index order, each included with
/// its probability conditional on the remaining quota. One uniform is
/// consumed per unit with 0 < p < 1.
class SequentialSampler {
 public:
  explicit SequentialSampler(const Design& design);

  const Design& design() const noexcept { return oracle_.design(); }

  Sample draw(Rng& rng) const;

  /// Product of the per-unit conditional probabilities along the path that
  /// produces exactly this sample.
  double path_probability(std::span<const UnitIndex> sample) const;

 private:
  // P(unit at random position a is included | quota r for positions a..R-1).
  double include_probability(std::size_t a, std::size_t r) const;

  ExactOracle oracle_;
};

Sample sample_rejective_sequential(const Design& design, Rng& rng);

struct MCEstimate {
  std::string target;
  double estimate = 0.0;
  std::uint64_t replications = 0;
  std::optional<double> std_error;  // absent when R = 1
  std::uint64_t seed = 0;
};

struct MCOptions {
  SamplerMethod method = SamplerMethod::Sequential;
  unsigned workers = 1;
};

/// Frequency of A being inside the sample over R replications; replication r
/// draws from Rng::stream(seed, r).
MCEstimate mc_inclusion(const Design& design, std::span<const UnitIndex> units,
                        std::uint64_t replications, std::uint64_t seed,
                        const MCOptions& options = {});

/// Mean of prod (I_j - pi_j)^{n_j} with the exact pi_j.
MCEstimate mc_central_moment(const Design& design, const CentralMomentQuery& query,
                             std::uint64_t replications, std::uint64_t seed,
                             const MCOptions& options = {});

}  // namespace rejective
