#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rejective/design.hpp"

namespace rejective {

/// Above this many k-subsets the scans switch from exhaustive enumeration to
/// seeded sampling.
inline constexpr std::size_t kExhaustiveTupleLimit = 100000;

/// A reproducible set of sorted k-subsets of units, stored flat.
struct TupleSet {
  std::size_t k = 0;
  std::vector<UnitIndex> flat;
  bool exhaustive = false;
  std::size_t sampled = 0;   // uniformly drawn tuples
  std::size_t extremes = 0;  // deterministic extreme tuples appended
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return k == 0 ? 0 : flat.size() / k; }
  std::span<const UnitIndex> operator[](std::size_t i) const {
    return {flat.data() + i * k, k};
  }

  /// e.g. "exhaustive:4060" or "sampled:10000+2:seed=0".
  std::string coverage() const;
};

/// Number of k-subsets of N items, saturating at SIZE_MAX.
std::size_t binomial(std::size_t N, std::size_t k) noexcept;

/// Every k-subset when there are at most kExhaustiveTupleLimit of them;
/// otherwise `budget` uniform k-subsets (tuple i drawn from Rng stream
/// (seed, i)) plus the k units with the smallest p and the k units with the
/// largest p.
TupleSet select_tuples(const Design& design, std::size_t k, std::size_t budget,
                       std::uint64_t seed);

}  // namespace rejective
