#include "rejective/tuples.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "rejective/rng.hpp"

namespace rejective {

std::size_t binomial(std::size_t N, std::size_t k) noexcept {
  if (k > N) return 0;
  k = std::min(k, N - k);
  unsigned __int128 acc = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    acc = acc * (N - k + i) / i;
    if (acc > std::numeric_limits<std::size_t>::max()) return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(acc);
}

std::string TupleSet::coverage() const {
  if (exhaustive) return "exhaustive:" + std::to_string(size());
  return "sampled:" + std::to_string(sampled) + "+" + std::to_string(extremes) +
         ":seed=" + std::to_string(seed);
}

TupleSet select_tuples(const Design& design, std::size_t k, std::size_t budget,
                       std::uint64_t seed) {
  const std::size_t N = design.population_size();
  TupleSet set;
  set.k = k;
  set.seed = seed;
  if (k == 0 || k > N) {
    set.exhaustive = true;
    return set;
  }

  if (binomial(N, k) <= kExhaustiveTupleLimit) {
    set.exhaustive = true;
    std::vector<UnitIndex> cur(k);
    std::iota(cur.begin(), cur.end(), UnitIndex{0});
    for (;;) {
      set.flat.insert(set.flat.end(), cur.begin(), cur.end());
      std::size_t i = k;
      while (i > 0 && cur[i - 1] == N - k + i - 1) --i;
      if (i == 0) break;
      ++cur[i - 1];
      for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    return set;
  }

  set.flat.reserve((budget + 2) * k);
  std::vector<UnitIndex> tuple;
  for (std::size_t t = 0; t < budget; ++t) {
    Rng rng = Rng::stream(seed, t);
    tuple.clear();
    while (tuple.size() < k) {
      const auto u = static_cast<UnitIndex>(rng.below(N));
      if (std::find(tuple.begin(), tuple.end(), u) == tuple.end()) tuple.push_back(u);
    }
    std::sort(tuple.begin(), tuple.end());
    set.flat.insert(set.flat.end(), tuple.begin(), tuple.end());
  }
  set.sampled = budget;

  std::vector<UnitIndex> order(N);
  std::iota(order.begin(), order.end(), UnitIndex{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](UnitIndex a, UnitIndex b) { return design.p(a) < design.p(b); });
  for (bool smallest : {true, false}) {
    tuple.assign(smallest ? order.begin() : order.end() - static_cast<std::ptrdiff_t>(k),
                 smallest ? order.begin() + static_cast<std::ptrdiff_t>(k) : order.end());
    std::sort(tuple.begin(), tuple.end());
    set.flat.insert(set.flat.end(), tuple.begin(), tuple.end());
    ++set.extremes;
  }
  return set;
}

}  // namespace rejective
