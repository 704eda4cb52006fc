#include "rejective/exact_oracle.hpp"

#include <algorithm>
#include <bit>

#include "rejective/compensated_sum.hpp"
#include "rejective/error.hpp"
#include "rejective/kernels.hpp"
#include "rejective/parallel.hpp"

namespace rejective {

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::ExactDp: return "exact-dp";
    case Method::Enumeration: return "enumeration";
    case Method::Theorem1P: return "theorem1-p";
    case Method::Theorem1Pi: return "theorem1-pi";
    case Method::Hajek2: return "hajek2";
  }
  return "unknown";
}

double PoissonBinomialPMF::total() const { return compensated_sum(probs); }

double PoissonBinomialPMF::mean() const {
  CompensatedSum acc;
  for (std::size_t l = 0; l < probs.size(); ++l) acc += static_cast<double>(l) * probs[l];
  return acc.value();
}

double PoissonBinomialPMF::variance() const {
  const double m = mean();
  CompensatedSum acc;
  for (std::size_t l = 0; l < probs.size(); ++l) {
    const double dev = static_cast<double>(l) - m;
    acc += dev * dev * probs[l];
  }
  return acc.value();
}

namespace {

// Law of a sum of independent Bernoulli(p) for p strictly inside (0,1),
// shifted by the number of certain units.
PoissonBinomialPMF convolve_units(const Design& design, std::span<const UnitIndex> excluded) {
  std::vector<bool> skip(design.population_size(), false);
  for (UnitIndex i : excluded) skip[i] = true;

  std::size_t shift = 0;
  std::size_t kept = 0;
  std::vector<double> cur{1.0};
  std::vector<double> next;
  for (UnitIndex i = 0; i < design.population_size(); ++i) {
    if (skip[i]) continue;
    ++kept;
    const double p = design.p(i);
    if (p == 1.0) {
      ++shift;
    } else if (p > 0.0) {
      next.resize(cur.size() + 1);
      kernels::bernoulli_step(cur, p, 0, next);
      cur.swap(next);
    }
  }
  PoissonBinomialPMF out;
  out.probs.assign(kept + 1, 0.0);
  std::copy(cur.begin(), cur.end(), out.probs.begin() + static_cast<std::ptrdiff_t>(shift));
  return out;
}

}  // namespace

PoissonBinomialPMF pmf(const Design& design) { return convolve_units(design, {}); }

PoissonBinomialPMF pmf_excluding(const Design& design, std::span<const UnitIndex> excluded) {
  const auto units = checked_units(design, excluded);
  return convolve_units(design, units);
}

InclusionResult exact_inclusion(const Design& design, std::span<const UnitIndex> units) {
  if (units.empty()) throw Error(ErrorCode::BadIndex, "empty unit set");
  InclusionResult r;
  r.units = checked_units(design, units);
  r.method = Method::ExactDp;
  r.d_used = poisson_variance(design);

  const std::size_t n = design.sample_size();
  const double denominator = pmf(design).at(n);
  if (!(denominator > 0.0)) throw Error(ErrorCode::ZeroDenominator, "P(K = n) = 0");
  if (r.units.size() > n) return r;

  double weight = 1.0;
  for (UnitIndex i : r.units) weight *= design.p(i);
  r.value = weight * pmf_excluding(design, r.units).at(n - r.units.size()) / denominator;
  return r;
}

double exact_exclusion_pattern(const Design& design, std::span<const UnitIndex> included,
                               std::span<const UnitIndex> excluded) {
  std::vector<UnitIndex> all(included.begin(), included.end());
  all.insert(all.end(), excluded.begin(), excluded.end());
  all = checked_units(design, all);

  const std::size_t n = design.sample_size();
  const double denominator = pmf(design).at(n);
  if (!(denominator > 0.0)) throw Error(ErrorCode::ZeroDenominator, "P(K = n) = 0");
  if (included.size() > n || excluded.size() > design.population_size() - n) return 0.0;

  double weight = 1.0;
  for (UnitIndex i : included) weight *= design.p(i);
  for (UnitIndex i : excluded) weight *= 1.0 - design.p(i);
  return weight * pmf_excluding(design, all).at(n - included.size()) / denominator;
}

double RejectiveEnumeration::inclusion(std::span<const UnitIndex> units) const {
  std::uint32_t mask = 0;
  for (UnitIndex i : units) mask |= std::uint32_t{1} << i;
  CompensatedSum acc;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    if ((samples[s] & mask) == mask) acc += probs[s];
  }
  return acc.value();
}

RejectiveEnumeration enumerate_rejective(const Design& design) {
  const std::size_t N = design.population_size();
  const std::size_t n = design.sample_size();
  if (N > kMaxEnumerationUnits) {
    throw Error(ErrorCode::TooLarge, "enumeration is limited to N <= 20, got N = " +
                                         std::to_string(N));
  }
  RejectiveEnumeration out;
  const std::uint32_t limit = std::uint32_t{1} << N;
  // Gosper's hack: successive masks with exactly n bits set.
  for (std::uint32_t s = (std::uint32_t{1} << n) - 1; s < limit;) {
    double w = 1.0;
    for (std::size_t i = 0; i < N; ++i) {
      w *= (s >> i) & 1U ? design.p(i) : 1.0 - design.p(i);
    }
    out.samples.push_back(s);
    out.probs.push_back(w);
    const std::uint32_t c = s & (0U - s);
    const std::uint32_t r = s + c;
    if (r == 0 || r >= limit) break;
    s = (((r ^ s) >> 2) / c) | r;
  }
  const double c = compensated_sum(out.probs);
  if (!(c > 0.0)) throw Error(ErrorCode::ZeroDenominator, "no size-n sample has positive weight");
  for (double& v : out.probs) v /= c;
  return out;
}

// ---------------------------------------------------------------------------
// ExactOracle

double ExactOracle::Window::at(std::ptrdiff_t l) const noexcept {
  if (l < static_cast<std::ptrdiff_t>(first) || l > last()) return 0.0;
  return mass[static_cast<std::size_t>(l) - first];
}

void ExactOracle::convolve(const Window& src, double p, std::ptrdiff_t lo, std::ptrdiff_t hi,
                           Window& dst) const {
  const auto src_first = static_cast<std::ptrdiff_t>(src.first);
  const std::ptrdiff_t first = std::max({lo, src_first, std::ptrdiff_t{0}});
  const std::ptrdiff_t last = std::min(hi, src.last() + 1);
  dst.first = static_cast<std::size_t>(first);
  if (src.mass.empty() || last < first) {
    dst.mass.clear();
    return;
  }
  dst.mass.resize(static_cast<std::size_t>(last - first + 1));
  kernels::bernoulli_step(src.mass, p, first - src_first, dst.mass);
}

double ExactOracle::combine(const Window& left, const Window& right, std::ptrdiff_t target) const {
  if (left.mass.empty() || right.mass.empty()) return 0.0;
  const std::ptrdiff_t a_lo = std::max(static_cast<std::ptrdiff_t>(left.first), target - right.last());
  const std::ptrdiff_t a_hi = std::min(left.last(), target - static_cast<std::ptrdiff_t>(right.first));
  if (a_hi < a_lo) return 0.0;
  const auto count = static_cast<std::size_t>(a_hi - a_lo + 1);
  const std::span<const double> x(left.mass.data() + (a_lo - static_cast<std::ptrdiff_t>(left.first)), count);
  const std::span<const double> y(
      right.mass.data() + (target - a_hi - static_cast<std::ptrdiff_t>(right.first)), count);
  return kernels::dot_reversed(x, y);
}

ExactOracle::ExactOracle(const Design& design) : design_(design) {
  const std::size_t N = design_.population_size();
  position_.assign(N, kNotRandom);
  for (UnitIndex i = 0; i < N; ++i) {
    const double p = design_.p(i);
    if (p > 0.0 && p < 1.0) {
      position_[i] = random_p_.size();
      random_p_.push_back(p);
    }
  }
  const std::size_t R = random_p_.size();
  target_ = design_.sample_size() - design_.certain_units();
  const auto nr = static_cast<std::ptrdiff_t>(target_);
  const auto rr = static_cast<std::ptrdiff_t>(R);

  // A prefix of r units only matters at counts the remaining R - r units can
  // still lift to n_R; symmetrically for suffixes.
  prefix_.resize(R + 1);
  prefix_[0] = Window{0, {1.0}};
  for (std::size_t r = 0; r < R; ++r) {
    const auto next = static_cast<std::ptrdiff_t>(r + 1);
    convolve(prefix_[r], random_p_[r], nr - (rr - next), std::min(next, nr), prefix_[r + 1]);
  }
  suffix_.resize(R + 1);
  suffix_[R] = Window{0, {1.0}};
  for (std::size_t s = R; s-- > 0;) {
    const auto start = static_cast<std::ptrdiff_t>(s);
    convolve(suffix_[s + 1], random_p_[s], nr - start, std::min(rr - start, nr), suffix_[s]);
  }
  size_probability_ = prefix_[R].at(nr);
  if (!(size_probability_ > 0.0)) throw Error(ErrorCode::ZeroDenominator, "P(K = n) = 0");
}

std::vector<double> ExactOracle::leave_out(std::span<const std::size_t> positions) const {
  const std::size_t k = positions.size();
  const auto nr = static_cast<std::ptrdiff_t>(target_);
  std::vector<double> c(k + 1, 0.0);
  if (k == 0) {
    c[0] = size_probability_;
    return c;
  }
  const auto lowest_target = nr - static_cast<std::ptrdiff_t>(k);
  Window cur = prefix_[positions.front()];
  Window next;
  // Complement units not yet folded into `cur`.
  auto remaining = static_cast<std::ptrdiff_t>(random_p_.size() - positions.front() - k);
  std::size_t skip = 1;
  for (std::size_t pos = positions.front() + 1; pos < positions.back(); ++pos) {
    if (skip < k && positions[skip] == pos) {
      ++skip;
      continue;
    }
    --remaining;
    convolve(cur, random_p_[pos], lowest_target - remaining, nr, next);
    cur.swap(next);
  }
  const Window& tail = suffix_[positions.back() + 1];
  for (std::size_t j = 0; j <= k; ++j) {
    c[j] = combine(cur, tail, nr - static_cast<std::ptrdiff_t>(j));
  }
  return c;
}

namespace {

struct PatternPlan {
  std::vector<std::size_t> positions;  // sorted random positions
  std::vector<bool> is_random;         // per query unit
};

}  // namespace

std::vector<double> ExactOracle::pattern_probabilities(std::span<const UnitIndex> units) const {
  const std::size_t k = units.size();
  if (k > 20) throw Error(ErrorCode::GuardViolation, "pattern enumeration is limited to 20 units");
  checked_units(design_, units);

  PatternPlan plan;
  plan.is_random.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t pos = position_[units[j]];
    plan.is_random[j] = pos != kNotRandom;
    if (plan.is_random[j]) plan.positions.push_back(pos);
  }
  std::sort(plan.positions.begin(), plan.positions.end());
  const auto c = leave_out(plan.positions);

  std::vector<double> out(std::size_t{1} << k);
  for (std::size_t mask = 0; mask < out.size(); ++mask) {
    double weight = 1.0;
    std::size_t random_in = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const double p = design_.p(units[j]);
      if ((mask >> j) & 1U) {
        weight *= p;
        if (plan.is_random[j]) ++random_in;
      } else {
        weight *= 1.0 - p;
      }
    }
    out[mask] = weight == 0.0 ? 0.0 : weight * c[random_in] / size_probability_;
  }
  return out;
}

double ExactOracle::exclusion_pattern(std::span<const UnitIndex> included,
                                      std::span<const UnitIndex> excluded) const {
  std::vector<UnitIndex> all(included.begin(), included.end());
  all.insert(all.end(), excluded.begin(), excluded.end());
  checked_units(design_, all);
  const auto in_sorted = checked_units(design_, included);
  const auto out_sorted = checked_units(design_, excluded);

  double weight = 1.0;
  std::vector<std::size_t> positions;
  std::size_t random_in = 0;
  for (UnitIndex i : in_sorted) {
    weight *= design_.p(i);
    if (position_[i] != kNotRandom) {
      positions.push_back(position_[i]);
      ++random_in;
    }
  }
  for (UnitIndex i : out_sorted) {
    weight *= 1.0 - design_.p(i);
    if (position_[i] != kNotRandom) positions.push_back(position_[i]);
  }
  if (weight == 0.0) return 0.0;
  std::sort(positions.begin(), positions.end());
  return weight * leave_out(positions)[random_in] / size_probability_;
}

double ExactOracle::inclusion(std::span<const UnitIndex> units) const {
  return exclusion_pattern(units, {});
}

std::vector<double> ExactOracle::first_order() const {
  const std::size_t N = design_.population_size();
  const auto nr = static_cast<std::ptrdiff_t>(target_);
  std::vector<double> pi(N);
  for (UnitIndex i = 0; i < N; ++i) {
    const std::size_t a = position_[i];
    if (a == kNotRandom) {
      pi[i] = design_.p(i);
      continue;
    }
    pi[i] = random_p_[a] * combine(prefix_[a], suffix_[a + 1], nr - 1) / size_probability_;
  }
  return pi;
}

std::vector<double> ExactOracle::pair_table(unsigned workers) const {
  const std::size_t N = design_.population_size();
  const std::size_t R = random_p_.size();
  const auto nr = static_cast<std::ptrdiff_t>(target_);
  const auto rr = static_cast<std::ptrdiff_t>(R);
  const auto pi = first_order();

  std::vector<UnitIndex> unit_at(R);
  for (UnitIndex i = 0; i < N; ++i) {
    if (position_[i] != kNotRandom) unit_at[position_[i]] = i;
  }

  std::vector<double> table(N * N, 0.0);
  // Random-random pairs: sweep the second unit rightwards, folding skipped
  // units into a running prefix law.
  parallel_for(R, workers, [&](std::size_t a) {
    Window cur = prefix_[a];
    Window next;
    const UnitIndex ia = unit_at[a];
    for (std::size_t b = a + 1; b < R; ++b) {
      const double value = random_p_[a] * random_p_[b] *
                           combine(cur, suffix_[b + 1], nr - 2) / size_probability_;
      table[ia * N + unit_at[b]] = value;
      if (b + 1 < R) {
        convolve(cur, random_p_[b], nr - rr + static_cast<std::ptrdiff_t>(b), nr, next);
        cur.swap(next);
      }
    }
  });

  for (UnitIndex i = 0; i < N; ++i) {
    table[i * N + i] = pi[i];
    for (UnitIndex j = i + 1; j < N; ++j) {
      double v;
      if (position_[i] != kNotRandom && position_[j] != kNotRandom) {
        v = table[i * N + j] + table[j * N + i];  // exactly one side was written
      } else if (position_[i] == kNotRandom) {
        v = design_.p(i) == 1.0 ? pi[j] : 0.0;
      } else {
        v = design_.p(j) == 1.0 ? pi[i] : 0.0;
      }
      table[i * N + j] = v;
      table[j * N + i] = v;
    }
  }
  return table;
}

}  // namespace rejective
