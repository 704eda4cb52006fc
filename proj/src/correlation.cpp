#include "rejective/correlation.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "rejective/compensated_sum.hpp"
#include "rejective/error.hpp"
#include "rejective/parallel.hpp"
#include "rejective/tuples.hpp"

namespace rejective {

InclusionTable inclusion_table(const ExactOracle& oracle, std::span<const UnitIndex> units,
                               std::size_t max_order) {
  const auto sorted = checked_units(oracle.design(), units);
  const std::size_t k = sorted.size();
  if (k > 20) throw Error(ErrorCode::GuardViolation, "inclusion tables are limited to 20 units");
  InclusionTable table;
  std::vector<UnitIndex> subset;
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << k); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) > max_order) continue;
    subset.clear();
    for (std::size_t j = 0; j < k; ++j) {
      if ((mask >> j) & 1U) subset.push_back(sorted[j]);
    }
    table.emplace(subset, oracle.inclusion(subset));
  }
  return table;
}

namespace {

double lookup(const InclusionTable& table, const std::vector<UnitIndex>& key) {
  const auto it = table.find(key);
  if (it == table.end()) {
    std::string units;
    for (UnitIndex u : key) units += (units.empty() ? "" : ",") + std::to_string(u);
    throw Error(ErrorCode::MissingEntry, "no joint inclusion probability for {" + units + "}");
  }
  return it->second;
}

}  // namespace

double lemma4_decompose(const InclusionTable& table, std::span<const UnitIndex> units) {
  std::vector<UnitIndex> sorted(units.begin(), units.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::BadIndex, "duplicate unit");
  }
  const std::size_t k = sorted.size();
  if (k < 2) throw Error(ErrorCode::BadInput, "the decomposition needs at least 2 units");
  if (k > 20) throw Error(ErrorCode::GuardViolation, "the decomposition is limited to 20 units");

  std::vector<double> pi(k);
  for (std::size_t j = 0; j < k; ++j) pi[j] = lookup(table, {sorted[j]});

  CompensatedSum acc;
  std::vector<UnitIndex> subset;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << k); ++mask) {
    const std::size_t m = static_cast<std::size_t>(std::popcount(mask));
    if (m < 2) continue;
    subset.clear();
    double inside = 1.0;
    double outside = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      if ((mask >> j) & 1U) {
        subset.push_back(sorted[j]);
        inside *= pi[j];
      } else {
        outside *= pi[j];
      }
    }
    const double term = (lookup(table, subset) - inside) * outside;
    acc += (k - m) % 2 == 0 ? term : -term;
  }
  return acc.value();
}

double central_moment_from_patterns(std::span<const double> patterns,
                                    std::span<const double> pi, std::span<const int> powers) {
  const std::size_t k = pi.size();
  CompensatedSum acc;
  for (std::size_t mask = 0; mask < patterns.size(); ++mask) {
    if (patterns[mask] == 0.0) continue;
    double value = patterns[mask];
    for (std::size_t j = 0; j < k; ++j) {
      const double base = static_cast<double>((mask >> j) & 1U) - pi[j];
      for (int e = 0; e < powers[j]; ++e) value *= base;
    }
    acc += value;
  }
  return acc.value();
}

namespace {

void check_query(const CentralMomentQuery& query) {
  const std::size_t k = query.units.size();
  if (k != query.powers.size()) throw Error(ErrorCode::BadInput, "units and powers differ in length");
  if (k < 2) throw Error(ErrorCode::BadInput, "central moments need at least 2 units");
  if (k > kMaxMomentUnits) {
    throw Error(ErrorCode::GuardViolation, "central moments are limited to 10 units");
  }
  for (int power : query.powers) {
    if (power < 1) throw Error(ErrorCode::BadInput, "powers must be >= 1");
  }
}

std::vector<double> tuple_pi(const ExactOracle& oracle, std::span<const UnitIndex> units) {
  std::vector<double> pi;
  pi.reserve(units.size());
  for (UnitIndex i : units) {
    const UnitIndex one[] = {i};
    pi.push_back(oracle.inclusion(one));
  }
  return pi;
}

std::vector<std::vector<int>> distinct_permutations(std::span<const int> powers) {
  std::vector<int> v(powers.begin(), powers.end());
  std::sort(v.begin(), v.end());
  std::vector<std::vector<int>> out;
  do {
    out.push_back(v);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

std::array<double, 4> pair_patterns(double pi_i, double pi_j, double pi_ij) {
  return {1.0 - pi_i - pi_j + pi_ij, pi_i - pi_ij, pi_j - pi_ij, pi_ij};
}

}  // namespace

double central_moment_exact(const ExactOracle& oracle, const CentralMomentQuery& query) {
  check_query(query);
  checked_units(oracle.design(), query.units);
  const auto patterns = oracle.pattern_probabilities(query.units);
  const auto pi = tuple_pi(oracle, query.units);
  return central_moment_from_patterns(patterns, pi, query.powers);
}

double central_moment_exact(const Design& design, const CentralMomentQuery& query) {
  return central_moment_exact(ExactOracle(design), query);
}

ScalingStudy proposition1_study(std::span<const Design> family, std::string description,
                                std::span<const int> powers, const StudyOptions& options) {
  const std::size_t k = powers.size();
  if (k < 2) throw Error(ErrorCode::BadInput, "the study needs at least 2 powers");
  if (k > kMaxMomentUnits) {
    throw Error(ErrorCode::GuardViolation, "central moments are limited to 10 units");
  }
  for (int power : powers) {
    if (power < 1) throw Error(ErrorCode::BadInput, "powers must be >= 1");
  }
  const auto perms = distinct_permutations(powers);

  std::vector<ScalingPoint> points;
  std::vector<std::string> coverage;
  for (const Design& design : family) {
    const ExactOracle oracle(design);
    const auto pi = oracle.first_order();
    const std::size_t N = design.population_size();
    double worst = 0.0;

    if (k == 2) {
      const auto table = oracle.pair_table(options.workers);
      std::vector<double> row_max(N, 0.0);
      parallel_for(N, options.workers, [&](std::size_t i) {
        double m = 0.0;
        for (std::size_t j = i + 1; j < N; ++j) {
          const auto patterns = pair_patterns(pi[i], pi[j], table[i * N + j]);
          const double upi[] = {pi[i], pi[j]};
          for (const auto& perm : perms) {
            m = std::max(m, std::abs(central_moment_from_patterns(patterns, upi, perm)));
          }
        }
        row_max[i] = m;
      });
      worst = *std::max_element(row_max.begin(), row_max.end());
      coverage.push_back("exhaustive:" + std::to_string(binomial(N, 2)));
    } else {
      const auto tuples = select_tuples(design, k, options.tuple_budget, options.seed);
      std::vector<double> values(tuples.size(), 0.0);
      parallel_for(tuples.size(), options.workers, [&](std::size_t t) {
        const auto units = tuples[t];
        const auto patterns = oracle.pattern_probabilities(units);
        std::vector<double> upi;
        for (UnitIndex i : units) upi.push_back(pi[i]);
        double m = 0.0;
        for (const auto& perm : perms) {
          m = std::max(m, std::abs(central_moment_from_patterns(patterns, upi, perm)));
        }
        values[t] = m;
      });
      if (!values.empty()) worst = *std::max_element(values.begin(), values.end());
      coverage.push_back(tuples.coverage());
    }
    points.push_back(ScalingPoint{N, design_stats(design).d, worst});
  }
  return make_study(std::move(description), std::move(points), std::move(coverage));
}

ConditionRow check_conditions(const Design& design, const ConditionOptions& options) {
  const ExactOracle oracle(design);
  const auto pi = oracle.first_order();
  const auto stats = design_stats(design);
  const std::size_t N = design.population_size();
  const double Nd = static_cast<double>(N);
  const double nd = static_cast<double>(design.sample_size());

  ConditionRow row;
  row.N = N;
  row.n = static_cast<std::int64_t>(design.sample_size());
  row.d = stats.d;
  row.N_over_d = stats.ratio_N_over_d;

  // Pairs.
  double max2 = 0.0;
  std::string pair_cov = "none";
  if (N >= 2 && N <= options.exhaustive_pair_limit) {
    const auto table = oracle.pair_table(options.workers);
    std::vector<double> row_max(N, 0.0);
    parallel_for(N, options.workers, [&](std::size_t i) {
      double m = 0.0;
      for (std::size_t j = i + 1; j < N; ++j) {
        m = std::max(m, std::abs(table[i * N + j] - pi[i] * pi[j]));
      }
      row_max[i] = m;
    });
    max2 = *std::max_element(row_max.begin(), row_max.end());
    pair_cov = "exhaustive:" + std::to_string(binomial(N, 2));
  } else if (N >= 2) {
    const auto tuples = select_tuples(design, 2, options.tuple_budget, options.seed);
    std::vector<double> values(tuples.size(), 0.0);
    parallel_for(tuples.size(), options.workers, [&](std::size_t t) {
      const auto u = tuples[t];
      values[t] = std::abs(oracle.inclusion(u) - pi[u[0]] * pi[u[1]]);
    });
    if (!values.empty()) max2 = *std::max_element(values.begin(), values.end());
    pair_cov = tuples.coverage();
  }

  // Triples: the squared unit runs over each member of the tuple.
  double max3 = 0.0;
  std::string triple_cov = "none";
  if (N >= 3) {
    const auto tuples = select_tuples(design, 3, options.tuple_budget, options.seed);
    std::vector<double> values(tuples.size(), 0.0);
    parallel_for(tuples.size(), options.workers, [&](std::size_t t) {
      const auto u = tuples[t];
      const auto patterns = oracle.pattern_probabilities(u);
      const double upi[] = {pi[u[0]], pi[u[1]], pi[u[2]]};
      double m = 0.0;
      for (std::size_t sq = 0; sq < 3; ++sq) {
        int powers[] = {1, 1, 1};
        powers[sq] = 2;
        m = std::max(m, std::abs(central_moment_from_patterns(patterns, upi, powers)));
      }
      values[t] = m;
    });
    if (!values.empty()) max3 = *std::max_element(values.begin(), values.end());
    triple_cov = tuples.coverage();
  }

  // Quadruples: the fourth-order moment and the three pairings of the
  // product-pair term.
  double max4 = 0.0;
  double maxpair = 0.0;
  std::string quad_cov = "none";
  if (N >= 4) {
    const auto tuples = select_tuples(design, 4, options.tuple_budget, options.seed);
    std::vector<double> v4(tuples.size(), 0.0), vpair(tuples.size(), 0.0);
    parallel_for(tuples.size(), options.workers, [&](std::size_t t) {
      const auto u = tuples[t];
      const auto patterns = oracle.pattern_probabilities(u);
      const double upi[] = {pi[u[0]], pi[u[1]], pi[u[2]], pi[u[3]]};
      const int ones[] = {1, 1, 1, 1};
      v4[t] = std::abs(central_moment_from_patterns(patterns, upi, ones));

      auto joint = [&](unsigned bits) {
        CompensatedSum acc;
        for (unsigned mask = 0; mask < 16; ++mask) {
          if ((mask & bits) == bits) acc += patterns[mask];
        }
        return acc.value();
      };
      const double all = patterns[15];
      const unsigned pairings[3][2] = {{0b0011, 0b1100}, {0b0101, 0b1010}, {0b1001, 0b0110}};
      double m = 0.0;
      for (const auto& pr : pairings) {
        m = std::max(m, std::abs(all - joint(pr[0]) * joint(pr[1])));
      }
      vpair[t] = m;
    });
    if (!v4.empty()) {
      max4 = *std::max_element(v4.begin(), v4.end());
      maxpair = *std::max_element(vpair.begin(), vpair.end());
    }
    quad_cov = tuples.coverage();
  }

  row.c2max = nd * max2;
  row.c3max = Nd * Nd * Nd / (nd * nd) * max3;
  row.c4max = Nd * Nd * Nd * Nd / (nd * nd) * max4;
  row.cpair = maxpair;
  row.coverage = "pairs=" + pair_cov + ";triples=" + triple_cov + ";quads=" + quad_cov;
  return row;
}

ConditionReport check_conditions(std::span<const Design> family, std::string description,
                                 const ConditionOptions& options) {
  ConditionReport report;
  report.family = std::move(description);
  for (const Design& design : family) report.rows.push_back(check_conditions(design, options));
  return report;
}

double ArratiaExample::window_fraction(double eps) const {
  const double lo = eps / (1.0 + eps);
  const double hi = 1.0 / (1.0 + eps);
  std::size_t inside = 0;
  for (double p : design.p()) {
    if (lo < p && p < hi) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(N);
}

ArratiaExample arratia_example(double gamma, double delta, double alpha, std::size_t N) {
  if (!(0.0 < gamma && gamma < alpha && alpha < 1.0 - delta && 1.0 - delta < 1.0)) {
    throw Error(ErrorCode::ParameterOrderViolated,
                "parameters must satisfy 0 < gamma < alpha < 1 - delta < 1");
  }
  const double Nd = static_cast<double>(N);
  const auto n = static_cast<std::size_t>(std::llround(gamma * Nd));
  const auto k = static_cast<std::size_t>(std::llround(alpha * Nd));
  if (n < 1 || k < 1 || k >= N) {
    throw Error(ErrorCode::BadInput, "N is too small for positive block sizes");
  }
  double p_large = gamma / alpha;
  double p_small = (static_cast<double>(n) - static_cast<double>(k) * p_large) /
                   static_cast<double>(N - k);
  if (p_small < 0.0) {
    p_small = 0.0;
    p_large = static_cast<double>(n) / static_cast<double>(k);
  }
  if (p_small > 1.0 || p_large > 1.0) {
    throw Error(ErrorCode::BadInput, "rounding leaves no feasible p for the blocks");
  }
  std::vector<double> p(N, p_small);
  std::fill(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(k), p_large);
  Design design = validate_design(std::move(p), static_cast<std::int64_t>(n));
  const double d = design_stats(design).d;
  return ArratiaExample{gamma, delta, alpha, N, n, k, p_large, p_small, std::move(design),
                        d / Nd, Nd / d};
}

std::vector<double> arratia_eps_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(i / 20.0);
  return grid;
}

}  // namespace rejective
